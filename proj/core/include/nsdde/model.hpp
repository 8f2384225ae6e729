#pragma once

#include <functional>
#include <optional>
#include <string>

#include "nsdde/ctmc.hpp"
#include "nsdde/linalg.hpp"
#include "nsdde/rng.hpp"

namespace nsdde {

/// Constants (C1, C2) of the dissipativity condition
///   2<x - D(y,i), f(x,y,t,i)> + |g(x,y,t,i)|^2 <= -C1|x|^2 + C2|y|^2.
struct DissipativityConstants {
  double c1 = 0.0;
  double c2 = 0.0;
};

/// A neutral stochastic differential delay equation with regime switching:
///   d[X(t) - D(X(t-tau), r(t))] = f(X,X_tau,t,r) dt + g(X,X_tau,t,r) dB.
///
/// All callbacks must vanish at the origin (D(0,i)=0, f(0,0,t,i)=0,
/// g(0,0,t,i)=0) so that x == 0 is the trivial solution; validate_model spot
/// checks this. Instances are immutable after construction and safe to share
/// across threads.
struct ModelSpec {
  std::string name;
  int dim_x = 1;      // state dimension d
  int dim_w = 1;      // Brownian dimension m
  int n_regimes = 1;  // size of the regime space S = {1..N}

  double tau = 1.0;  // delay

  std::function<Vec(const Vec& y, int regime)> neutral;                          // D
  std::function<Vec(const Vec& x, const Vec& y, double t, int regime)> drift;    // f
  std::function<Matrix(const Vec& x, const Vec& y, double t, int regime)> diffusion;  // g, d x m
  /// Optional analytic d f / d x; the implicit solver falls back to finite
  /// differences when absent.
  std::function<Matrix(const Vec& x, const Vec& y, double t, int regime)> drift_jacobian;

  double beta = 0.0;         // declared contraction constant of D, in [0,1)
  double one_sided_L = 1.0;  // declared one-sided Lipschitz constant of f, > 0
  std::optional<DissipativityConstants> dissipativity;
};

/// Spot-checks the trivial-solution identities on a small (t, i) grid and the
/// declared constants. Throws Error(errc::invalid_argument) on violation.
void validate_model(const ModelSpec& model);

/// Initial data xi on [-tau, 0]; the scheme samples it at the grid offsets.
struct InitialSegment {
  int dim = 1;
  std::function<Vec(double t)> value;

  static InitialSegment constant(Vec v);
};

/// A C^{2,1} Lyapunov function V(z, t, i) with its derivatives.
struct LyapunovCallbacks {
  std::function<double(const Vec& z, double t, int regime)> V;
  std::function<double(const Vec& z, double t, int regime)> V_t;
  std::function<Vec(const Vec& z, double t, int regime)> V_x;      // gradient
  std::function<Matrix(const Vec& z, double t, int regime)> V_xx;  // Hessian

  /// V(z) = |z|^2, regime- and time-independent.
  static LyapunovCallbacks quadratic();
};

/// Samples a few points and requires V >= 0 and V_xx symmetric within 1e-10.
void validate_lyapunov(const LyapunovCallbacks& lyap, int dim, int n_regimes,
                       rng::Stream& stream);

/// Generator of the process applied to V, evaluated with z = x - D(y,i):
///   LV = V_t(z,t,i) + V_x(z,t,i).f + 1/2 trace(g^T V_xx(z,t,i) g)
///        + sum_j gamma_ij V(z,t,j).
/// Throws Error(errc::non_finite_evaluation) if any intermediate is not
/// finite.
double evaluate_LV(const ModelSpec& model, const GeneratorMatrix& gen,
                   const LyapunovCallbacks& lyap, const Vec& x, const Vec& y, double t,
                   int regime);

// ---------------------------------------------------------------------------
// Built-in models
// ---------------------------------------------------------------------------

/// Scalar benchmark with a sine neutral term on two regimes:
///   D(y,i) = sin(y)/(6i),
///   f(x,y,i) = -(6x + x^5 + sin(y)/2) i,
///   g(x,y,i) = 2 x^3 y / ((1+y^2) i),
/// declared beta = 1/6, dissipativity (C1, C2) = (10, 25/72).
ModelSpec builtin_sine_neutral(double tau = 1.0);

/// Default 2-state generator template for the sine-neutral benchmark
/// (symmetric unit rates).
GeneratorMatrix sine_neutral_generator();

/// Two-dimensional model whose diffusion rotates z = x - D(y,i) and grows
/// like |z|^{r+1}, deliberately violating linear growth:
///   f = -|z|^{2r} z - z,   g = |z|^r (-z_2, z_1)^T.
/// `neutral` must satisfy the contraction condition for `beta`; pass nullptr
/// for the default D(y,i) = beta * y.
ModelSpec builtin_rotation2d(double r_exponent,
                             std::function<Vec(const Vec&, int)> neutral, double beta,
                             int n_regimes = 1, double tau = 1.0);

/// Scalar affine family used by tests and the deterministic closed-form
/// checks: f = -a x + b y, g = sigma_x x + sigma_y y, D = neutral_coef y.
ModelSpec builtin_linear(double a, double b = 0.0, double sigma_x = 0.0,
                         double sigma_y = 0.0, double neutral_coef = 0.0,
                         double tau = 1.0);

// ---------------------------------------------------------------------------
// Sampling-based condition checks (falsifiers, not proofs)
// ---------------------------------------------------------------------------

/// Worst observed margin of an inequality over a sample, with the point that
/// attained it. margin >= 0 means no violation was found.
struct MarginReport {
  double worst_margin = 0.0;
  Vec arg_x;
  Vec arg_y;
  double arg_t = 0.0;
  int arg_regime = 1;
  int n_samples = 0;
};

/// Largest sampled difference quotient |D(x,i)-D(y,i)|/|x-y|; a lower bound
/// on the true contraction constant. Half the pairs are drawn independently,
/// half nearly coincident to probe the local slope.
double estimate_beta(const ModelSpec& model, const SampleBox& box, int n_samples,
                     rng::Stream& stream);

/// Samples the dissipativity margin
///   [-c1|x|^2 + c2|y|^2] - [2<x-D(y,i), f> + |g|^2]
/// and reports the minimum. Requires c1 > c2 > 0.
MarginReport check_dissipativity(const ModelSpec& model, double c1, double c2,
                                 const SampleBox& box, int n_samples, rng::Stream& stream);

}  // namespace nsdde
