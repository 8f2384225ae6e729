#pragma once

#include <string>
#include <vector>

#include "nsdde/ensemble.hpp"
#include "nsdde/model.hpp"
#include "nsdde/theta_em.hpp"

namespace nsdde {

struct ExponentEstimate {
  double slope = 0.0;    // 1/time
  double std_err = 0.0;  // standard error of the slope
  double window_t0 = 0.0;
  double window_t1 = 0.0;
  int n_points = 0;
};

/// Least-squares slope of log(moment) against t over the window. Requires at
/// least 10 grid points and strictly positive values there; throws
/// Error(errc::non_positive_moment) otherwise.
ExponentEstimate fit_moment_exponent(const MomentCurve& curve, double t0, double t1);

// ---------------------------------------------------------------------------
// Scheme certificate (mean-square / almost-sure stability of the theta scheme)
// ---------------------------------------------------------------------------

/// Critical contraction level: the certificate requires beta^2 < this.
double contraction_critical();  // 1 / (3 + 2 sqrt(2))

/// Required dissipativity gap: C1 must exceed
///   (3 + 2 sqrt(2)) / (1 - (3 + 2 sqrt(2)) beta^2) * C2.
/// Returns +inf when beta^2 is at or beyond the critical level.
double certificate_threshold(double beta, double c2);

struct CertificateCheck {
  std::string name;
  double margin = 0.0;  // signed gap, positive for pass
  bool pass = false;
};

struct StabilityCertificate {
  double beta = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double threshold = 0.0;
  double theta = 0.0;
  double l_theta_delta = 0.0;
  std::vector<CertificateCheck> checks;
  bool verdict = false;
};

/// Evaluates the four certificate checks from the model's declared constants:
///   contraction: beta^2 < 1/(3+2 sqrt(2))
///   threshold_gap: C1 > certificate_threshold(beta, C2)
///   theta_range: 1/2 < theta <= 1 (strict on the left)
///   well_posedness: L*theta*delta < 1
/// Throws Error(errc::missing_constants) when (C1, C2) are undeclared.
StabilityCertificate certify_scheme(const ModelSpec& model, const SchemeConfig& cfg);

// ---------------------------------------------------------------------------
// Quadratic exponential-rate certificate for the exact solution
// ---------------------------------------------------------------------------

/// Checks, with V = U = |x|^2 and zero envelopes, the algebraic gates
///   alpha1 >= alpha2 e^{lambda tau} and beta e^{lambda tau} < 1
/// exactly and the rate inequality
///   LV(x,y,t,i) <= -lambda|z|^2 - alpha1|x|^2 + alpha2|y|^2
/// by sampling. pass requires both gates and a nonnegative sampled margin.
struct QuadraticRateReport {
  double lambda = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double exp_lambda_tau = 0.0;
  double gate_alpha_margin = 0.0;  // alpha1 - alpha2 e^{lambda tau}
  double gate_beta_margin = 0.0;   // 1 - beta e^{lambda tau}
  bool gate_alpha_pass = false;
  bool gate_beta_pass = false;
  MarginReport sampled;
  bool pass = false;
};

QuadraticRateReport certify_exact_quadratic(const ModelSpec& model, const GeneratorMatrix& gen,
                                            double lambda, double alpha1, double alpha2,
                                            const SampleBox& box, int n_samples,
                                            rng::Stream& stream);

// ---------------------------------------------------------------------------
// Almost-sure stability conditions for user-supplied V
// ---------------------------------------------------------------------------

/// Sampled supremum of
///   [ |g^T V_x(z,t,i)|^2 + sum_{j != i} gamma_ij (V(z,t,j) - V(z,t,i))^2 ] / V(z,t,i)^2,
/// the smallest alpha consistent with the sample. Points with V = 0 and a
/// nonzero numerator are unverifiable and counted separately.
struct AlphaEstimate {
  double alpha = 0.0;
  int n_unverifiable = 0;
  Vec arg_x;
  Vec arg_y;
  int arg_regime = 1;
};

AlphaEstimate check_as_noise_bound(const ModelSpec& model, const GeneratorMatrix& gen,
                                    const LyapunovCallbacks& lyap, const SampleBox& box,
                                    int n_samples, rng::Stream& stream);

/// Sampled envelope constants for user-supplied V: the tightest
///   c1 |w|^p <= V(w,t,i) <= c2 |w|^p
/// bounds seen, and the smallest constant C0 with LV <= C0 V(z,t,i) on the
/// sample (constant-coefficient specialization of the growth envelope).
struct EnvelopeEstimate {
  double c1_low = 0.0;
  double c2_high = 0.0;
  double c0 = 0.0;
  int n_unverifiable = 0;
};

EnvelopeEstimate check_as_envelope(const ModelSpec& model, const GeneratorMatrix& gen,
                                   const LyapunovCallbacks& lyap, double p,
                                   const SampleBox& box, int n_samples, rng::Stream& stream);

}  // namespace nsdde
