#pragma once

#include <optional>
#include <vector>

#include "nsdde/model.hpp"

namespace nsdde {

/// Discretization parameters of the stochastic theta scheme. The step size is
/// always derived as delta = tau / m_steps, never entered directly.
struct SchemeConfig {
  double theta = 1.0;
  int m_steps = 1;        // delay steps per tau
  double delta = 0.0;     // tau / m_steps
  int horizon_steps = 0;  // K
  double tau = 0.0;

  /// Validates theta in [0,1] and, for theta > 0, the well-posedness gate
  /// L * theta * delta < 1 for the model's declared one-sided constant.
  static SchemeConfig create(double tau, int m_steps, double theta, double horizon,
                             double one_sided_L);

  /// Same derivation without the well-posedness gate; used by the certificate
  /// command, which reports a violated gate as a failed check instead of
  /// refusing to construct the scheme.
  static SchemeConfig create_unchecked(double tau, int m_steps, double theta, double horizon);

  double time_at(int k) const { return static_cast<double>(k) * delta; }
};

/// Fixed-capacity ring holding the last m+1 states X_{k-m}..X_k.
class HistoryRing {
 public:
  explicit HistoryRing(int capacity);

  void push(Vec x);
  /// age 0 is the oldest entry (X_{k-m} once full), age size()-1 the newest.
  const Vec& from_oldest(int age) const;
  const Vec& oldest() const { return from_oldest(0); }
  const Vec& newest() const { return from_oldest(size_ - 1); }
  int size() const { return size_; }
  int capacity() const { return capacity_; }

 private:
  std::vector<Vec> slots_;
  int capacity_ = 0;
  int head_ = 0;  // index of the oldest entry
  int size_ = 0;
};

/// One simulated trajectory on the grid, initial segment included
/// (grid steps run j = -m..K, times[j+m] = j*delta).
struct PathRecord {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<int> regimes;
  int m_steps = 0;
  /// Grid step at which the state first left the overflow guard; entries
  /// before it are finite, the path is truncated there.
  std::optional<int> blowup_at;

  int dim() const { return states.empty() ? 0 : static_cast<int>(states.front().size()); }
  std::size_t index_of_step(int k) const { return static_cast<std::size_t>(m_steps + k); }
  int last_step() const { return static_cast<int>(states.size()) - 1 - m_steps; }
};

/// Paths whose norm exceeds this are flagged as blown up and truncated.
inline constexpr double kBlowupGuard = 1e12;

/// Convergence diagnostics of one implicit solve.
struct SolveStats {
  int newton_iterations = 0;
  int fallback_iterations = 0;
};

/// Solves x - theta*delta * f(x, y_next, t_next, i_next) = rhs + D(y_next, i_next)
/// by damped Newton with a finite-difference Jacobian (or the model's analytic
/// one), falling back to a relaxed fixed-point iteration when Newton stalls.
/// Requires L * theta_delta < 1 so the map is strongly monotone and the root
/// unique. Returns x with residual norm <= tol * (1 + |x|).
/// Throws Error(errc::no_convergence) after the iteration budget.
Vec implicit_solve(const ModelSpec& model, const Vec& y_next, double t_next, int i_next,
                   const Vec& rhs, double theta_delta, double tol = 1e-12,
                   SolveStats* stats = nullptr);

/// Per-step input of the scheme recursion.
struct StepState {
  const HistoryRing* history = nullptr;  // X_{k-m}..X_k, full
  int k = 0;
  int regime_now = 1;   // r(k delta)
  int regime_next = 1;  // r((k+1) delta)
};

struct StepResult {
  Vec x;
  bool blown = false;
};

/// One theta-EM update: computes X_{k+1} from the history ring and the
/// Brownian increment dB ~ N(0, delta I_m). Explicit for theta = 0.
StepResult step(const ModelSpec& model, const SchemeConfig& cfg, const StepState& state,
                const Vec& dB, double tol = 1e-12, double blowup_guard = kBlowupGuard);

/// Runs the scheme over the whole grid. `regimes` must provide r(k delta) for
/// k = 0..horizon_steps (from regime_at_grid). Brownian increments are drawn
/// from `stream` in fixed step order, so a path depends only on its stream.
/// Blow-up truncates the record instead of throwing; solver failure
/// (errc::no_convergence) propagates.
PathRecord simulate_path(const ModelSpec& model, const SchemeConfig& cfg,
                         const InitialSegment& init, const std::vector<int>& regimes,
                         rng::Stream& stream, double tol = 1e-12,
                         double blowup_guard = kBlowupGuard);

}  // namespace nsdde
