#include "nsdde/theta_em.hpp"

#include <cassert>
#include <cmath>
#include <string>
#include <utility>

#include "nsdde/error.hpp"

namespace nsdde {

namespace {

constexpr int kMaxNewton = 50;
constexpr int kMaxFallback = 50;
constexpr double kFallbackRelaxation = 0.5;

Matrix fd_drift_jacobian(const ModelSpec& model, const Vec& x, const Vec& y, double t,
                         int regime) {
  const std::size_t d = x.size();
  const double h = 1e-7 * (1.0 + norm(x));
  Matrix jac(d, d);
  Vec xp = x;
  Vec xm = x;
  for (std::size_t c = 0; c < d; ++c) {
    xp[c] = x[c] + h;
    xm[c] = x[c] - h;
    const Vec fp = model.drift(xp, y, t, regime);
    const Vec fm = model.drift(xm, y, t, regime);
    for (std::size_t r = 0; r < d; ++r) jac(r, c) = (fp[r] - fm[r]) / (2.0 * h);
    xp[c] = x[c];
    xm[c] = x[c];
  }
  return jac;
}

double residual_norm(const ModelSpec& model, const Vec& x, const Vec& y, double t, int regime,
                     const Vec& target, double theta_delta, Vec& residual) {
  const Vec f = model.drift(x, y, t, regime);
  residual.resize(x.size());
  for (std::size_t c = 0; c < x.size(); ++c) residual[c] = x[c] - theta_delta * f[c] - target[c];
  return norm(residual);
}

}  // namespace

SchemeConfig SchemeConfig::create_unchecked(double tau, int m_steps, double theta,
                                            double horizon) {
  require(tau > 0.0, errc::invalid_argument, "tau must be positive");
  require(m_steps >= 1, errc::invalid_argument, "m_steps must be at least 1");
  require(theta >= 0.0 && theta <= 1.0, errc::invalid_argument, "theta must be in [0,1]");
  require(horizon > 0.0, errc::invalid_argument, "horizon must be positive");

  SchemeConfig cfg;
  cfg.theta = theta;
  cfg.m_steps = m_steps;
  cfg.tau = tau;
  cfg.delta = tau / static_cast<double>(m_steps);
  cfg.horizon_steps = static_cast<int>(std::ceil(horizon / cfg.delta - 1e-9));
  require(cfg.horizon_steps >= 1, errc::invalid_argument, "horizon shorter than one step");
  return cfg;
}

SchemeConfig SchemeConfig::create(double tau, int m_steps, double theta, double horizon,
                                  double one_sided_L) {
  SchemeConfig cfg = create_unchecked(tau, m_steps, theta, horizon);
  if (theta > 0.0) {
    const double gate = one_sided_L * theta * cfg.delta;
    require(gate < 1.0, errc::invalid_argument,
            "well-posedness gate violated: L*theta*delta = " + std::to_string(gate) +
                " must be < 1");
  }
  return cfg;
}

HistoryRing::HistoryRing(int capacity) : slots_(static_cast<std::size_t>(capacity)),
                                          capacity_(capacity) {
  require(capacity >= 1, errc::invalid_argument, "ring capacity must be positive");
}

void HistoryRing::push(Vec x) {
  if (size_ < capacity_) {
    slots_[static_cast<std::size_t>((head_ + size_) % capacity_)] = std::move(x);
    ++size_;
  } else {
    slots_[static_cast<std::size_t>(head_)] = std::move(x);
    head_ = (head_ + 1) % capacity_;
  }
}

const Vec& HistoryRing::from_oldest(int age) const {
  assert(age >= 0 && age < size_);
  return slots_[static_cast<std::size_t>((head_ + age) % capacity_)];
}

Vec implicit_solve(const ModelSpec& model, const Vec& y_next, double t_next, int i_next,
                   const Vec& rhs, double theta_delta, double tol, SolveStats* stats) {
  require(theta_delta >= 0.0, errc::invalid_argument, "theta*delta must be nonnegative");
  require(model.one_sided_L * theta_delta < 1.0, errc::invalid_argument,
          "implicit solve requires L*theta*delta < 1");

  const Vec d = model.neutral(y_next, i_next);
  Vec target(rhs.size());
  for (std::size_t c = 0; c < rhs.size(); ++c) target[c] = rhs[c] + d[c];

  if (theta_delta == 0.0) return target;

  // explicit predictor; for small delta it sits inside the Newton basin
  Vec x = target;
  Vec residual;
  double res = residual_norm(model, x, y_next, t_next, i_next, target, theta_delta, residual);

  bool newton_ok = true;
  for (int iter = 0; iter < kMaxNewton; ++iter) {
    // the predictor itself never counts as converged: one correction is
    // always applied, otherwise tiny states inherit the full predictor bias
    if (res == 0.0 || (iter > 0 && res <= tol * (1.0 + norm(x)))) {
      if (stats) stats->newton_iterations = iter;
      return x;
    }
    Matrix jac = model.drift_jacobian
                     ? model.drift_jacobian(x, y_next, t_next, i_next)
                     : fd_drift_jacobian(model, x, y_next, t_next, i_next);
    for (std::size_t r = 0; r < jac.rows(); ++r) {
      for (std::size_t c = 0; c < jac.cols(); ++c) jac(r, c) *= -theta_delta;
      jac(r, r) += 1.0;
    }

    Vec direction;
    try {
      direction = jac.solve(residual);
    } catch (const Error& e) {
      if (e.code() != errc::jacobian_singular) throw;
      newton_ok = false;
    }
    if (!newton_ok) break;

    // damped update, halve until the residual decreases
    double damping = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 8; ++halving) {
      Vec trial(x.size());
      for (std::size_t c = 0; c < x.size(); ++c) trial[c] = x[c] - damping * direction[c];
      Vec trial_residual;
      const double trial_res = residual_norm(model, trial, y_next, t_next, i_next, target,
                                             theta_delta, trial_residual);
      if (std::isfinite(trial_res) &&
          (trial_res < res || trial_res <= 0.5 * tol * (1.0 + norm(trial)))) {
        x = std::move(trial);
        residual = std::move(trial_residual);
        res = trial_res;
        accepted = true;
        break;
      }
      damping *= 0.5;
    }
    if (!accepted) {
      newton_ok = false;  // stalled
      break;
    }
    if (stats) stats->newton_iterations = iter + 1;
  }

  if (newton_ok && res <= tol * (1.0 + norm(x))) return x;

  // relaxed fixed point x <- x + w (target + theta*delta f(x) - x); the map is
  // a contraction under the gate for moderate drift stiffness
  for (int iter = 0; iter < kMaxFallback; ++iter) {
    if (stats) stats->fallback_iterations = iter;
    if (res <= tol * (1.0 + norm(x))) return x;
    const Vec f = model.drift(x, y_next, t_next, i_next);
    for (std::size_t c = 0; c < x.size(); ++c) {
      const double fixed_point = target[c] + theta_delta * f[c];
      x[c] = (1.0 - kFallbackRelaxation) * x[c] + kFallbackRelaxation * fixed_point;
    }
    res = residual_norm(model, x, y_next, t_next, i_next, target, theta_delta, residual);
  }

  fail(errc::no_convergence,
       "implicit step did not converge within " + std::to_string(kMaxNewton) + "+" +
           std::to_string(kMaxFallback) + " iterations (residual " + std::to_string(res) +
           "); shrink the step size");
}

StepResult step(const ModelSpec& model, const SchemeConfig& cfg, const StepState& state,
                const Vec& dB, double tol, double blowup_guard) {
  const HistoryRing& ring = *state.history;
  require(ring.size() == cfg.m_steps + 1, errc::invalid_argument,
          "history must hold exactly m+1 states");

  const Vec& x_now = ring.newest();               // X_k
  const Vec& x_delayed = ring.oldest();           // X_{k-m}
  const Vec& x_delayed_next = ring.from_oldest(1);  // X_{k+1-m}

  const double t_now = cfg.time_at(state.k);
  const double t_next = cfg.time_at(state.k + 1);

  const Vec d_now = model.neutral(x_delayed, state.regime_now);
  const Vec f_now = model.drift(x_now, x_delayed, t_now, state.regime_now);
  const Matrix g_now = model.diffusion(x_now, x_delayed, t_now, state.regime_now);
  const Vec noise = g_now.apply(dB);

  const double explicit_weight = (1.0 - cfg.theta) * cfg.delta;
  Vec rhs(x_now.size());
  for (std::size_t c = 0; c < rhs.size(); ++c) {
    rhs[c] = x_now[c] - d_now[c] + explicit_weight * f_now[c] + noise[c];
  }

  StepResult result;
  result.x = implicit_solve(model, x_delayed_next, t_next, state.regime_next, rhs,
                            cfg.theta * cfg.delta, tol);
  result.blown = !all_finite(result.x) || norm(result.x) > blowup_guard;
  return result;
}

PathRecord simulate_path(const ModelSpec& model, const SchemeConfig& cfg,
                         const InitialSegment& init, const std::vector<int>& regimes,
                         rng::Stream& stream, double tol, double blowup_guard) {
  require(static_cast<int>(regimes.size()) >= cfg.horizon_steps + 1, errc::invalid_argument,
          "regime sequence must cover grid steps 0..K");
  require(init.dim == model.dim_x, errc::invalid_argument,
          "initial segment dimension mismatch");

  const int m = cfg.m_steps;
  const int k_max = cfg.horizon_steps;

  PathRecord record;
  record.m_steps = m;
  record.times.reserve(static_cast<std::size_t>(m + k_max + 1));
  record.states.reserve(static_cast<std::size_t>(m + k_max + 1));
  record.regimes.reserve(static_cast<std::size_t>(m + k_max + 1));

  HistoryRing ring(m + 1);
  for (int j = -m; j <= 0; ++j) {
    Vec value = init.value(cfg.time_at(j));
    require(static_cast<int>(value.size()) == model.dim_x && all_finite(value),
            errc::invalid_argument, "initial segment must be finite with dimension d");
    record.times.push_back(cfg.time_at(j));
    record.states.push_back(value);
    record.regimes.push_back(regimes[0]);
    ring.push(std::move(value));
  }

  for (int k = 0; k < k_max; ++k) {
    StepState state;
    state.history = &ring;
    state.k = k;
    state.regime_now = regimes[static_cast<std::size_t>(k)];
    state.regime_next = regimes[static_cast<std::size_t>(k) + 1];

    const Vec dB = stream.next_gaussian_increment(model.dim_w, cfg.delta);
    StepResult next = step(model, cfg, state, dB, tol, blowup_guard);
    if (next.blown) {
      record.blowup_at = k + 1;
      break;
    }
    record.times.push_back(cfg.time_at(k + 1));
    record.states.push_back(next.x);
    record.regimes.push_back(state.regime_next);
    ring.push(std::move(next.x));
  }
  return record;
}

}  // namespace nsdde
