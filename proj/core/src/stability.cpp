#include "nsdde/stability.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "nsdde/error.hpp"

namespace nsdde {

ExponentEstimate fit_moment_exponent(const MomentCurve& curve, double t0, double t1) {
  require(t1 > t0, errc::invalid_argument, "window must have t0 < t1");

  std::vector<double> ts;
  std::vector<double> logs;
  for (std::size_t k = 0; k < curve.times.size(); ++k) {
    const double t = curve.times[k];
    if (t < t0 - 1e-12 || t > t1 + 1e-12) continue;
    const double v = curve.values[k];
    if (!(v > 0.0)) {
      fail(errc::non_positive_moment,
           "moment value " + std::to_string(v) + " at t = " + std::to_string(t) +
               "; shrink the horizon or add paths");
    }
    ts.push_back(t);
    logs.push_back(std::log(v));
  }
  require(ts.size() >= 10, errc::invalid_argument,
          "need at least 10 grid points in the fitting window, have " +
              std::to_string(ts.size()));

  const double n = static_cast<double>(ts.size());
  double t_mean = 0.0;
  double y_mean = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    t_mean += ts[k];
    y_mean += logs[k];
  }
  t_mean /= n;
  y_mean /= n;

  double s_tt = 0.0;
  double s_ty = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double dt = ts[k] - t_mean;
    s_tt += dt * dt;
    s_ty += dt * (logs[k] - y_mean);
  }
  const double slope = s_ty / s_tt;
  const double intercept = y_mean - slope * t_mean;

  double rss = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double resid = logs[k] - (intercept + slope * ts[k]);
    rss += resid * resid;
  }
  const double sigma2 = ts.size() > 2 ? rss / (n - 2.0) : 0.0;

  ExponentEstimate estimate;
  estimate.slope = slope;
  estimate.std_err = std::sqrt(sigma2 / s_tt);
  estimate.window_t0 = t0;
  estimate.window_t1 = t1;
  estimate.n_points = static_cast<int>(ts.size());
  return estimate;
}

double contraction_critical() { return 1.0 / (3.0 + 2.0 * std::sqrt(2.0)); }

double certificate_threshold(double beta, double c2) {
  const double c = 3.0 + 2.0 * std::sqrt(2.0);
  const double denom = 1.0 - c * beta * beta;
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  return c / denom * c2;
}

StabilityCertificate certify_scheme(const ModelSpec& model, const SchemeConfig& cfg) {
  if (!model.dissipativity) {
    fail(errc::missing_constants,
         "model declares no dissipativity constants (C1, C2); estimate them first");
  }

  StabilityCertificate cert;
  cert.beta = model.beta;
  cert.c1 = model.dissipativity->c1;
  cert.c2 = model.dissipativity->c2;
  cert.threshold = certificate_threshold(cert.beta, cert.c2);
  cert.theta = cfg.theta;
  cert.l_theta_delta = model.one_sided_L * cfg.theta * cfg.delta;

  const double beta_sq = cert.beta * cert.beta;
  cert.checks.push_back({"contraction", contraction_critical() - beta_sq,
                         beta_sq < contraction_critical()});
  const double gap = cert.c1 - cert.threshold;
  cert.checks.push_back({"threshold_gap", gap, gap > 0.0});
  cert.checks.push_back({"theta_range", std::min(cert.theta - 0.5, 1.0 - cert.theta),
                         cert.theta > 0.5 && cert.theta <= 1.0});
  cert.checks.push_back(
      {"well_posedness", 1.0 - cert.l_theta_delta, cert.l_theta_delta < 1.0});

  cert.verdict = true;
  for (const CertificateCheck& check : cert.checks) cert.verdict = cert.verdict && check.pass;
  return cert;
}

QuadraticRateReport certify_exact_quadratic(const ModelSpec& model, const GeneratorMatrix& gen,
                                            double lambda, double alpha1, double alpha2,
                                            const SampleBox& box, int n_samples,
                                            rng::Stream& stream) {
  require(lambda > 0.0 && alpha1 > 0.0 && alpha2 > 0.0, errc::invalid_argument,
          "lambda, alpha1, alpha2 must be positive");

  QuadraticRateReport report;
  report.lambda = lambda;
  report.alpha1 = alpha1;
  report.alpha2 = alpha2;
  report.exp_lambda_tau = std::exp(lambda * model.tau);
  report.gate_alpha_margin = alpha1 - alpha2 * report.exp_lambda_tau;
  report.gate_beta_margin = 1.0 - model.beta * report.exp_lambda_tau;
  report.gate_alpha_pass = report.gate_alpha_margin >= 0.0;
  report.gate_beta_pass = report.gate_beta_margin > 0.0;

  const LyapunovCallbacks quad = LyapunovCallbacks::quadratic();
  report.sampled.n_samples = n_samples;
  bool first = true;
  for (int k = 0; k < n_samples; ++k) {
    const Vec x = stream.next_point(box);
    const Vec y = stream.next_point(box);
    const double t = stream.next_range(0.0, 1.0);
    const int i = stream.next_index(model.n_regimes);

    const Vec d = model.neutral(y, i);
    Vec z(x.size());
    for (std::size_t c = 0; c < x.size(); ++c) z[c] = x[c] - d[c];

    const double lv = evaluate_LV(model, gen, quad, x, y, t, i);
    const double bound = -lambda * norm_sq(z) - alpha1 * norm_sq(x) + alpha2 * norm_sq(y);
    const double margin = bound - lv;
    if (first || margin < report.sampled.worst_margin) {
      first = false;
      report.sampled.worst_margin = margin;
      report.sampled.arg_x = x;
      report.sampled.arg_y = y;
      report.sampled.arg_t = t;
      report.sampled.arg_regime = i;
    }
  }
  report.pass = report.gate_alpha_pass && report.gate_beta_pass &&
                report.sampled.worst_margin >= 0.0;
  return report;
}

AlphaEstimate check_as_noise_bound(const ModelSpec& model, const GeneratorMatrix& gen,
                                    const LyapunovCallbacks& lyap, const SampleBox& box,
                                    int n_samples, rng::Stream& stream) {
  AlphaEstimate estimate;
  for (int k = 0; k < n_samples; ++k) {
    const Vec x = stream.next_point(box);
    const Vec y = stream.next_point(box);
    const double t = stream.next_range(0.0, 1.0);
    const int i = stream.next_index(model.n_regimes);

    const Vec d = model.neutral(y, i);
    Vec z(x.size());
    for (std::size_t c = 0; c < x.size(); ++c) z[c] = x[c] - d[c];

    const Matrix g = model.diffusion(x, y, t, i);
    const Vec projected = g.apply_transposed(lyap.V_x(z, t, i));
    double numerator = norm_sq(projected);
    const double v_here = lyap.V(z, t, i);
    for (int j = 1; j <= gen.n_states(); ++j) {
      if (j == i) continue;
      const double dv = lyap.V(z, t, j) - v_here;
      numerator += gen.rate(i, j) * dv * dv;
    }

    if (v_here == 0.0) {
      if (numerator > 0.0) ++estimate.n_unverifiable;
      continue;
    }
    const double ratio = numerator / (v_here * v_here);
    if (ratio > estimate.alpha) {
      estimate.alpha = ratio;
      estimate.arg_x = x;
      estimate.arg_y = y;
      estimate.arg_regime = i;
    }
  }
  return estimate;
}

EnvelopeEstimate check_as_envelope(const ModelSpec& model, const GeneratorMatrix& gen,
                                   const LyapunovCallbacks& lyap, double p,
                                   const SampleBox& box, int n_samples, rng::Stream& stream) {
  require(p >= 1.0, errc::invalid_argument, "p must be >= 1");

  EnvelopeEstimate estimate;
  estimate.c1_low = std::numeric_limits<double>::infinity();
  estimate.c2_high = 0.0;
  bool have_c0 = false;
  for (int k = 0; k < n_samples; ++k) {
    const Vec w = stream.next_point(box);
    const double t = stream.next_range(0.0, 1.0);
    const int i = stream.next_index(model.n_regimes);

    const double wp = std::pow(norm(w), p);
    if (wp > 0.0) {
      const double ratio = lyap.V(w, t, i) / wp;
      estimate.c1_low = std::min(estimate.c1_low, ratio);
      estimate.c2_high = std::max(estimate.c2_high, ratio);
    }

    const Vec y = stream.next_point(box);
    const Vec d = model.neutral(y, i);
    Vec z(w.size());
    for (std::size_t c = 0; c < w.size(); ++c) z[c] = w[c] - d[c];
    const double v_z = lyap.V(z, t, i);
    const double lv = evaluate_LV(model, gen, lyap, w, y, t, i);
    if (v_z == 0.0) {
      if (lv > 0.0) ++estimate.n_unverifiable;
      continue;
    }
    const double c0 = lv / v_z;
    if (!have_c0 || c0 > estimate.c0) {
      estimate.c0 = c0;
      have_c0 = true;
    }
  }
  return estimate;
}

}  // namespace nsdde
