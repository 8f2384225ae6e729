#include "nsdde/model.hpp"

#include <cmath>
#include <utility>

#include "nsdde/error.hpp"

namespace nsdde {

namespace {

const double kSpotCheckTimes[] = {0.0, 0.37, 1.5, 10.0};

void require_near_zero(double v, const std::string& what) {
  require(std::fabs(v) <= 1e-14, errc::invalid_argument, what + " does not vanish at the origin");
}

}  // namespace

void validate_model(const ModelSpec& model) {
  require(model.dim_x >= 1 && model.dim_w >= 1 && model.n_regimes >= 1, errc::invalid_argument,
          "model dimensions must be positive");
  require(model.tau > 0.0, errc::invalid_argument, "delay tau must be positive");
  require(model.neutral && model.drift && model.diffusion, errc::invalid_argument,
          "model callbacks D, f, g must all be set");
  require(model.beta >= 0.0 && model.beta < 1.0, errc::invalid_argument,
          "declared beta must lie in [0,1)");
  require(model.one_sided_L > 0.0, errc::invalid_argument, "declared L must be positive");
  if (model.dissipativity) {
    require(model.dissipativity->c1 > model.dissipativity->c2 && model.dissipativity->c2 > 0.0,
            errc::invalid_argument, "dissipativity constants need C1 > C2 > 0");
  }

  const Vec zero(static_cast<std::size_t>(model.dim_x), 0.0);
  for (int i = 1; i <= model.n_regimes; ++i) {
    const Vec d0 = model.neutral(zero, i);
    require(d0.size() == zero.size(), errc::invalid_argument, "D has wrong dimension");
    require_near_zero(norm(d0), "D(0,i)");
    for (double t : kSpotCheckTimes) {
      const Vec f0 = model.drift(zero, zero, t, i);
      require(f0.size() == zero.size(), errc::invalid_argument, "f has wrong dimension");
      require_near_zero(norm(f0), "f(0,0,t,i)");
      const Matrix g0 = model.diffusion(zero, zero, t, i);
      require(g0.rows() == static_cast<std::size_t>(model.dim_x) &&
                  g0.cols() == static_cast<std::size_t>(model.dim_w),
              errc::invalid_argument, "g has wrong shape");
      require_near_zero(std::sqrt(g0.hs_norm_sq()), "g(0,0,t,i)");
    }
  }
}

InitialSegment InitialSegment::constant(Vec v) {
  InitialSegment seg;
  seg.dim = static_cast<int>(v.size());
  seg.value = [v = std::move(v)](double) { return v; };
  return seg;
}

LyapunovCallbacks LyapunovCallbacks::quadratic() {
  LyapunovCallbacks lyap;
  lyap.V = [](const Vec& z, double, int) { return norm_sq(z); };
  lyap.V_t = [](const Vec&, double, int) { return 0.0; };
  lyap.V_x = [](const Vec& z, double, int) {
    Vec grad(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) grad[k] = 2.0 * z[k];
    return grad;
  };
  lyap.V_xx = [](const Vec& z, double, int) {
    Matrix h(z.size(), z.size());
    for (std::size_t k = 0; k < z.size(); ++k) h(k, k) = 2.0;
    return h;
  };
  return lyap;
}

void validate_lyapunov(const LyapunovCallbacks& lyap, int dim, int n_regimes,
                       rng::Stream& stream) {
  require(lyap.V && lyap.V_t && lyap.V_x && lyap.V_xx, errc::invalid_argument,
          "Lyapunov callbacks V, V_t, V_x, V_xx must all be set");
  const SampleBox box = SampleBox::cube(dim, 3.0);
  for (int k = 0; k < 32; ++k) {
    const Vec z = stream.next_point(box);
    const double t = stream.next_range(0.0, 2.0);
    const int i = stream.next_index(n_regimes);
    require(lyap.V(z, t, i) >= 0.0, errc::invalid_argument, "V must be nonnegative");
    const Matrix h = lyap.V_xx(z, t, i);
    for (std::size_t r = 0; r < h.rows(); ++r)
      for (std::size_t c = r + 1; c < h.cols(); ++c)
        require(std::fabs(h(r, c) - h(c, r)) <= 1e-10, errc::invalid_argument,
                "V_xx must be symmetric within 1e-10");
  }
}

double evaluate_LV(const ModelSpec& model, const GeneratorMatrix& gen,
                   const LyapunovCallbacks& lyap, const Vec& x, const Vec& y, double t,
                   int regime) {
  require(regime >= 1 && regime <= gen.n_states(), errc::invalid_argument,
          "regime outside 1..N");

  const Vec d = model.neutral(y, regime);
  Vec z(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) z[k] = x[k] - d[k];

  const Vec f = model.drift(x, y, t, regime);
  const Matrix g = model.diffusion(x, y, t, regime);
  const Matrix h = lyap.V_xx(z, t, regime);

  double lv = lyap.V_t(z, t, regime) + dot(lyap.V_x(z, t, regime), f);

  // 1/2 trace(g^T H g) column by column
  Vec column(g.rows());
  for (std::size_t c = 0; c < g.cols(); ++c) {
    for (std::size_t r = 0; r < g.rows(); ++r) column[r] = g(r, c);
    lv += 0.5 * dot(column, h.apply(column));
  }

  for (int j = 1; j <= gen.n_states(); ++j) lv += gen.rate(regime, j) * lyap.V(z, t, j);

  if (!std::isfinite(lv)) {
    fail(errc::non_finite_evaluation, "LV is not finite at the requested point");
  }
  return lv;
}

ModelSpec builtin_sine_neutral(double tau) {
  ModelSpec model;
  model.name = "sine_neutral";
  model.dim_x = 1;
  model.dim_w = 1;
  model.n_regimes = 2;
  model.tau = tau;
  model.neutral = [](const Vec& y, int i) { return Vec{std::sin(y[0]) / (6.0 * i)}; };
  model.drift = [](const Vec& x, const Vec& y, double, int i) {
    const double x1 = x[0];
    return Vec{-(6.0 * x1 + x1 * x1 * x1 * x1 * x1 + 0.5 * std::sin(y[0])) * i};
  };
  model.diffusion = [](const Vec& x, const Vec& y, double, int i) {
    Matrix g(1, 1);
    const double x3 = x[0] * x[0] * x[0];
    g(0, 0) = 2.0 * x3 * y[0] / ((1.0 + y[0] * y[0]) * i);
    return g;
  };
  model.drift_jacobian = [](const Vec& x, const Vec&, double, int i) {
    Matrix j(1, 1);
    const double x4 = x[0] * x[0] * x[0] * x[0];
    j(0, 0) = -(6.0 + 5.0 * x4) * i;
    return j;
  };
  model.beta = 1.0 / 6.0;
  model.one_sided_L = 1.0;  // f is monotone decreasing in x, any positive L works
  model.dissipativity = DissipativityConstants{10.0, 25.0 / 72.0};
  return model;
}

GeneratorMatrix sine_neutral_generator() {
  return validate_generator(Matrix{{-1.0, 1.0}, {1.0, -1.0}});
}

ModelSpec builtin_rotation2d(double r_exponent, std::function<Vec(const Vec&, int)> neutral,
                             double beta, int n_regimes, double tau) {
  require(r_exponent > 0.0, errc::invalid_argument, "r_exponent must be positive");

  ModelSpec model;
  model.name = "rotation2d";
  model.dim_x = 2;
  model.dim_w = 1;
  model.n_regimes = n_regimes;
  model.tau = tau;
  if (neutral) {
    model.neutral = std::move(neutral);
  } else {
    model.neutral = [beta](const Vec& y, int) { return Vec{beta * y[0], beta * y[1]}; };
  }

  const auto displaced = [D = model.neutral](const Vec& x, const Vec& y, int i) {
    const Vec d = D(y, i);
    return Vec{x[0] - d[0], x[1] - d[1]};
  };
  model.drift = [displaced, r_exponent](const Vec& x, const Vec& y, double, int i) {
    const Vec z = displaced(x, y, i);
    const double zz = norm_sq(z);
    const double gain = std::pow(zz, r_exponent) + 1.0;  // |z|^{2r} + 1
    return Vec{-gain * z[0], -gain * z[1]};
  };
  model.diffusion = [displaced, r_exponent](const Vec& x, const Vec& y, double, int i) {
    const Vec z = displaced(x, y, i);
    const double r = std::pow(norm_sq(z), 0.5 * r_exponent);  // |z|^r
    Matrix g(2, 1);
    g(0, 0) = -r * z[1];
    g(1, 0) = r * z[0];
    return g;
  };
  model.beta = beta;
  model.one_sided_L = 1.0;  // drift is monotone decreasing in x
  return model;
}

ModelSpec builtin_linear(double a, double b, double sigma_x, double sigma_y,
                         double neutral_coef, double tau) {
  ModelSpec model;
  model.name = "linear";
  model.dim_x = 1;
  model.dim_w = 1;
  model.n_regimes = 1;
  model.tau = tau;
  model.neutral = [neutral_coef](const Vec& y, int) { return Vec{neutral_coef * y[0]}; };
  model.drift = [a, b](const Vec& x, const Vec& y, double, int) {
    return Vec{-a * x[0] + b * y[0]};
  };
  model.diffusion = [sigma_x, sigma_y](const Vec& x, const Vec& y, double, int) {
    Matrix g(1, 1);
    g(0, 0) = sigma_x * x[0] + sigma_y * y[0];
    return g;
  };
  model.drift_jacobian = [a](const Vec&, const Vec&, double, int) {
    Matrix j(1, 1);
    j(0, 0) = -a;
    return j;
  };
  model.beta = std::fabs(neutral_coef);
  model.one_sided_L = std::max(1.0, -a);
  return model;
}

double estimate_beta(const ModelSpec& model, const SampleBox& box, int n_samples,
                     rng::Stream& stream) {
  require(n_samples >= 1, errc::invalid_argument, "need at least one sample");
  double best = 0.0;
  for (int k = 0; k < n_samples; ++k) {
    const Vec x = stream.next_point(box);
    Vec y;
    if (k % 2 == 0) {
      y = stream.next_point(box);
    } else {
      // nearly coincident pair, probes the local slope
      y = x;
      for (std::size_t c = 0; c < y.size(); ++c) {
        const double width = box.hi[c] - box.lo[c];
        y[c] += 1e-3 * width * (stream.next_unit() - 0.5);
      }
    }
    Vec diff(x.size());
    for (std::size_t c = 0; c < x.size(); ++c) diff[c] = x[c] - y[c];
    const double gap = norm(diff);
    if (gap == 0.0) continue;
    for (int i = 1; i <= model.n_regimes; ++i) {
      const Vec dx = model.neutral(x, i);
      const Vec dy = model.neutral(y, i);
      Vec dd(dx.size());
      for (std::size_t c = 0; c < dx.size(); ++c) dd[c] = dx[c] - dy[c];
      best = std::max(best, norm(dd) / gap);
    }
  }
  return best;
}

MarginReport check_dissipativity(const ModelSpec& model, double c1, double c2,
                                 const SampleBox& box, int n_samples, rng::Stream& stream) {
  require(c1 > c2 && c2 > 0.0, errc::invalid_argument, "need C1 > C2 > 0");
  require(n_samples >= 1, errc::invalid_argument, "need at least one sample");

  MarginReport report;
  report.n_samples = n_samples;
  bool first = true;
  for (int k = 0; k < n_samples; ++k) {
    const Vec x = stream.next_point(box);
    const Vec y = stream.next_point(box);
    const double t = stream.next_range(0.0, 1.0);
    const int i = stream.next_index(model.n_regimes);

    const Vec d = model.neutral(y, i);
    Vec z(x.size());
    for (std::size_t c = 0; c < x.size(); ++c) z[c] = x[c] - d[c];
    const double lhs =
        2.0 * dot(z, model.drift(x, y, t, i)) + model.diffusion(x, y, t, i).hs_norm_sq();
    const double rhs = -c1 * norm_sq(x) + c2 * norm_sq(y);
    const double margin = rhs - lhs;
    if (first || margin < report.worst_margin) {
      first = false;
      report.worst_margin = margin;
      report.arg_x = x;
      report.arg_y = y;
      report.arg_t = t;
      report.arg_regime = i;
    }
  }
  return report;
}

}  // namespace nsdde
