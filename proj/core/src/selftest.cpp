#include "nsdde/selftest.hpp"

#include <cmath>
#include <sstream>

#include "nsdde/ensemble.hpp"
#include "nsdde/error.hpp"
#include "nsdde/model.hpp"
#include "nsdde/oracle.hpp"
#include "nsdde/rng.hpp"
#include "nsdde/stability.hpp"
#include "nsdde/theta_em.hpp"

namespace nsdde {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

struct BuiltinCase {
  ModelSpec model;
  GeneratorMatrix gen;
};

std::vector<BuiltinCase> builtin_cases() {
  std::vector<BuiltinCase> cases;
  cases.push_back({builtin_sine_neutral(), sine_neutral_generator()});
  cases.push_back({builtin_rotation2d(1.0, nullptr, 0.25, 2),
                   validate_generator(Matrix{{-2.0, 2.0}, {1.0, -1.0}})});
  cases.push_back({builtin_linear(1.0, 0.2, 0.3, 0.1, 0.4),
                   validate_generator(Matrix{{0.0}})});
  return cases;
}

// Inequality: |x - D(y,i)|^p <= (1+beta)^{p-1} (|x|^p + beta |y|^p)
SuiteResult inequality_neutral_bound(const SelfTestOptions& options) {
  SuiteResult result{"inequality_neutral_bound", true, ""};
  auto stream = rng::seeded(options.seed ^ 0x11ull);
  int violations = 0;
  int total = 0;
  double worst = 0.0;
  for (const BuiltinCase& bc : builtin_cases()) {
    const SampleBox box = SampleBox::cube(bc.model.dim_x, 4.0);
    for (int k = 0; k < options.property_tuples; ++k) {
      const Vec x = stream.next_point(box);
      const Vec y = stream.next_point(box);
      const double p = stream.next_range(1.0, 6.0);
      const int i = stream.next_index(bc.model.n_regimes);
      const Vec d = bc.model.neutral(y, i);
      Vec z(x.size());
      for (std::size_t c = 0; c < x.size(); ++c) z[c] = x[c] - d[c];
      const double beta = bc.model.beta;
      const double lhs = std::pow(norm(z), p);
      const double rhs = std::pow(1.0 + beta, p - 1.0) *
                         (std::pow(norm(x), p) + beta * std::pow(norm(y), p));
      const double slack = lhs - rhs;
      worst = std::max(worst, slack);
      if (slack > 1e-12 * std::max(1.0, rhs)) ++violations;
      ++total;
    }
  }
  result.pass = violations == 0;
  result.detail = std::to_string(total) + " tuples, " + std::to_string(violations) +
                  " violations, worst slack " + fmt(worst);
  return result;
}

// Inequality: (a+b)^p <= (1+c)^{p-1} (a^p + c^{1-p} b^p) for a,b > 0, p >= 1, c > 0
SuiteResult inequality_power_split(const SelfTestOptions& options) {
  SuiteResult result{"inequality_power_split", true, ""};
  auto stream = rng::seeded(options.seed ^ 0x22ull);
  int violations = 0;
  double worst = 0.0;
  for (int k = 0; k < options.property_tuples; ++k) {
    const double a = stream.next_range(1e-8, 10.0);
    const double b = stream.next_range(1e-8, 10.0);
    const double p = stream.next_range(1.0, 8.0);
    const double c = stream.next_range(1e-6, 10.0);
    const double lhs = std::pow(a + b, p);
    const double rhs =
        std::pow(1.0 + c, p - 1.0) * (std::pow(a, p) + std::pow(c, 1.0 - p) * std::pow(b, p));
    const double slack = lhs - rhs;
    worst = std::max(worst, slack);
    if (slack > 1e-12 * std::max(1.0, rhs)) ++violations;
  }
  result.pass = violations == 0;
  result.detail = std::to_string(options.property_tuples) + " tuples, " +
                  std::to_string(violations) + " violations, worst slack " + fmt(worst);
  return result;
}

// General LV evaluator against the quadratic closed form 2<z,f> + |g|^2
SuiteResult lv_quadratic_form(const SelfTestOptions& options) {
  SuiteResult result{"lv_quadratic_form", true, ""};
  auto stream = rng::seeded(options.seed ^ 0x33ull);
  const LyapunovCallbacks quad = LyapunovCallbacks::quadratic();
  double worst = 0.0;
  int violations = 0;
  for (const BuiltinCase& bc : builtin_cases()) {
    const SampleBox box = SampleBox::cube(bc.model.dim_x, 4.0);
    for (int k = 0; k < 10000; ++k) {
      const Vec x = stream.next_point(box);
      const Vec y = stream.next_point(box);
      const double t = stream.next_range(0.0, 2.0);
      const int i = stream.next_index(bc.model.n_regimes);
      const Vec d = bc.model.neutral(y, i);
      Vec z(x.size());
      for (std::size_t c = 0; c < x.size(); ++c) z[c] = x[c] - d[c];
      const double drift_part = 2.0 * dot(z, bc.model.drift(x, y, t, i));
      const double noise_part = bc.model.diffusion(x, y, t, i).hs_norm_sq();
      const double closed = drift_part + noise_part;
      const double general = evaluate_LV(bc.model, bc.gen, quad, x, y, t, i);
      const double scale = std::max(1.0, std::fabs(drift_part) + noise_part);
      const double diff = std::fabs(general - closed) / scale;
      worst = std::max(worst, diff);
      if (diff > 1e-12) ++violations;
    }
  }
  result.pass = violations == 0;
  result.detail = "30000 points, worst relative gap " + fmt(worst);
  return result;
}

// Newton (implicit_solve) against bisection on random scalar monotone drifts
SuiteResult solver_cross_check(const SelfTestOptions& options) {
  SuiteResult result{"solver_cross_check", true, ""};
  auto stream = rng::seeded(options.seed ^ 0x44ull);
  double worst = 0.0;
  int failures = 0;
  for (int k = 0; k < options.solver_instances; ++k) {
    const double a = stream.next_range(0.1, 4.0);
    const double b = stream.next_range(0.0, 2.0);
    const double c = stream.next_range(0.0, 1.0);
    const double d = stream.next_range(-a, a);  // keeps f' <= 0

    ModelSpec model;
    model.name = "probe";
    model.dim_x = 1;
    model.dim_w = 1;
    model.n_regimes = 1;
    model.neutral = [](const Vec&, int) { return Vec{0.0}; };
    model.drift = [a, b, c, d](const Vec& x, const Vec&, double, int) {
      const double v = x[0];
      return Vec{-(a * v + b * v * v * v + c * v * v * v * v * v + d * std::sin(v))};
    };
    model.diffusion = [](const Vec&, const Vec&, double, int) { return Matrix(1, 1); };
    model.one_sided_L = 0.5;

    const double theta_delta = stream.next_range(0.01, 1.0);
    const Vec rhs{stream.next_range(-3.0, 3.0)};
    const Vec y{0.0};

    const Vec solved = implicit_solve(model, y, 0.0, 1, rhs, theta_delta, 1e-13);

    const auto residual = [&](double x) {
      return x - theta_delta * model.drift(Vec{x}, y, 0.0, 1)[0] - rhs[0];
    };
    double lo = -1.0;
    double hi = 1.0;
    while (residual(lo) > 0.0) lo *= 2.0;
    while (residual(hi) < 0.0) hi *= 2.0;
    const double bisected = oracle::scalar_bisection_solve(residual, lo, hi, 1e-13);

    const double gap = std::fabs(solved[0] - bisected);
    worst = std::max(worst, gap);
    if (gap > 1e-9) ++failures;
  }
  result.pass = failures == 0;
  result.detail = std::to_string(options.solver_instances) +
                  " instances, largest disagreement " + fmt(worst);
  return result;
}

// Deterministic linear problem against the closed-form recursion
SuiteResult linear_recursion(const SelfTestOptions& options) {
  SuiteResult result{"linear_recursion", true, ""};
  double worst = 0.0;
  int violations = 0;
  const GeneratorMatrix single = validate_generator(Matrix{{0.0}});
  for (double theta : {0.0, 0.6, 1.0}) {
    const ModelSpec model = builtin_linear(1.0);
    const SchemeConfig cfg = SchemeConfig::create(1.0, 10, theta, 100.0, model.one_sided_L);
    const std::vector<int> regimes(static_cast<std::size_t>(cfg.horizon_steps) + 1, 1);
    auto stream = rng::path_stream(options.seed, 0, rng::kBrownianStream);
    const PathRecord record =
        simulate_path(model, cfg, InitialSegment::constant(Vec{1.0}), regimes, stream);

    const double ratio = oracle::linear_ratio({1.0, theta, cfg.delta});
    for (int k = 0; k <= 1000; ++k) {
      const double expected = std::pow(ratio, k);
      const double got = record.states[record.index_of_step(k)][0];
      const double diff = std::fabs(got - expected) / std::max(1.0, std::fabs(expected));
      worst = std::max(worst, diff);
      if (diff > 1e-12) ++violations;
    }
  }
  result.pass = violations == 0;
  result.detail = "theta in {0, 0.6, 1}, k <= 1000, worst gap " + fmt(worst);
  return result;
}

SuiteResult marginal_oracle(const SelfTestOptions&) {
  SuiteResult result{"ctmc_marginal_oracle", true, ""};
  const GeneratorMatrix gen = validate_generator(Matrix{{-1.0, 1.0}, {2.0, -2.0}});

  double worst = 0.0;
  for (double t : {0.0, 0.1, 1.0, 5.0, 50.0}) {
    const std::vector<double> row = oracle::ctmc_marginal(gen, 1, t);
    double sum = 0.0;
    for (double v : row) {
      sum += v;
      if (v < 0.0) result.pass = false;
    }
    worst = std::max(worst, std::fabs(sum - 1.0));
  }
  if (worst > 1e-12) result.pass = false;

  // long-run marginal of the 2-state chain is (2/3, 1/3)
  const std::vector<double> stationary = oracle::ctmc_marginal(gen, 1, 50.0);
  const double gap = std::max(std::fabs(stationary[0] - 2.0 / 3.0),
                              std::fabs(stationary[1] - 1.0 / 3.0));
  if (gap > 1e-10) result.pass = false;

  const std::vector<double> start = oracle::ctmc_marginal(gen, 1, 0.0);
  if (std::fabs(start[0] - 1.0) > 0.0 || std::fabs(start[1]) > 0.0) result.pass = false;

  result.detail = "row-sum gap " + fmt(worst) + ", stationary gap " + fmt(gap);
  return result;
}

// Certificate threshold against an independently written evaluation
SuiteResult certificate_arithmetic(const SelfTestOptions& options) {
  SuiteResult result{"certificate_arithmetic", true, ""};
  const double beta = 1.0 / 6.0;
  const double c2 = 25.0 / 72.0;

  const double library = certificate_threshold(beta, c2) + options.threshold_perturbation;

  // same quantity through (1+sqrt(2))^2 instead of 3+2 sqrt(2)
  const double root = 1.0 + std::sqrt(2.0);
  const double critical_const = root * root;
  const double independent = critical_const * c2 / (1.0 - critical_const * beta * beta);

  const double gap = std::fabs(library - independent);
  result.pass = gap <= 1e-9;
  result.detail = "library " + fmt(library) + " vs independent " + fmt(independent);
  return result;
}

}  // namespace

std::vector<SuiteResult> run_selftest(const SelfTestOptions& options) {
  std::vector<SuiteResult> results;
  results.push_back(inequality_neutral_bound(options));
  results.push_back(inequality_power_split(options));
  results.push_back(lv_quadratic_form(options));
  results.push_back(solver_cross_check(options));
  results.push_back(linear_recursion(options));
  results.push_back(marginal_oracle(options));
  results.push_back(certificate_arithmetic(options));
  return results;
}

}  // namespace nsdde
