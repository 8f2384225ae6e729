// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are fixed here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "nsdde/commands.hpp"
#include "nsdde/config.hpp"
#include "nsdde/ensemble.hpp"
#include "nsdde/io.hpp"
#include "nsdde/oracle.hpp"
#include "nsdde/selftest.hpp"
#include "nsdde/stability.hpp"

using namespace nsdde;

namespace {

const char* kBenchmarkConfig = R"([model]
name = sine_neutral
tau = 1
xi = 1

[chain]
rates = [[-1, 1], [1, -1]]
i0 = 1

[scheme]
theta = 1
m_steps = 100
horizon = 8

[ensemble]
n_paths = 2000
p_moment = 2
seed = 42
window = [2, 8]
)";

struct Harness {
  int failures = 0;

  void report(int id, bool pass, const std::string& description, const std::string& detail) {
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << description
              << " (" << detail << ")\n";
    if (!pass) ++failures;
  }
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main() {
  Harness harness;

  // ---- criteria 1 and 2: benchmark ensemble, moment and pathwise decay ----
  const RunConfig run_cfg = parse_config(kBenchmarkConfig);
  const ModelSpec model = make_model(run_cfg);
  const GeneratorMatrix gen = make_generator(run_cfg);
  const SchemeConfig scheme = make_scheme(run_cfg, model);
  const InitialSegment init = make_initial_segment(run_cfg, model);
  const EnsembleConfig ens = make_ensemble(run_cfg);

  const auto t_start = std::chrono::steady_clock::now();
  const EnsembleResult result = run_ensemble(model, scheme, ens, gen, run_cfg.i0, init, 0);
  const double run_seconds = elapsed_seconds(t_start);

  {
    const ExponentEstimate fit = fit_moment_exponent(result.curve, 2.0, 8.0);
    const bool pass = fit.slope <= -0.8 && result.curve.n_blowups == 0 && run_seconds < 120.0;
    harness.report(1, pass, "mean-square decay of the benchmark ensemble",
                   "slope " + fmt(fit.slope) + " <= -0.8, blowups " +
                       std::to_string(result.curve.n_blowups) + ", " + fmt(run_seconds, 3) +
                       " s");
  }

  {
    const PathwiseSummary pathwise = pathwise_exponents(result.paths, 2.0, 8.0);
    const bool pass = pathwise.mean <= -0.4 && pathwise.quantile95 <= -0.3 &&
                      static_cast<int>(pathwise.exponents.size()) == ens.n_paths;
    harness.report(2, pass, "pathwise decay of the benchmark ensemble",
                   "mean " + fmt(pathwise.mean) + " <= -0.4, q95 " +
                       fmt(pathwise.quantile95) + " <= -0.3");
  }

  // ---- criterion 3: scheme certificate and its flips ----
  {
    const StabilityCertificate cert = certify_scheme(model, scheme);
    const bool threshold_ok = std::fabs(cert.threshold - 2.4147) <= 1e-3;

    const SchemeConfig half = SchemeConfig::create_unchecked(1.0, 100, 0.5, 8.0);
    const bool half_fails = !certify_scheme(model, half).verdict;

    ModelSpec loose = model;
    loose.beta = 0.5;
    const bool loose_fails = !certify_scheme(loose, scheme).verdict;

    const bool pass = cert.verdict && threshold_ok && half_fails && loose_fails;
    harness.report(3, pass, "certificate threshold and verdict flips",
                   "threshold " + fmt(cert.threshold, 6) + " within 1e-3 of 2.4147, pass; "
                       "theta=0.5 fails: " + std::string(half_fails ? "yes" : "no") +
                       ", beta=0.5 fails: " + std::string(loose_fails ? "yes" : "no"));
  }

  // ---- criteria 4 and 5a: property and oracle suites ----
  const auto t_selftest = std::chrono::steady_clock::now();
  const std::vector<SuiteResult> suites = run_selftest({});
  const double selftest_seconds = elapsed_seconds(t_selftest);

  const auto suite_passed = [&suites](const std::string& name) {
    for (const SuiteResult& suite : suites) {
      if (suite.name == name) return suite.pass;
    }
    return false;
  };

  {
    const bool pass = suite_passed("inequality_neutral_bound") &&
                      suite_passed("inequality_power_split") && selftest_seconds < 5.0;
    harness.report(4, pass, "inequality property suites at 1e5 tuples",
                   std::string("zero violations: ") + (pass ? "yes" : "no") + ", " +
                       fmt(selftest_seconds, 3) + " s < 5 s");
  }

  {
    // part a: Newton vs bisection over 1e3 random scalar instances (<= 1e-9)
    const bool solver_ok = suite_passed("solver_cross_check");

    // part b: recursion residual along a 1e4-step benchmark run
    const double tol = 1e-12;
    const SchemeConfig long_scheme =
        SchemeConfig::create(1.0, 100, 1.0, 100.0, model.one_sided_L);
    auto chain_stream = rng::path_stream(42, 0, rng::kChainStream);
    auto sim_stream = rng::path_stream(42, 0, rng::kBrownianStream);
    auto replay_stream = rng::path_stream(42, 0, rng::kBrownianStream);
    const double chain_horizon = long_scheme.horizon_steps * long_scheme.delta;
    const RegimePath chain = sample_regime_path(gen, 1, chain_horizon, chain_stream);
    const std::vector<int> regimes =
        regime_at_grid(chain, long_scheme.delta, long_scheme.horizon_steps);
    const PathRecord rec = simulate_path(model, long_scheme, init, regimes, sim_stream, tol);

    bool residual_ok = !rec.blowup_at.has_value();
    double worst = 0.0;
    const auto f_transform = [&](int k) {
      const Vec& x = rec.states[rec.index_of_step(k)];
      const Vec& x_del = rec.states[rec.index_of_step(k - long_scheme.m_steps)];
      const int regime = regimes[static_cast<std::size_t>(k)];
      const double d = model.neutral(x_del, regime)[0];
      const double f = model.drift(x, x_del, long_scheme.time_at(k), regime)[0];
      return x[0] - d - long_scheme.theta * long_scheme.delta * f;
    };
    for (int k = 0; residual_ok && k < long_scheme.horizon_steps; ++k) {
      const Vec dB = replay_stream.next_gaussian_increment(model.dim_w, long_scheme.delta);
      const Vec& x = rec.states[rec.index_of_step(k)];
      const Vec& x_del = rec.states[rec.index_of_step(k - long_scheme.m_steps)];
      const int regime = regimes[static_cast<std::size_t>(k)];
      const double f_k = model.drift(x, x_del, long_scheme.time_at(k), regime)[0];
      const double g_k = model.diffusion(x, x_del, long_scheme.time_at(k), regime)(0, 0);
      const double increment =
          f_transform(k + 1) - f_transform(k) - f_k * long_scheme.delta - g_k * dB[0];
      const double allowed = 10.0 * tol * (1.0 + norm(rec.states[rec.index_of_step(k + 1)]));
      worst = std::max(worst, std::fabs(increment) - allowed);
      if (std::fabs(increment) > allowed) residual_ok = false;
    }

    harness.report(5, solver_ok && residual_ok,
                   "implicit-solver oracle equivalence and recursion residual",
                   std::string("1e3 Newton-vs-bisection instances <= 1e-9: ") +
                       (solver_ok ? "yes" : "no") + "; 1e4-step residual bound: " +
                       (residual_ok ? "holds" : "violated"));
  }

  // ---- criterion 6: linear closed-form recursion ----
  {
    bool pass = true;
    double worst = 0.0;
    for (double theta : {0.0, 0.6, 1.0}) {
      const ModelSpec linear = builtin_linear(1.0);
      const SchemeConfig cfg = SchemeConfig::create(1.0, 10, theta, 100.0, linear.one_sided_L);
      const std::vector<int> regimes(static_cast<std::size_t>(cfg.horizon_steps) + 1, 1);
      auto stream = rng::path_stream(6, 0, rng::kBrownianStream);
      const PathRecord path =
          simulate_path(linear, cfg, InitialSegment::constant(Vec{1.0}), regimes, stream);
      const double ratio = oracle::linear_ratio({1.0, theta, cfg.delta});
      for (int k = 0; k <= 1000; ++k) {
        const double expected = std::pow(ratio, k);
        const double gap = std::fabs(path.states[path.index_of_step(k)][0] - expected) /
                           std::max(1.0, std::fabs(expected));
        worst = std::max(worst, gap);
        if (gap > 1e-12) pass = false;
      }
    }
    harness.report(6, pass, "deterministic path matches the closed-form recursion",
                   "theta in {0, 0.6, 1}, k <= 1000, worst gap " + fmt(worst, 3) +
                       " <= 1e-12");
  }

  // ---- criterion 7: chain law checks ----
  {
    const GeneratorMatrix law_gen = validate_generator(Matrix{{-1.0, 1.0}, {2.0, -2.0}});

    bool one_step_ok = true;
    const double delta = 1e-3;
    const int n_trials = 1000000;
    for (int start = 1; start <= 2; ++start) {
      std::vector<int> counts(3, 0);
      for (int trial = 0; trial < n_trials; ++trial) {
        auto stream = rng::path_stream(7000 + start, static_cast<std::uint64_t>(trial),
                                       rng::kChainStream);
        const RegimePath path = sample_regime_path(law_gen, start, delta, stream);
        ++counts[static_cast<std::size_t>(path.state_at(delta))];
      }
      for (int j = 1; j <= 2; ++j) {
        if (j == start) continue;
        const double freq = static_cast<double>(counts[static_cast<std::size_t>(j)]) / n_trials;
        const double target = law_gen.rate(start, j) * delta;
        const double tolerance = 3.0 * std::sqrt(target / n_trials) + 10.0 * delta * delta;
        if (std::fabs(freq - target) > tolerance) one_step_ok = false;
      }
    }

    const int n_paths = 100000;
    int hits = 0;
    for (int trial = 0; trial < n_paths; ++trial) {
      auto stream =
          rng::path_stream(7100, static_cast<std::uint64_t>(trial), rng::kChainStream);
      const RegimePath path = sample_regime_path(law_gen, 1, 1.0, stream);
      if (path.state_at(1.0) == 1) ++hits;
    }
    const double expected = oracle::ctmc_marginal(law_gen, 1, 1.0)[0];
    const double freq = static_cast<double>(hits) / n_paths;
    const double sigma = std::sqrt(expected * (1.0 - expected) / n_paths);
    const bool marginal_ok = std::fabs(freq - expected) <= 3.0 * sigma;

    harness.report(7, one_step_ok && marginal_ok, "chain transition law checks",
                   "one-step frequencies within 3 sigma at delta=1e-3: " +
                       std::string(one_step_ok ? "yes" : "no") + "; marginal at t=1: " +
                       fmt(freq, 6) + " vs " + fmt(expected, 6) + " within 3 sigma: " +
                       (marginal_ok ? "yes" : "no"));
  }

  // ---- criterion 8: LV evaluator against the closed forms ----
  {
    const LyapunovCallbacks quad = LyapunovCallbacks::quadratic();
    auto stream = rng::seeded(8);
    bool pass = true;
    double worst = 0.0;

    for (int k = 0; k < 10000; ++k) {
      const SampleBox box = SampleBox::cube(1, 4.0);
      const Vec x = stream.next_point(box);
      const Vec y = stream.next_point(box);
      const double t = stream.next_range(0.0, 2.0);
      const int i = stream.next_index(model.n_regimes);
      const Vec d = model.neutral(y, i);
      const double z = x[0] - d[0];
      const double closed =
          2.0 * z * model.drift(x, y, t, i)[0] + model.diffusion(x, y, t, i).hs_norm_sq();
      const double general = evaluate_LV(model, gen, quad, x, y, t, i);
      const double scale =
          std::max(1.0, std::fabs(2.0 * z * model.drift(x, y, t, i)[0]) +
                            model.diffusion(x, y, t, i).hs_norm_sq());
      const double gap = std::fabs(general - closed) / scale;
      worst = std::max(worst, gap);
      if (gap > 1e-12) pass = false;
    }

    // planar model: LV = -|z|^{2r+2} - 2|z|^2 with r = 1
    const ModelSpec planar = builtin_rotation2d(1.0, nullptr, 0.25, 2);
    const GeneratorMatrix planar_gen = validate_generator(Matrix{{-1.0, 1.0}, {1.0, -1.0}});
    for (int k = 0; k < 10000; ++k) {
      const SampleBox box = SampleBox::cube(2, 3.0);
      const Vec x = stream.next_point(box);
      const Vec y = stream.next_point(box);
      const int i = stream.next_index(2);
      const Vec d = planar.neutral(y, i);
      const double zz = (x[0] - d[0]) * (x[0] - d[0]) + (x[1] - d[1]) * (x[1] - d[1]);
      const double closed = -zz * zz - 2.0 * zz;
      const double general = evaluate_LV(planar, planar_gen, quad, x, y, 0.0, i);
      const double scale = std::max(1.0, zz * zz + 2.0 * zz);
      const double gap = std::fabs(general - closed) / scale;
      worst = std::max(worst, gap);
      if (gap > 1e-12) pass = false;
    }

    harness.report(8, pass, "LV evaluator matches the quadratic closed forms",
                   "2e4 points, worst relative gap " + fmt(worst, 3) + " <= 1e-12");
  }

  // ---- criterion 9: worker count never changes the emitted CSV ----
  {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "nsdde_acceptance";
    fs::create_directories(dir);
    const std::string config_path = (dir / "benchmark.cfg").string();
    {
      std::ofstream out(config_path);
      out << kBenchmarkConfig;
    }

    CommandOptions first;
    first.config_path = config_path;
    first.output_override = (dir / "workers1.csv").string();
    first.workers = 1;
    CommandOptions second = first;
    second.output_override = (dir / "workers4.csv").string();
    second.workers = 4;

    std::ostringstream sink;
    std::ostringstream err;
    const bool ran = cmd_moments(first, sink, err) == kExitOk &&
                     cmd_moments(second, sink, err) == kExitOk;
    const bool identical =
        ran && io::read_file(first.output_override) == io::read_file(second.output_override);
    harness.report(9, identical, "moment CSV is byte-identical across --workers",
                   ran ? (identical ? "workers 1 and 4 agree byte for byte"
                                    : "files differ")
                       : "run failed");
    fs::remove_all(dir);
  }

  std::cout << (harness.failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL") << " ("
            << (9 - harness.failures) << "/9 criteria)\n";
  return harness.failures == 0 ? 0 : 1;
}
