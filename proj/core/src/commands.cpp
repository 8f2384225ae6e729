#include "nsdde/commands.hpp"

#include <functional>
#include <string>

#include "nsdde/config.hpp"
#include "nsdde/ensemble.hpp"
#include "nsdde/error.hpp"
#include "nsdde/io.hpp"
#include "nsdde/stability.hpp"

namespace nsdde {

namespace {

int guard(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.code()) {
      case errc::invalid_config:
      case errc::invalid_argument:
      case errc::io_error:
        return kExitConfig;
      default:
        return kExitInternal;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}

RunConfig load(const CommandOptions& options) {
  require(!options.config_path.empty(), errc::invalid_config, "missing --config <path>");
  RunConfig cfg = load_config_file(options.config_path);
  if (options.seed_override) cfg.seed = *options.seed_override;
  if (!options.output_override.empty()) cfg.output = options.output_override;
  return cfg;
}

/// Single-line echo of the normalized config, kept in report footers for
/// reproducibility. The output path is delivery detail, not part of the
/// experiment identity, so it is dropped here.
std::string config_echo(const RunConfig& cfg) {
  RunConfig scrubbed = cfg;
  scrubbed.output.clear();
  std::string flat = normalize_config(scrubbed);
  for (char& ch : flat) {
    if (ch == '\n') ch = ';';
  }
  if (!flat.empty() && flat.back() == ';') flat.pop_back();
  return flat;
}

std::optional<double> model_param(const RunConfig& cfg, const std::string& key) {
  const auto it = cfg.model_params.find(key);
  if (it != cfg.model_params.end()) return it->second;
  return std::nullopt;
}

}  // namespace

int cmd_simulate(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guard(err, [&]() {
    const RunConfig cfg = load(options);
    const ModelSpec model = make_model(cfg);
    const GeneratorMatrix gen = make_generator(cfg);
    const SchemeConfig scheme = make_scheme(cfg, model);
    const InitialSegment init = make_initial_segment(cfg, model);

    auto chain_stream = rng::path_stream(cfg.seed, 0, rng::kChainStream);
    auto brownian_stream = rng::path_stream(cfg.seed, 0, rng::kBrownianStream);
    const double chain_horizon = static_cast<double>(scheme.horizon_steps) * scheme.delta;
    const RegimePath chain = sample_regime_path(gen, cfg.i0, chain_horizon, chain_stream);
    const std::vector<int> regimes = regime_at_grid(chain, scheme.delta, scheme.horizon_steps);
    const PathRecord record = simulate_path(model, scheme, init, regimes, brownian_stream);

    const std::string target = cfg.output.empty() ? "path.csv" : cfg.output;
    io::atomic_write_file(target, io::path_to_csv(record));

    out << "model = " << model.name << "\n";
    out << "rows = " << record.times.size() << "\n";
    out << "delta = " << io::format_double(scheme.delta) << "\n";
    if (record.blowup_at) {
      out << "blow_up_at_step = " << *record.blowup_at << "\n";
    } else {
      out << "blow_up_at_step = none\n";
    }
    out << "output = " << target << "\n";
    out << "# config = " << config_echo(cfg) << "\n";
    return kExitOk;
  });
}

namespace {

io::Footer moment_footer(const RunConfig& cfg, const SchemeConfig& scheme,
                         const MomentCurve& curve) {
  io::Footer footer;
  footer.emplace_back("n_paths", std::to_string(curve.n_paths));
  footer.emplace_back("n_blowups", std::to_string(curve.n_blowups));
  footer.emplace_back("p", io::format_double(curve.p));
  footer.emplace_back("theta", io::format_double(scheme.theta));
  footer.emplace_back("delta", io::format_double(scheme.delta));
  footer.emplace_back("seed", std::to_string(cfg.seed));
  footer.emplace_back("confidence_bands", "normal approximation, mean +- 1.96 stderr");
  footer.emplace_back("config", config_echo(cfg));
  return footer;
}

}  // namespace

int cmd_moments(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guard(err, [&]() {
    const RunConfig cfg = load(options);
    const ModelSpec model = make_model(cfg);
    const GeneratorMatrix gen = make_generator(cfg);
    const SchemeConfig scheme = make_scheme(cfg, model);
    const InitialSegment init = make_initial_segment(cfg, model);
    EnsembleConfig ens = make_ensemble(cfg);
    ens.retain_paths = 0;  // the curve is the product here

    const EnsembleResult result =
        run_ensemble(model, scheme, ens, gen, cfg.i0, init, options.workers);

    const std::string target = cfg.output.empty() ? "moments.csv" : cfg.output;
    io::atomic_write_file(target, io::moments_to_csv(result.curve,
                                                     moment_footer(cfg, scheme, result.curve)));

    out << "n_paths = " << result.curve.n_paths << "\n";
    out << "n_blowups = " << result.curve.n_blowups << "\n";
    if (result.curve.n_blowups > 0) {
      out << "note = blow-ups present, stability conclusions are void\n";
    }
    out << "output = " << target << "\n";
    return kExitOk;
  });
}

int cmd_lyapunov(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guard(err, [&]() {
    const RunConfig cfg = load(options);

    if (!options.curve_csv.empty()) {
      // fit an existing curve instead of simulating
      const io::MomentCsv parsed = io::moments_from_csv(io::read_file(options.curve_csv));
      const ExponentEstimate fit =
          fit_moment_exponent(parsed.curve, cfg.window_t0, cfg.window_t1);
      out << "moment_slope = " << io::format_double(fit.slope) << "\n";
      out << "moment_slope_stderr = " << io::format_double(fit.std_err) << "\n";
      out << "window = [" << io::format_double(fit.window_t0) << ", "
          << io::format_double(fit.window_t1) << "]\n";
      out << "source = " << options.curve_csv << "\n";
      return kExitOk;
    }

    const ModelSpec model = make_model(cfg);
    const GeneratorMatrix gen = make_generator(cfg);
    const SchemeConfig scheme = make_scheme(cfg, model);
    const InitialSegment init = make_initial_segment(cfg, model);
    const EnsembleConfig ens = make_ensemble(cfg);

    const EnsembleResult result =
        run_ensemble(model, scheme, ens, gen, cfg.i0, init, options.workers);
    const ExponentEstimate fit =
        fit_moment_exponent(result.curve, cfg.window_t0, cfg.window_t1);
    const PathwiseSummary pathwise =
        pathwise_exponents(result.paths, cfg.window_t0, cfg.window_t1);

    out << "moment_slope = " << io::format_double(fit.slope) << "\n";
    out << "moment_slope_stderr = " << io::format_double(fit.std_err) << "\n";
    out << "window = [" << io::format_double(fit.window_t0) << ", "
        << io::format_double(fit.window_t1) << "]\n";
    out << "p = " << io::format_double(result.curve.p) << "\n";
    out << "pathwise_mean = " << io::format_double(pathwise.mean) << "\n";
    out << "pathwise_q95 = " << io::format_double(pathwise.quantile95) << "\n";
    out << "pathwise_floored = " << pathwise.n_floored << "\n";
    out << "n_blowups = " << result.curve.n_blowups << "\n";
    if (result.curve.n_blowups > 0) {
      out << "note = blow-ups present, stability conclusions are void\n";
    }
    out << "# config = " << config_echo(cfg) << "\n";
    return kExitOk;
  });
}

int cmd_certify(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guard(err, [&]() {
    const RunConfig cfg = load(options);
    const ModelSpec model = make_model(cfg);
    const GeneratorMatrix gen = make_generator(cfg);
    // unchecked so a violated well-posedness gate surfaces as a failed check
    const SchemeConfig scheme =
        SchemeConfig::create_unchecked(cfg.tau, cfg.m_steps, cfg.theta, cfg.horizon);

    const StabilityCertificate cert = certify_scheme(model, scheme);

    out << "model = " << model.name << "\n";
    out << "beta = " << io::format_double(cert.beta) << "\n";
    out << "c1 = " << io::format_double(cert.c1) << "\n";
    out << "c2 = " << io::format_double(cert.c2) << "\n";
    out << "threshold = " << io::format_double(cert.threshold) << "\n";
    out << "theta = " << io::format_double(cert.theta) << "\n";
    out << "l_theta_delta = " << io::format_double(cert.l_theta_delta) << "\n";

    bool verdict = cert.verdict;

    // quadratic exponential-rate gates, when the rate constants are known
    std::optional<double> lambda = model_param(cfg, "lambda");
    std::optional<double> alpha1 = model_param(cfg, "alpha1");
    std::optional<double> alpha2 = model_param(cfg, "alpha2");
    if (cfg.model_name == "sine_neutral") {
      if (!lambda) lambda = 1.0;
      if (!alpha1) alpha1 = 8.0;
      if (!alpha2) alpha2 = 5.0 / 12.0;
    }
    std::optional<QuadraticRateReport> rate;
    if (lambda && alpha1 && alpha2) {
      auto stream = rng::seeded(cfg.seed ^ 0xCE47ull);
      const SampleBox box = SampleBox::cube(model.dim_x, 5.0);
      rate = certify_exact_quadratic(model, gen, *lambda, *alpha1, *alpha2, box, 20000,
                                     stream);
      out << "rate_lambda = " << io::format_double(rate->lambda) << "\n";
      out << "rate_alpha1 = " << io::format_double(rate->alpha1) << "\n";
      out << "rate_alpha2 = " << io::format_double(rate->alpha2) << "\n";
      verdict = verdict && rate->pass;
    }

    out << "verdict = " << (verdict ? "pass" : "fail") << "\n";
    out << "check,margin,pass\n";
    for (const CertificateCheck& check : cert.checks) {
      out << check.name << "," << io::format_double(check.margin) << "," << (check.pass ? 1 : 0)
          << "\n";
    }
    if (rate) {
      out << "rate_gate_alpha," << io::format_double(rate->gate_alpha_margin) << ","
          << (rate->gate_alpha_pass ? 1 : 0) << "\n";
      out << "rate_gate_beta," << io::format_double(rate->gate_beta_margin) << ","
          << (rate->gate_beta_pass ? 1 : 0) << "\n";
      out << "rate_lv_margin," << io::format_double(rate->sampled.worst_margin) << ","
          << (rate->sampled.worst_margin >= 0.0 ? 1 : 0) << "\n";
    }
    out << "# config = " << config_echo(cfg) << "\n";
    return verdict ? kExitOk : kExitCertificateFail;
  });
}

int cmd_selftest(const SelfTestOptions& options, std::ostream& out, std::ostream& err) {
  return guard(err, [&]() {
    bool all_pass = true;
    for (const SuiteResult& suite : run_selftest(options)) {
      out << (suite.pass ? "[PASS] " : "[FAIL] ") << suite.name << " (" << suite.detail
          << ")\n";
      all_pass = all_pass && suite.pass;
    }
    return all_pass ? kExitOk : kExitInternal;
  });
}

}  // namespace nsdde
