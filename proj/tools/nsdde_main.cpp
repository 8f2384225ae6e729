// Command-line front end: simulate | moments | lyapunov | certify | selftest.
// All randomness flows from the single seed in the config (or --seed); the
// --workers flag changes speed only, never results.

#include <CLI11.hpp>
#include <iostream>

#include "nsdde/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Simulation and stability toolkit for neutral stochastic delay"
               " equations with regime switching"};
  app.require_subcommand(1);

  nsdde::CommandOptions options;

  const auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* config_opt = cmd->add_option("--config", options.config_path, "experiment config file");
    if (needs_config) config_opt->required();
    cmd->add_option("--output", options.output_override, "output file (overrides config)");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t value) { options.seed_override = value; },
        "master seed (overrides config)");
    cmd->add_option("--workers", options.workers,
                    "worker thread count (0 = hardware), affects speed only");
  };

  auto* simulate = app.add_subcommand("simulate", "write one trajectory as CSV");
  add_common(simulate, true);
  auto* moments = app.add_subcommand("moments", "Monte Carlo moment curve as CSV");
  add_common(moments, true);
  auto* lyapunov = app.add_subcommand("lyapunov", "moment and pathwise exponent estimates");
  add_common(lyapunov, true);
  lyapunov->add_option("--from-curve", options.curve_csv,
                       "fit an existing moment CSV instead of simulating");
  auto* certify = app.add_subcommand("certify", "evaluate the stability certificates");
  add_common(certify, true);
  auto* selftest = app.add_subcommand("selftest", "run the oracle and property suites");
  nsdde::SelfTestOptions selftest_options;
  selftest->add_option("--tuples", selftest_options.property_tuples,
                       "tuples per property suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nsdde::kExitConfig;
  }

  if (simulate->parsed()) return nsdde::cmd_simulate(options, std::cout, std::cerr);
  if (moments->parsed()) return nsdde::cmd_moments(options, std::cout, std::cerr);
  if (lyapunov->parsed()) return nsdde::cmd_lyapunov(options, std::cout, std::cerr);
  if (certify->parsed()) return nsdde::cmd_certify(options, std::cout, std::cerr);
  if (selftest->parsed()) return nsdde::cmd_selftest(selftest_options, std::cout, std::cerr);
  return nsdde::kExitConfig;
}
