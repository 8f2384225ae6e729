#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "nsdde/selftest.hpp"

namespace nsdde {

// Exit code contract shared by every subcommand:
//   0 success (estimation commands always succeed),
//   1 usage or configuration error,
//   2 certificate verdict fail,
//   3 internal error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitCertificateFail = 2;
inline constexpr int kExitInternal = 3;

struct CommandOptions {
  std::string config_path;
  std::string output_override;               // --output
  std::optional<std::uint64_t> seed_override;  // --seed
  int workers = 0;                           // --workers, speed only
  std::string curve_csv;  // lyapunov: fit this moment CSV instead of simulating
};

int cmd_simulate(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_moments(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_lyapunov(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_certify(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_selftest(const SelfTestOptions& options, std::ostream& out, std::ostream& err);

}  // namespace nsdde
