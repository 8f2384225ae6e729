#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nsdde {

struct SelfTestOptions {
  std::uint64_t seed = 0x5E1F7E57ull;
  int property_tuples = 100000;
  int solver_instances = 1000;
  /// Test hook: added to the library's certificate threshold before the
  /// independent-arithmetic comparison, so tests can verify the suite
  /// actually detects a corrupted constant. Leave at 0.
  double threshold_perturbation = 0.0;
};

struct SuiteResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Runs every oracle and property suite; each result carries a short detail
/// line (tuple counts, worst margins, largest disagreement).
std::vector<SuiteResult> run_selftest(const SelfTestOptions& options = {});

}  // namespace nsdde
