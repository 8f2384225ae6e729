#pragma once

#include <cstdint>

#include "nsdde/linalg.hpp"

namespace nsdde::rng {

/// splitmix64 finalizer; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t z);

/// Counter-based uniform stream. Draw n is a pure function of (key, n), so a
/// stream can be re-created from its key at any time and results never depend
/// on which thread consumed it. There is no global RNG state anywhere in the
/// library.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64();

  /// Uniform draw strictly inside (0, 1); safe to feed into log().
  double next_unit();

  /// Standard normal via Box-Muller; pairs are cached.
  double next_normal();

  /// Exponential with the given rate (> 0).
  double next_exponential(double rate);

  /// Uniform on [lo, hi).
  double next_range(double lo, double hi);

  /// Uniform integer in [1, n].
  int next_index(int n);

  /// Fills a Brownian increment: m independent N(0, dt) components.
  Vec next_gaussian_increment(int m, double dt);

  /// Uniform point in an axis-aligned box.
  Vec next_point(const SampleBox& box);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Distinct sub-streams per simulated path keep the regime chain and the
// Brownian increments independent of each other and of scheduling.
inline constexpr std::uint64_t kChainStream = 0x633A6Bull;
inline constexpr std::uint64_t kBrownianStream = 0xB201ull;
inline constexpr std::uint64_t kGenericStream = 0x6E5Dull;

/// Derives the stream for (master_seed, path_index, tag).
Stream path_stream(std::uint64_t master_seed, std::uint64_t path_index, std::uint64_t tag);

/// Convenience stream for condition checkers and tests.
Stream seeded(std::uint64_t seed);

}  // namespace nsdde::rng
