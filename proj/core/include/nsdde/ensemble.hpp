#pragma once

#include <cstdint>
#include <vector>

#include "nsdde/ctmc.hpp"
#include "nsdde/theta_em.hpp"

namespace nsdde {

struct EnsembleConfig {
  int n_paths = 2;
  double p_moment = 2.0;
  std::uint64_t master_seed = 0;
  double window_t0 = 0.0;  // exponent-fitting window [t0, t1]
  double window_t1 = 0.0;
  /// Number of full PathRecords kept in the result (-1 keeps every path).
  int retain_paths = -1;
};

/// Monte Carlo estimate of E|X(t)|^p on the grid t = 0..K*delta. Paths that
/// blew up are excluded from the averages and counted in n_blowups.
struct MomentCurve {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> std_err;
  int n_blowups = 0;
  int n_paths = 0;
  double p = 2.0;
};

struct EnsembleResult {
  MomentCurve curve;
  std::vector<PathRecord> paths;  // retained, in path-index order
  std::vector<int> blown_indices;
};

/// Runs n_paths independent trajectories. Each path draws its regime chain
/// and Brownian increments from streams derived from (master_seed,
/// path_index), and aggregation runs in path-index order, so the result is
/// bit-identical for any worker count. n_workers <= 0 uses the hardware
/// concurrency. Throws Error(errc::all_paths_blew_up) when no path survives.
EnsembleResult run_ensemble(const ModelSpec& model, const SchemeConfig& cfg,
                            const EnsembleConfig& ens, const GeneratorMatrix& gen, int i0,
                            const InitialSegment& init, int n_workers = 0);

/// Finite-horizon pathwise decay estimates: one exponent
///   log( sup_{t in [t0, t1]} |X(t)| ) / t1
/// per usable path. A path whose windowed supremum is exactly zero gets the
/// floor value -1e3 and is counted in n_floored; blown-up or too-short paths
/// are skipped.
struct PathwiseSummary {
  std::vector<double> exponents;
  double mean = 0.0;
  double quantile95 = 0.0;
  int n_floored = 0;
  int n_skipped = 0;
};

inline constexpr double kExponentFloor = -1e3;

PathwiseSummary pathwise_exponents(const std::vector<PathRecord>& paths, double t0, double t1);

}  // namespace nsdde
