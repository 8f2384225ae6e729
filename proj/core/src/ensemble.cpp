#include "nsdde/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>
#include <utility>

#include "nsdde/error.hpp"

namespace nsdde {

EnsembleResult run_ensemble(const ModelSpec& model, const SchemeConfig& cfg,
                            const EnsembleConfig& ens, const GeneratorMatrix& gen, int i0,
                            const InitialSegment& init, int n_workers) {
  require(ens.n_paths >= 2, errc::invalid_argument,
          "need at least 2 paths for standard errors");
  require(ens.p_moment >= 1.0, errc::invalid_argument, "p_moment must be >= 1");

  const int n_paths = ens.n_paths;
  const int k_max = cfg.horizon_steps;
  const double chain_horizon = static_cast<double>(k_max) * cfg.delta;

  std::vector<PathRecord> records(static_cast<std::size_t>(n_paths));
  std::vector<std::uint8_t> blown(static_cast<std::size_t>(n_paths), 0);

  std::atomic<int> next_path{0};
  std::exception_ptr worker_error;
  std::mutex error_mutex;

  const auto worker = [&]() {
    while (true) {
      const int idx = next_path.fetch_add(1);
      if (idx >= n_paths) return;
      try {
        auto chain_stream = rng::path_stream(ens.master_seed, static_cast<std::uint64_t>(idx),
                                             rng::kChainStream);
        auto brownian_stream = rng::path_stream(
            ens.master_seed, static_cast<std::uint64_t>(idx), rng::kBrownianStream);
        const RegimePath chain = sample_regime_path(gen, i0, chain_horizon, chain_stream);
        const std::vector<int> regimes = regime_at_grid(chain, cfg.delta, k_max);
        PathRecord record = simulate_path(model, cfg, init, regimes, brownian_stream);
        if (record.blowup_at) blown[static_cast<std::size_t>(idx)] = 1;
        records[static_cast<std::size_t>(idx)] = std::move(record);
      } catch (const Error& e) {
        if (e.code() == errc::no_convergence) {
          // a diverging implicit solve is treated like an exploded path
          blown[static_cast<std::size_t>(idx)] = 1;
          records[static_cast<std::size_t>(idx)].blowup_at = 0;
        } else {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!worker_error) worker_error = std::current_exception();
          return;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!worker_error) worker_error = std::current_exception();
        return;
      }
    }
  };

  int workers = n_workers > 0 ? n_workers : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, n_paths));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (worker_error) std::rethrow_exception(worker_error);

  EnsembleResult result;
  result.curve.p = ens.p_moment;
  result.curve.n_paths = n_paths;
  for (int idx = 0; idx < n_paths; ++idx) {
    if (blown[static_cast<std::size_t>(idx)]) result.blown_indices.push_back(idx);
  }
  result.curve.n_blowups = static_cast<int>(result.blown_indices.size());
  const int usable = n_paths - result.curve.n_blowups;
  if (usable == 0) fail(errc::all_paths_blew_up, "no path survived the run");

  // aggregation in path-index order: mean and standard error of |X(t)|^p
  result.curve.times.resize(static_cast<std::size_t>(k_max) + 1);
  result.curve.values.resize(static_cast<std::size_t>(k_max) + 1);
  result.curve.std_err.resize(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) {
    // Welford in path-index order; exact for identical samples
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t count = 0;
    for (int idx = 0; idx < n_paths; ++idx) {
      if (blown[static_cast<std::size_t>(idx)]) continue;
      const PathRecord& record = records[static_cast<std::size_t>(idx)];
      const double v = std::pow(norm(record.states[record.index_of_step(k)]), ens.p_moment);
      ++count;
      const double delta_before = v - mean;
      mean += delta_before / static_cast<double>(count);
      m2 += delta_before * (v - mean);
    }
    const double variance = usable > 1 ? m2 / static_cast<double>(usable - 1) : 0.0;
    result.curve.times[static_cast<std::size_t>(k)] = cfg.time_at(k);
    result.curve.values[static_cast<std::size_t>(k)] = mean;
    result.curve.std_err[static_cast<std::size_t>(k)] =
        std::sqrt(variance / static_cast<double>(usable));
  }

  const int retain = ens.retain_paths < 0 ? n_paths : std::min(ens.retain_paths, n_paths);
  result.paths.reserve(static_cast<std::size_t>(retain));
  for (int idx = 0; idx < retain; ++idx) {
    result.paths.push_back(std::move(records[static_cast<std::size_t>(idx)]));
  }
  return result;
}

PathwiseSummary pathwise_exponents(const std::vector<PathRecord>& paths, double t0, double t1) {
  require(t1 > t0 && t1 > 0.0, errc::invalid_argument, "window must satisfy 0 < t0 < t1");

  PathwiseSummary summary;
  for (const PathRecord& path : paths) {
    if (path.blowup_at) {
      ++summary.n_skipped;
      continue;
    }
    double sup = -1.0;
    for (std::size_t idx = 0; idx < path.times.size(); ++idx) {
      const double t = path.times[idx];
      if (t < t0 - 1e-12 || t > t1 + 1e-12) continue;
      sup = std::max(sup, norm(path.states[idx]));
    }
    if (sup < 0.0) {  // window not covered by this record
      ++summary.n_skipped;
      continue;
    }
    double exponent;
    if (sup == 0.0) {
      exponent = kExponentFloor;
      ++summary.n_floored;
    } else {
      exponent = std::log(sup) / t1;
      if (exponent < kExponentFloor) {
        exponent = kExponentFloor;
        ++summary.n_floored;
      }
    }
    summary.exponents.push_back(exponent);
  }

  if (!summary.exponents.empty()) {
    double mean = 0.0;
    for (double e : summary.exponents) mean += e;
    summary.mean = mean / static_cast<double>(summary.exponents.size());

    std::vector<double> sorted = summary.exponents;
    std::sort(sorted.begin(), sorted.end());
    const auto rank = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(sorted.size()))) - 1;
    summary.quantile95 = sorted[std::min(rank, sorted.size() - 1)];
  }
  return summary;
}

}  // namespace nsdde
