#include <benchmark/benchmark.h>

#include "nsdde/ensemble.hpp"
#include "nsdde/model.hpp"
#include "nsdde/oracle.hpp"
#include "nsdde/theta_em.hpp"

using namespace nsdde;

namespace {

void BM_ImplicitSolve(benchmark::State& state) {
  const ModelSpec model = builtin_sine_neutral();
  const Vec y{0.7};
  const Vec rhs{0.9};
  for (auto _ : state) {
    benchmark::DoNotOptimize(implicit_solve(model, y, 0.0, 1, rhs, 0.01));
  }
}
BENCHMARK(BM_ImplicitSolve);

void BM_ImplicitSolveFiniteDifference(benchmark::State& state) {
  ModelSpec model = builtin_sine_neutral();
  model.drift_jacobian = nullptr;
  const Vec y{0.7};
  const Vec rhs{0.9};
  for (auto _ : state) {
    benchmark::DoNotOptimize(implicit_solve(model, y, 0.0, 1, rhs, 0.01));
  }
}
BENCHMARK(BM_ImplicitSolveFiniteDifference);

void BM_Step(benchmark::State& state) {
  const ModelSpec model = builtin_sine_neutral();
  const SchemeConfig cfg = SchemeConfig::create(1.0, 100, 1.0, 8.0, model.one_sided_L);
  HistoryRing ring(cfg.m_steps + 1);
  for (int j = 0; j <= cfg.m_steps; ++j) ring.push(Vec{1.0});
  StepState step_state;
  step_state.history = &ring;
  step_state.k = 0;
  step_state.regime_now = 1;
  step_state.regime_next = 2;
  const Vec dB{0.003};
  for (auto _ : state) {
    benchmark::DoNotOptimize(step(model, cfg, step_state, dB));
  }
}
BENCHMARK(BM_Step);

void BM_RegimePath(benchmark::State& state) {
  const GeneratorMatrix gen = sine_neutral_generator();
  std::uint64_t path_index = 0;
  for (auto _ : state) {
    auto stream = rng::path_stream(17, path_index++, rng::kChainStream);
    benchmark::DoNotOptimize(sample_regime_path(gen, 1, 8.0, stream));
  }
}
BENCHMARK(BM_RegimePath);

void BM_SimulatePath(benchmark::State& state) {
  const ModelSpec model = builtin_sine_neutral();
  const GeneratorMatrix gen = sine_neutral_generator();
  const SchemeConfig cfg = SchemeConfig::create(1.0, 100, 1.0, 8.0, model.one_sided_L);
  const InitialSegment init = InitialSegment::constant(Vec{1.0});
  std::uint64_t path_index = 0;
  for (auto _ : state) {
    auto chain_stream = rng::path_stream(17, path_index, rng::kChainStream);
    auto brownian_stream = rng::path_stream(17, path_index, rng::kBrownianStream);
    ++path_index;
    const RegimePath chain =
        sample_regime_path(gen, 1, cfg.horizon_steps * cfg.delta, chain_stream);
    const std::vector<int> regimes = regime_at_grid(chain, cfg.delta, cfg.horizon_steps);
    benchmark::DoNotOptimize(simulate_path(model, cfg, init, regimes, brownian_stream));
  }
}
BENCHMARK(BM_SimulatePath);

void BM_Ensemble(benchmark::State& state) {
  const ModelSpec model = builtin_sine_neutral();
  const GeneratorMatrix gen = sine_neutral_generator();
  const SchemeConfig cfg = SchemeConfig::create(1.0, 100, 1.0, 8.0, model.one_sided_L);
  const InitialSegment init = InitialSegment::constant(Vec{1.0});
  EnsembleConfig ens;
  ens.n_paths = static_cast<int>(state.range(0));
  ens.master_seed = 17;
  ens.retain_paths = 0;
  const int workers = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_ensemble(model, cfg, ens, gen, 1, init, workers));
  }
  state.SetItemsProcessed(state.iterations() * ens.n_paths);
}
BENCHMARK(BM_Ensemble)->Args({64, 1})->Args({64, 2})->Args({256, 2})->Unit(benchmark::kMillisecond);

void BM_MatrixExponentialOracle(benchmark::State& state) {
  const GeneratorMatrix gen = validate_generator(
      Matrix{{-3.0, 1.0, 2.0}, {0.5, -1.0, 0.5}, {4.0, 1.0, -5.0}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle::ctmc_marginal(gen, 1, 2.5));
  }
}
BENCHMARK(BM_MatrixExponentialOracle);

}  // namespace

BENCHMARK_MAIN();
