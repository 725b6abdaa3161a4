#include "bench_common.hpp"

#include <benchmark/benchmark.h>

static void BM_EmFit(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int T = static_cast<int>(state.range(1));
  const int restarts = static_cast<int>(state.range(2));
  const auto truth = bench::three_regime_model(n);
  const auto data = bench::simulated(n, T, 11);
  msvar::EmOptions opt;
  opt.n_restarts = restarts;
  opt.seed = 3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(msvar::em_fit(truth.spec, data, opt).log_likelihood);
  }
}
BENCHMARK(BM_EmFit)->Args({2, 400, 1})->Args({8, 200, 1})->Args({8, 200, 10})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
