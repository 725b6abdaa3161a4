#include "bench_common.hpp"

#include <benchmark/benchmark.h>

static void BM_HamiltonFilter(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int T = static_cast<int>(state.range(1));
  const auto params = bench::three_regime_model(n);
  const auto data = bench::simulated(n, T, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(msvar::hamilton_filter(params, data).log_likelihood);
  }
  state.SetItemsProcessed(state.iterations() * T);
}
BENCHMARK(BM_HamiltonFilter)->Args({2, 400})->Args({8, 200});

static void BM_FilterAndSmoother(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int T = static_cast<int>(state.range(1));
  const auto params = bench::three_regime_model(n);
  const auto data = bench::simulated(n, T, 7);
  for (auto _ : state) {
    const auto f = msvar::hamilton_filter(params, data);
    benchmark::DoNotOptimize(msvar::kim_smoother(f, params.transition.P).smoothed_probs.data());
  }
}
BENCHMARK(BM_FilterAndSmoother)->Args({2, 400})->Args({8, 200});
