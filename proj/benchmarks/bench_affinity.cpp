#include <random>

#include <benchmark/benchmark.h>

#include "alsp/affinity.hpp"
#include "alsp/metrics.hpp"

namespace {

// Slowly drifting rows, so groups of a few tokens form at tau 0.8.
alsp::HiddenSequence drifting(std::size_t rows, std::size_t dim) {
  std::mt19937_64 rng(rows * 31 + dim);
  std::normal_distribution<float> normal(0.0f, 1.0f);
  std::vector<float> data(rows * dim);
  for (std::size_t t = 0; t < rows; ++t) {
    for (std::size_t j = 0; j < dim; ++j) {
      data[t * dim + j] = (t > 0 ? 0.8f * data[(t - 1) * dim + j] : 0.0f) + normal(rng);
    }
  }
  return alsp::HiddenSequence(rows, dim, std::move(data));
}

void BM_AffinityPool(benchmark::State& state) {
  const auto seq = drifting(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  const alsp::AffinityParams params{0.8, static_cast<std::size_t>(state.range(2))};
  for (auto _ : state) {
    auto result = alsp::affinity_pool(seq, params);
    benchmark::DoNotOptimize(result);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AffinityPool)
    ->ArgsProduct({{750, 3000, 12000}, {1024, 4096}, {1, 3}})
    ->Unit(benchmark::kMicrosecond);

void BM_BudgetedAffinity(benchmark::State& state) {
  const auto seq = drifting(static_cast<std::size_t>(state.range(0)), 1024);
  for (auto _ : state) {
    auto groups = alsp::budgeted_affinity_groups(seq, 70.0);
    benchmark::DoNotOptimize(groups);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BudgetedAffinity)->Arg(750)->Arg(3000)->Arg(12000)->Unit(benchmark::kMicrosecond);

void BM_NeighborSimilarity(benchmark::State& state) {
  const auto seq = drifting(static_cast<std::size_t>(state.range(0)), 256);
  for (auto _ : state) {
    benchmark::DoNotOptimize(alsp::neighbor_similarity(seq, 5));
  }
}
BENCHMARK(BM_NeighborSimilarity)->Arg(500)->Arg(2000)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
