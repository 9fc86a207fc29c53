#include <benchmark/benchmark.h>

#include "nafs/graph.hpp"
#include "nafs/operator.hpp"
#include "nafs/rng.hpp"

namespace {

nafs::FeatureMatrix random_features(std::int64_t n, std::int64_t f, std::uint64_t seed) {
  nafs::Rng rng(seed);
  nafs::FeatureMatrix x(n, f);
  for (double& v : x.data()) v = rng.next_normal();
  return x;
}

void BM_spmm(benchmark::State& state) {
  const auto n = static_cast<nafs::NodeId>(state.range(0));
  const std::int64_t f = state.range(1);
  const double p = 10.0 / static_cast<double>(n);  // mean degree ~10
  const nafs::Graph g = nafs::generate_er(n, p, 1);
  const nafs::NormalizedOperator op(g, 0.5);
  const nafs::FeatureMatrix x = random_features(n, f, 2);
  nafs::FeatureMatrix y(n, f);
  for (auto _ : state) {
    nafs::spmm(op, x, y);
    benchmark::DoNotOptimize(y.data().data());
  }
  state.counters["edges"] = static_cast<double>(g.num_edges());
  state.SetItemsProcessed(state.iterations() * (2 * g.num_edges() + n) * f);
}

void BM_generate_er(benchmark::State& state) {
  const auto n = static_cast<nafs::NodeId>(state.range(0));
  for (auto _ : state) {
    const nafs::Graph g = nafs::generate_er(n, 0.0001, 7);
    benchmark::DoNotOptimize(g.num_edges());
  }
}

}  // namespace

BENCHMARK(BM_spmm)
    ->Args({10000, 64})
    ->Args({50000, 64})
    ->Args({100000, 64})
    ->Unit(benchmark::kMillisecond);

BENCHMARK(BM_generate_er)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
