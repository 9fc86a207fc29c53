// End-to-end embedding cost on synthetic graphs of growing size, the
// self-benchmark counterpart of the scalability smoke test.

#include <benchmark/benchmark.h>

#include "nafs/ensemble.hpp"
#include "nafs/graph.hpp"
#include "nafs/rng.hpp"
#include "nafs/smoothing.hpp"

namespace {

nafs::FeatureMatrix random_features(std::int64_t n, std::int64_t f, std::uint64_t seed) {
  nafs::Rng rng(seed);
  nafs::FeatureMatrix x(n, f);
  for (double& v : x.data()) v = rng.next_normal();
  return x;
}

void BM_embed_mean(benchmark::State& state) {
  const auto n = static_cast<nafs::NodeId>(state.range(0));
  const nafs::Graph g = nafs::generate_er(n, 0.0001, 3);
  const nafs::FeatureMatrix x = random_features(n, 64, 4);

  nafs::SmoothingConfig cfg;
  cfg.k_max = static_cast<int>(state.range(1));
  nafs::EnsembleConfig ens;  // default six r values, mean pooling
  for (auto _ : state) {
    const nafs::FeatureMatrix z = nafs::nafs_ensemble(g, x, cfg, ens);
    benchmark::DoNotOptimize(z.data().data());
  }
  state.counters["edges"] = static_cast<double>(g.num_edges());
}

void BM_single_operator(benchmark::State& state) {
  const auto n = static_cast<nafs::NodeId>(state.range(0));
  const nafs::Graph g = nafs::generate_er(n, 0.0001, 3);
  const nafs::FeatureMatrix x = random_features(n, 64, 4);
  nafs::SmoothingConfig cfg;
  cfg.k_max = static_cast<int>(state.range(1));
  for (auto _ : state) {
    const nafs::FeatureMatrix z = nafs::nafs_single(g, x, 0.5, cfg);
    benchmark::DoNotOptimize(z.data().data());
  }
}

}  // namespace

BENCHMARK(BM_single_operator)
    ->Args({5000, 20})
    ->Args({20000, 20})
    ->Args({100000, 20})
    ->Unit(benchmark::kMillisecond);

BENCHMARK(BM_embed_mean)
    ->Args({5000, 20})
    ->Args({20000, 20})
    ->Args({100000, 20})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
