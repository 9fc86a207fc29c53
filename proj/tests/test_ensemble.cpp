#include <doctest.h>

#include <algorithm>

#include "nafs/ensemble.hpp"
#include "nafs/error.hpp"
#include "nafs/rng.hpp"

using namespace nafs;

namespace {

FeatureMatrix random_features(std::int64_t n, std::int64_t f, std::uint64_t seed) {
  Rng rng(seed);
  FeatureMatrix x(n, f);
  for (double& v : x.data()) v = rng.next_normal();
  return x;
}

}  // namespace

TEST_SUITE("ensemble") {

TEST_CASE("single branch is the branch") {
  const Graph g = generate_er(20, 0.2, 1);
  const FeatureMatrix x = random_features(20, 4, 2);
  SmoothingConfig cfg;
  cfg.k_max = 3;
  EnsembleConfig ens;
  ens.r_values = {0.3};
  const FeatureMatrix branch = nafs_single(g, x, 0.3, cfg);
  for (auto strategy :
       {EnsembleStrategy::kMean, EnsembleStrategy::kMax, EnsembleStrategy::kConcat}) {
    ens.strategy = strategy;
    CHECK(max_abs_diff(nafs_ensemble(g, x, cfg, ens), branch) == 0.0);
  }
}

TEST_CASE("mean and max are idempotent over identical branches") {
  // On a regular graph every r yields the same operator, so distinct r
  // values still produce identical branches.
  std::vector<Edge> ring;
  for (NodeId i = 0; i < 10; ++i) ring.emplace_back(i, (i + 1) % 10);
  const Graph g = build_graph(ring, 10);
  const FeatureMatrix x = random_features(10, 3, 4);
  SmoothingConfig cfg;
  cfg.k_max = 3;
  EnsembleConfig ens;
  ens.r_values = {0.0, 0.5, 1.0};
  // (branches agree up to pow() rounding between d̃^(r-1) d̃^(-r) forms)
  const FeatureMatrix branch = nafs_single(g, x, 0.0, cfg);
  for (auto strategy : {EnsembleStrategy::kMean, EnsembleStrategy::kMax}) {
    ens.strategy = strategy;
    CHECK(max_abs_diff(nafs_ensemble(g, x, cfg, ens), branch) <= 1e-12);
  }
}

TEST_CASE("duplicate r values are rejected") {
  const Graph g = generate_er(15, 0.3, 3);
  const FeatureMatrix x = random_features(15, 3, 4);
  SmoothingConfig cfg;
  cfg.k_max = 2;
  EnsembleConfig dup;
  dup.r_values = {0.2, 0.2};
  CHECK_THROWS_AS(nafs_ensemble(g, x, cfg, dup), ParamError);
  EnsembleConfig empty;
  empty.r_values = {};
  CHECK_THROWS_AS(nafs_ensemble(g, x, cfg, empty), ParamError);
}

TEST_CASE("concat lays branches out in r order") {
  const Graph g = generate_er(20, 0.2, 5);
  const FeatureMatrix x = random_features(20, 4, 6);
  SmoothingConfig cfg;
  cfg.k_max = 4;
  EnsembleConfig ens;
  ens.r_values = {0.1, 0.6};
  ens.strategy = EnsembleStrategy::kConcat;
  const FeatureMatrix z = nafs_ensemble(g, x, cfg, ens);
  REQUIRE(z.cols() == 8);
  const FeatureMatrix b0 = nafs_single(g, x, 0.1, cfg);
  const FeatureMatrix b1 = nafs_single(g, x, 0.6, cfg);
  for (std::int64_t i = 0; i < 20; ++i) {
    for (std::int64_t c = 0; c < 4; ++c) {
      CHECK(z(i, c) == b0(i, c));
      CHECK(z(i, c + 4) == b1(i, c));
    }
  }
}

TEST_CASE("mean and max are permutation invariant, concat is not") {
  const Graph g = generate_er(12, 0.3, 7);
  const FeatureMatrix x = random_features(12, 3, 8);
  SmoothingConfig cfg;
  cfg.k_max = 3;
  EnsembleConfig fwd, rev;
  fwd.r_values = {0.0, 0.3, 0.7};
  rev.r_values = {0.7, 0.3, 0.0};
  for (auto strategy : {EnsembleStrategy::kMean, EnsembleStrategy::kMax}) {
    fwd.strategy = rev.strategy = strategy;
    CHECK(max_abs_diff(nafs_ensemble(g, x, cfg, fwd), nafs_ensemble(g, x, cfg, rev)) == 0.0);
  }
  fwd.strategy = rev.strategy = EnsembleStrategy::kConcat;
  CHECK(max_abs_diff(nafs_ensemble(g, x, cfg, fwd), nafs_ensemble(g, x, cfg, rev)) > 0.0);
}

TEST_CASE("element-wise bounds: min <= mean <= max over branches") {
  const Graph g = generate_er(18, 0.25, 9);
  const FeatureMatrix x = random_features(18, 5, 10);
  SmoothingConfig cfg;
  cfg.k_max = 5;
  EnsembleConfig ens;
  ens.r_values = {0.0, 0.25, 0.5, 1.0};

  std::vector<FeatureMatrix> branches;
  for (double r : ens.r_values) branches.push_back(nafs_single(g, x, r, cfg));

  ens.strategy = EnsembleStrategy::kMean;
  const FeatureMatrix mean = nafs_ensemble(g, x, cfg, ens);
  ens.strategy = EnsembleStrategy::kMax;
  const FeatureMatrix mx = nafs_ensemble(g, x, cfg, ens);

  for (std::size_t i = 0; i < mean.data().size(); ++i) {
    double lo = branches[0].data()[i], hi = branches[0].data()[i];
    for (const auto& b : branches) {
      lo = std::min(lo, b.data()[i]);
      hi = std::max(hi, b.data()[i]);
    }
    CHECK(mean.data()[i] >= lo - 1e-12);
    CHECK(mean.data()[i] <= hi + 1e-12);
    CHECK(mx.data()[i] == hi);
  }
}

TEST_CASE("parallel branches match sequential") {
  const Graph g = generate_er(25, 0.2, 11);
  const FeatureMatrix x = random_features(25, 4, 12);
  SmoothingConfig cfg;
  cfg.k_max = 4;
  EnsembleConfig seq, par;
  seq.r_values = par.r_values = {0.0, 0.2, 0.4};
  par.parallel_branches = true;
  for (auto strategy :
       {EnsembleStrategy::kMean, EnsembleStrategy::kMax, EnsembleStrategy::kConcat}) {
    seq.strategy = par.strategy = strategy;
    CHECK(max_abs_diff(nafs_ensemble(g, x, cfg, seq), nafs_ensemble(g, x, cfg, par)) == 0.0);
  }
}

TEST_CASE("prefix ensemble tracks nafs_ensemble per K") {
  const Graph g = generate_er(14, 0.3, 13);
  const FeatureMatrix x = random_features(14, 3, 14);
  SmoothingConfig cfg;
  EnsembleConfig ens;
  ens.r_values = {0.0, 0.5};
  for (auto strategy :
       {EnsembleStrategy::kMean, EnsembleStrategy::kMax, EnsembleStrategy::kConcat}) {
    ens.strategy = strategy;
    cfg.k_max = 5;
    PrefixEnsemble prefix(g, x, cfg, ens);
    for (int k = 0; k <= 5; ++k) {
      cfg.k_max = k;
      CHECK(max_abs_diff(prefix.current(), nafs_ensemble(g, x, cfg, ens)) <= 1e-12);
      if (k < 5) prefix.advance();
    }
  }
}

TEST_CASE("post normalization yields unit rows") {
  const Graph g = generate_er(10, 0.4, 15);
  const FeatureMatrix x = random_features(10, 4, 16);
  SmoothingConfig cfg;
  cfg.k_max = 2;
  EnsembleConfig ens;
  ens.r_values = {0.0, 0.5};
  ens.post_normalize = true;
  const FeatureMatrix z = nafs_ensemble(g, x, cfg, ens);
  for (std::int64_t i = 0; i < z.rows(); ++i)
    CHECK(l2_norm(z.row(i)) == doctest::Approx(1.0).epsilon(1e-12));
}

}  // TEST_SUITE
