#include <doctest.h>

#include <cmath>

#include "nafs/error.hpp"
#include "nafs/graph.hpp"
#include "nafs/rng.hpp"
#include "nafs/smoothing.hpp"
#include "oracle.hpp"

using namespace nafs;

namespace {

Graph triangle() { return build_graph(std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}}, 3); }

FeatureMatrix random_features(std::int64_t n, std::int64_t f, std::uint64_t seed) {
  Rng rng(seed);
  FeatureMatrix x(n, f);
  for (double& v : x.data()) v = rng.next_normal();
  return x;
}

// e^d0 / (e^d0 + 1) with d0 = sqrt(6)/3, the triangle's adaptive weight
// on step 0 when K = 1.
const double kTriangleD0 = std::sqrt(6.0) / 3.0;
const double kTriangleW0 = std::exp(kTriangleD0) / (std::exp(kTriangleD0) + 1.0);

}  // namespace

TEST_SUITE("smoothing") {

TEST_CASE("propagate on the triangle reaches the uniform state in one step") {
  const Graph g = triangle();
  const auto scales = propagate(NormalizedOperator(g, 0.0), oracle::identity(3), 2);
  REQUIRE(scales.k_max() == 2);
  for (int k : {1, 2})
    for (double v : scales.at(k).data())
      CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("propagate with k_max = 0 keeps only the input") {
  const Graph g = triangle();
  const FeatureMatrix x = random_features(3, 4, 1);
  const auto scales = propagate(NormalizedOperator(g, 0.5), x, 0);
  CHECK(scales.steps.size() == 1);
  CHECK(scales.at(0) == x);
}

TEST_CASE("propagate matches dense matrix powers") {
  const Graph g = generate_er(20, 0.2, 3);
  const FeatureMatrix x = random_features(20, 6, 2);
  const auto scales = propagate(NormalizedOperator(g, 0.3), x, 5);
  const auto dense = oracle::dense_propagation(g, 0.3, x, 5);
  CHECK(max_abs_diff(scales.at(5), dense[5]) <= 1e-10);
}

TEST_CASE("stationary state") {
  SUBCASE("triangle closed form is exactly 1/3") {
    const Graph g = triangle();
    const NormalizedOperator op(g, 0.0);
    const auto state = stationary_state(op, oracle::identity(3), connected_components(g));
    for (double v : state.matrix.data())
      CHECK(std::abs(v - 1.0 / 3.0) <= 1e-12);
  }
  SUBCASE("isolated node keeps its feature") {
    const Graph g = build_graph(std::vector<Edge>{{0, 1}}, 3);
    FeatureMatrix x(3, 2, 0.0);
    x(2, 0) = 7.0;
    const NormalizedOperator op(g, 0.4);
    const auto state = stationary_state(op, x, connected_components(g));
    CHECK(state.matrix(2, 0) == doctest::Approx(7.0).epsilon(1e-15));
    CHECK(state.matrix(2, 1) == 0.0);
  }
  SUBCASE("matches power iteration") {
    for (double r : {0.0, 0.5}) {
      const Graph g = generate_er(30, 0.2, 4);
      const FeatureMatrix x = random_features(30, 3, 9);
      const NormalizedOperator op(g, r);
      const auto state = stationary_state(op, x, connected_components(g));
      const FeatureMatrix reference = oracle::dense_stationary(g, r, x, 1e-14);
      CHECK(max_abs_diff(state.matrix, reference) <= 1e-10);
    }
  }
  SUBCASE("fixed point of the operator") {
    const Graph g = generate_er(25, 0.15, 6);  // typically disconnected
    const FeatureMatrix x = random_features(25, 4, 5);
    const NormalizedOperator op(g, 0.3);
    const auto state = stationary_state(op, x, connected_components(g));
    CHECK(max_abs_diff(spmm(op, state.matrix), state.matrix) <= 1e-9);
  }
}

TEST_CASE("distance profile") {
  SUBCASE("triangle euclid values") {
    const Graph g = triangle();
    const NormalizedOperator op(g, 0.0);
    const FeatureMatrix x = oracle::identity(3);
    const auto scales = propagate(op, x, 1);
    const auto state = stationary_state(op, x, connected_components(g));
    const FeatureMatrix d =
        distance_profile(scales, &state, DistanceMode::kEuclidStationary);
    for (NodeId i = 0; i < 3; ++i) {
      CHECK(d(i, 0) == doctest::Approx(kTriangleD0).epsilon(1e-12));
      CHECK(d(i, 1) == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
  SUBCASE("cosine of a row with itself is 1") {
    const Graph g = generate_er(15, 0.3, 8);
    const FeatureMatrix x = random_features(15, 4, 3);
    const auto scales = propagate(NormalizedOperator(g, 0.5), x, 2);
    const FeatureMatrix d = distance_profile(scales, nullptr, DistanceMode::kCosInitial);
    for (NodeId i = 0; i < 15; ++i) CHECK(d(i, 0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("zero feature row yields 0 in cosine mode") {
    const Graph g = build_graph(std::vector<Edge>{{0, 1}}, 3);
    FeatureMatrix x(3, 2, 0.0);
    x(0, 0) = 1.0;
    x(1, 1) = 1.0;  // node 2 all-zero
    const auto scales = propagate(NormalizedOperator(g, 0.0), x, 3);
    const FeatureMatrix d = distance_profile(scales, nullptr, DistanceMode::kCosInitial);
    for (int k = 0; k <= 3; ++k) CHECK(d(2, k) == 0.0);
  }
  SUBCASE("euclid mode requires the stationary state") {
    const auto scales = propagate(NormalizedOperator(triangle(), 0.0), oracle::identity(3), 1);
    CHECK_THROWS_AS(distance_profile(scales, nullptr, DistanceMode::kEuclidStationary),
                    ParamError);
  }
}

TEST_CASE("smoothing weights") {
  SUBCASE("softmax of constant distances is uniform") {
    const FeatureMatrix d(5, 4, 0.37);
    const WeightProfile p = smoothing_weights(d, Weighting::kAdaptive);
    for (double w : p.weights.data()) CHECK(w == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("triangle distances give the worked softmax") {
    FeatureMatrix d(1, 2, 0.0);
    d(0, 0) = kTriangleD0;
    const WeightProfile p = smoothing_weights(d, Weighting::kAdaptive);
    CHECK(p.weights(0, 0) == doctest::Approx(kTriangleW0).epsilon(1e-10));
    CHECK(p.weights(0, 1) == doctest::Approx(1.0 - kTriangleW0).epsilon(1e-10));
    CHECK(p.weights(0, 0) == doctest::Approx(0.6935).epsilon(1e-4));
    CHECK(p.weights(0, 1) == doctest::Approx(0.3065).epsilon(1e-4));
  }
  SUBCASE("single-hop puts all weight on the last step") {
    const FeatureMatrix d(3, 3, 1.0);
    const WeightProfile p = smoothing_weights(d, Weighting::kSingleHop);
    for (std::int64_t i = 0; i < 3; ++i) {
      CHECK(p.weights(i, 0) == 0.0);
      CHECK(p.weights(i, 1) == 0.0);
      CHECK(p.weights(i, 2) == 1.0);
    }
  }
  SUBCASE("naive average is uniform") {
    const FeatureMatrix d(2, 5, 9.9);
    const WeightProfile p = smoothing_weights(d, Weighting::kNaiveAverage);
    for (double w : p.weights.data()) CHECK(w == doctest::Approx(0.2).epsilon(1e-15));
  }
  SUBCASE("NaN distances rejected") {
    FeatureMatrix d(1, 2, 0.0);
    d(0, 1) = std::nan("");
    CHECK_THROWS_AS(smoothing_weights(d, Weighting::kAdaptive), DataError);
  }
  SUBCASE("weight rows sum to 1 and stay nonnegative") {
    const FeatureMatrix d = random_features(30, 8, 14);
    for (Weighting w : {Weighting::kAdaptive, Weighting::kNaiveAverage}) {
      const WeightProfile p = smoothing_weights(d, w);
      for (std::int64_t i = 0; i < 30; ++i) {
        double sum = 0.0;
        for (double v : p.weights.row(i)) {
          CHECK(v >= 0.0);
          sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("combine") {
  const Graph g = generate_er(12, 0.3, 21);
  const FeatureMatrix x = random_features(12, 3, 4);
  const auto scales = propagate(NormalizedOperator(g, 0.2), x, 3);
  SUBCASE("all weight on step 0 returns the input") {
    FeatureMatrix d(12, 4, 0.0);
    WeightProfile p;
    p.weights = FeatureMatrix(12, 4, 0.0);
    for (std::int64_t i = 0; i < 12; ++i) p.weights(i, 0) = 1.0;
    CHECK(max_abs_diff(combine(scales, p), x) == 0.0);
  }
  SUBCASE("uniform weights over two steps average them") {
    const auto two = propagate(NormalizedOperator(g, 0.2), x, 1);
    WeightProfile p;
    p.weights = FeatureMatrix(12, 2, 0.5);
    const FeatureMatrix out = combine(two, p);
    for (std::int64_t i = 0; i < 12; ++i)
      for (std::int64_t c = 0; c < 3; ++c)
        CHECK(out(i, c) ==
              doctest::Approx(0.5 * (two.at(0)(i, c) + two.at(1)(i, c))).epsilon(1e-12));
  }
  SUBCASE("convexity: output within per-column min/max over steps") {
    const WeightProfile p =
        smoothing_weights(distance_profile(scales, nullptr, DistanceMode::kCosInitial),
                          Weighting::kAdaptive);
    const FeatureMatrix out = combine(scales, p);
    for (std::int64_t i = 0; i < 12; ++i) {
      for (std::int64_t c = 0; c < 3; ++c) {
        double lo = scales.at(0)(i, c), hi = scales.at(0)(i, c);
        for (int k = 1; k <= 3; ++k) {
          lo = std::min(lo, scales.at(k)(i, c));
          hi = std::max(hi, scales.at(k)(i, c));
        }
        CHECK(out(i, c) >= lo - 1e-12);
        CHECK(out(i, c) <= hi + 1e-12);
      }
    }
  }
}

TEST_CASE("nafs_single") {
  SUBCASE("K = 0 returns the (normalized) input") {
    const Graph g = generate_er(10, 0.4, 2);
    const FeatureMatrix x = random_features(10, 3, 12);
    SmoothingConfig cfg;
    cfg.k_max = 0;
    cfg.row_normalize_input = false;
    for (auto mode : {DistanceMode::kCosInitial, DistanceMode::kEuclidStationary}) {
      cfg.distance_mode = mode;
      CHECK(max_abs_diff(nafs_single(g, x, 0.5, cfg), x) == 0.0);
    }
  }
  SUBCASE("triangle worked example") {
    SmoothingConfig cfg;
    cfg.k_max = 1;
    cfg.distance_mode = DistanceMode::kEuclidStationary;
    cfg.weighting = Weighting::kAdaptive;
    const FeatureMatrix out = nafs_single(triangle(), oracle::identity(3), 0.0, cfg);
    for (NodeId i = 0; i < 3; ++i) {
      for (NodeId c = 0; c < 3; ++c) {
        const double expected =
            kTriangleW0 * (i == c ? 1.0 : 0.0) + (1.0 - kTriangleW0) / 3.0;
        CHECK(out(i, c) == doctest::Approx(expected).epsilon(1e-10));
      }
    }
  }
  SUBCASE("equals the explicit composition") {
    const Graph g = generate_er(18, 0.25, 31);
    const FeatureMatrix x = random_features(18, 4, 6);
    SmoothingConfig cfg;
    cfg.k_max = 6;
    for (auto mode : {DistanceMode::kCosInitial, DistanceMode::kEuclidStationary}) {
      cfg.distance_mode = mode;
      FeatureMatrix x0 = x;
      x0.l2_normalize_rows();
      const NormalizedOperator op(g, 0.3);
      const auto scales = propagate(op, x0, cfg.k_max);
      const auto state = stationary_state(op, x0, connected_components(g));
      const FeatureMatrix d = distance_profile(
          scales, mode == DistanceMode::kEuclidStationary ? &state : nullptr, mode);
      const FeatureMatrix expected =
          combine(scales, smoothing_weights(d, Weighting::kAdaptive));
      CHECK(max_abs_diff(nafs_single(g, x, 0.3, cfg), expected) <= 1e-14);
    }
  }
  SUBCASE("matches the dense oracle") {
    for (double r : {0.0, 0.3, 0.5}) {
      const Graph g = generate_er(25, 0.2, 44);
      const FeatureMatrix x = random_features(25, 5, 7);
      SmoothingConfig cfg;
      cfg.k_max = 8;
      cfg.distance_mode = DistanceMode::kEuclidStationary;
      const FeatureMatrix expected = oracle::dense_nafs(g, r, x, 8, true, true);
      CHECK(max_abs_diff(nafs_single(g, x, r, cfg), expected) <= 1e-10);
    }
  }
  SUBCASE("smoke on both distance modes, disconnected input") {
    const Graph g = generate_er(50, 0.1, 13);
    const FeatureMatrix x = random_features(50, 6, 8);
    SmoothingConfig cfg;
    cfg.k_max = 4;
    for (auto mode : {DistanceMode::kCosInitial, DistanceMode::kEuclidStationary}) {
      cfg.distance_mode = mode;
      const FeatureMatrix out = nafs_single(g, x, 0.2, cfg);
      CHECK(out.all_finite());
    }
  }
}

TEST_CASE("adaptive weighting keeps positive weight on any step with positive distance") {
  const Graph g = generate_er(20, 0.2, 19);
  const FeatureMatrix x = random_features(20, 4, 10);
  const NormalizedOperator op(g, 0.0);
  FeatureMatrix x0 = x;
  x0.l2_normalize_rows();
  const auto scales = propagate(op, x0, 10);
  const auto state = stationary_state(op, x0, connected_components(g));
  const FeatureMatrix d = distance_profile(scales, &state, DistanceMode::kEuclidStationary);
  const WeightProfile p = smoothing_weights(d, Weighting::kAdaptive);
  for (std::int64_t i = 0; i < 20; ++i)
    for (std::int64_t k = 0; k <= 10; ++k)
      if (d(i, k) > 0.0) CHECK(p.weights(i, k) > 0.0);
}

TEST_CASE("prefix smoother tracks nafs_single for every K") {
  const Graph g = generate_er(16, 0.25, 23);
  const FeatureMatrix x = random_features(16, 3, 11);
  for (auto weighting : {Weighting::kAdaptive, Weighting::kNaiveAverage, Weighting::kSingleHop}) {
    SmoothingConfig cfg;
    cfg.weighting = weighting;
    cfg.distance_mode = DistanceMode::kEuclidStationary;
    PrefixSmoother prefix(g, x, 0.4, cfg);
    for (int k = 0; k <= 6; ++k) {
      cfg.k_max = k;
      CHECK(max_abs_diff(prefix.current(), nafs_single(g, x, 0.4, cfg)) <= 1e-12);
      if (k < 6) prefix.advance();
    }
  }
}

TEST_CASE("prefix smoother stays on track at deep K") {
  // The K sweep trusts the online accumulators far beyond a few steps.
  const Graph g = generate_er(60, 0.12, 37);
  const FeatureMatrix x = random_features(60, 8, 38);
  for (auto mode : {DistanceMode::kCosInitial, DistanceMode::kEuclidStationary}) {
    SmoothingConfig cfg;
    cfg.distance_mode = mode;
    PrefixSmoother prefix(g, x, 0.3, cfg);
    while (prefix.step() < 50) prefix.advance();
    cfg.k_max = 50;
    CHECK(max_abs_diff(prefix.current(), nafs_single(g, x, 0.3, cfg)) <= 1e-11);
  }
}

TEST_CASE("anti-over-smoothing: adaptive retains distance, single hop collapses") {
  // Connected graph, raw standard-normal features.
  const Graph g = generate_er(120, 0.08, 71);
  REQUIRE(connected_components(g).count() == 1);
  const FeatureMatrix x = random_features(120, 64, 15);

  const NormalizedOperator op(g, 0.0);
  const FeatureMatrix stat = stationary_state(op, x, connected_components(g)).matrix;
  const auto distance_to_stationary = [&](const FeatureMatrix& z) {
    std::vector<double> d(static_cast<std::size_t>(z.rows()));
    for (std::int64_t i = 0; i < z.rows(); ++i) {
      double s = 0.0;
      for (std::int64_t c = 0; c < z.cols(); ++c) {
        const double diff = z(i, c) - stat(i, c);
        s += diff * diff;
      }
      d[i] = std::sqrt(s);
    }
    return d;
  };

  SmoothingConfig cfg;
  cfg.distance_mode = DistanceMode::kEuclidStationary;
  cfg.row_normalize_input = false;

  cfg.k_max = 20;
  const auto d20 = distance_to_stationary(nafs_single(g, x, 0.0, cfg));
  cfg.k_max = 200;
  const auto d200 = distance_to_stationary(nafs_single(g, x, 0.0, cfg));

  std::int64_t retained = 0;
  for (std::size_t i = 0; i < d20.size(); ++i)
    if (d200[i] > 0.5 * d20[i]) ++retained;
  CHECK(retained >= static_cast<std::int64_t>(0.95 * static_cast<double>(d20.size())));

  cfg.weighting = Weighting::kSingleHop;
  const auto collapsed = distance_to_stationary(nafs_single(g, x, 0.0, cfg));
  for (double v : collapsed) CHECK(v < 1e-6);
}

}  // TEST_SUITE
