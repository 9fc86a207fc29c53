#include <doctest.h>

#include <cmath>

#include "nafs/error.hpp"
#include "nafs/graph.hpp"
#include "nafs/operator.hpp"
#include "nafs/rng.hpp"
#include "oracle.hpp"

using namespace nafs;

namespace {

Graph triangle() { return build_graph(std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}}, 3); }

}  // namespace

TEST_SUITE("operator") {

TEST_CASE("r outside [0,1] rejected") {
  const Graph g = triangle();
  CHECK_THROWS_AS(normalized_operator(g, -0.1), ParamError);
  CHECK_THROWS_AS(normalized_operator(g, 1.5), ParamError);
}

TEST_CASE("triangle entries") {
  const Graph g = triangle();
  SUBCASE("r = 0 gives 1/3 everywhere") {
    const NormalizedOperator op(g, 0.0);
    for (NodeId i = 0; i < 3; ++i)
      for (NodeId j = 0; j < 3; ++j)
        CHECK(op.entry(i, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("r = 0.5 gives 1/3 everywhere (equal degrees)") {
    const NormalizedOperator op(g, 0.5);
    for (NodeId i = 0; i < 3; ++i)
      for (NodeId j = 0; j < 3; ++j)
        CHECK(op.entry(i, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
}

TEST_CASE("r = 0 rows sum to one") {
  const Graph g = generate_er(60, 0.1, 5);
  const NormalizedOperator op(g, 0.0);
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    double sum = op.entry(i, i);
    for (NodeId j : g.neighbors(i)) sum += op.entry(i, j);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("r = 1 columns sum to one on a path") {
  const Graph g = build_graph(std::vector<Edge>{{0, 1}}, 2);
  const oracle::FeatureMatrix dense = oracle::dense_operator(g, 1.0);
  for (NodeId j = 0; j < 2; ++j) {
    double sum = 0.0;
    for (NodeId i = 0; i < 2; ++i) sum += dense(i, j);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  // the implicit operator matches the dense materialization
  const NormalizedOperator op(g, 1.0);
  for (NodeId i = 0; i < 2; ++i)
    for (NodeId j = 0; j < 2; ++j)
      CHECK(op.entry(i, j) == doctest::Approx(dense(i, j)).epsilon(1e-15));
}

TEST_CASE("symmetry of the r = 0.5 operator") {
  const Graph g = generate_er(40, 0.15, 11);
  const FeatureMatrix dense = oracle::dense_operator(g, 0.5);
  for (NodeId i = 0; i < g.num_nodes(); ++i)
    for (NodeId j = 0; j < g.num_nodes(); ++j)
      CHECK(std::abs(dense(i, j) - dense(j, i)) <= 1e-12);
}

TEST_CASE("spmm basics") {
  const Graph g = triangle();
  SUBCASE("identity features, r = 0") {
    const FeatureMatrix y = spmm(NormalizedOperator(g, 0.0), oracle::identity(3));
    for (NodeId i = 0; i < 3; ++i)
      for (NodeId j = 0; j < 3; ++j)
        CHECK(y(i, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("zeros stay zeros") {
    const FeatureMatrix y = spmm(NormalizedOperator(g, 0.7), FeatureMatrix(3, 4, 0.0));
    for (double v : y.data()) CHECK(v == 0.0);
  }
  SUBCASE("dimension mismatch") {
    FeatureMatrix x(2, 2, 1.0);
    CHECK_THROWS_AS(spmm(NormalizedOperator(g, 0.0), x), ParamError);
  }
}

TEST_CASE("spmm equals the dense operator") {
  Rng rng(123);
  for (double r : {0.0, 0.25, 0.3, 0.5, 1.0}) {
    const Graph g = generate_er(20, 0.25, 17);
    FeatureMatrix x(20, 5);
    for (double& v : x.data()) v = rng.next_normal();
    const FeatureMatrix expected = oracle::matmul(oracle::dense_operator(g, r), x);
    const FeatureMatrix actual = spmm(NormalizedOperator(g, r), x);
    CHECK(max_abs_diff(expected, actual) <= 1e-12);
  }
}

TEST_CASE("isolated node is a fixed point") {
  const Graph g = build_graph(std::vector<Edge>{{0, 1}}, 3);  // node 2 isolated
  FeatureMatrix x(3, 2, 0.0);
  x(2, 0) = 4.0;
  x(2, 1) = -1.5;
  const FeatureMatrix y = spmm(NormalizedOperator(g, 0.3), x);
  CHECK(y(2, 0) == 4.0);
  CHECK(y(2, 1) == -1.5);
}

}  // TEST_SUITE
