#include "nafs/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "nafs/error.hpp"
#include "nafs/operator.hpp"
#include "nafs/rng.hpp"
#include "nafs/smoothing.hpp"

namespace nafs {

namespace {

constexpr NodeId kDenseEigenLimit = 2000;
constexpr double kPowerTolerance = 1e-8;
constexpr int kPowerMaxIterations = 200000;

double lambda2_dense(const Graph& g) {
  const NodeId n = g.num_nodes();
  Eigen::MatrixXd sym = Eigen::MatrixXd::Zero(n, n);
  const NormalizedOperator op(g, 0.5);  // D̃^(-1/2) Ã D̃^(-1/2)
  for (NodeId i = 0; i < n; ++i) {
    sym(i, i) = op.entry(i, i);
    for (NodeId j : g.neighbors(i)) sym(i, j) = op.entry(i, j);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw DataError("eigensolver failed to converge");
  return solver.eigenvalues()(n - 2);
}

// Power iteration on (S + I) / 2 (spectrum shifted into (0, 1], order
// preserved) with the analytic top eigenvector v1 ∝ D̃^(1/2) 1 deflated,
// so the iterate converges to the signed second-largest eigenvalue of S.
double lambda2_power(const Graph& g) {
  const NodeId n = g.num_nodes();
  const NormalizedOperator op(g, 0.5);

  FeatureMatrix v1(n, 1);
  double norm1 = 0.0;
  for (NodeId i = 0; i < n; ++i) {
    v1(i, 0) = std::sqrt(op.dtilde(i));
    norm1 += v1(i, 0) * v1(i, 0);
  }
  norm1 = std::sqrt(norm1);
  for (NodeId i = 0; i < n; ++i) v1(i, 0) /= norm1;

  Rng rng(0x5eedf00dull);
  FeatureMatrix y(n, 1);
  for (NodeId i = 0; i < n; ++i) y(i, 0) = rng.next_normal();

  const auto deflate = [&](FeatureMatrix& v) {
    double proj = 0.0;
    for (NodeId i = 0; i < n; ++i) proj += v(i, 0) * v1(i, 0);
    for (NodeId i = 0; i < n; ++i) v(i, 0) -= proj * v1(i, 0);
  };
  const auto normalize = [&](FeatureMatrix& v) {
    double norm = l2_norm(v.data());
    if (norm == 0.0) return false;
    for (double& e : v.data()) e /= norm;
    return true;
  };

  deflate(y);
  if (!normalize(y)) return 0.0;  // S has no residual spectrum beyond v1

  FeatureMatrix sy;
  double mu_prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < kPowerMaxIterations; ++it) {
    spmm(op, y, sy);
    double mu = 0.0;  // Rayleigh quotient of (S + I) / 2
    for (NodeId i = 0; i < n; ++i) mu += y(i, 0) * (sy(i, 0) + y(i, 0)) * 0.5;
    for (NodeId i = 0; i < n; ++i) y(i, 0) = (sy(i, 0) + y(i, 0)) * 0.5;
    deflate(y);
    if (!normalize(y)) return 0.0;
    // Successive Rayleigh differences overshoot the true eigenvalue error,
    // so converge well past the advertised 1e-8.
    if (std::abs(mu - mu_prev) < kPowerTolerance * 1e-5) return 2.0 * mu - 1.0;
    mu_prev = mu;
  }
  return 2.0 * mu_prev - 1.0;
}

}  // namespace

SpectralInfo compute_spectral_info(const Graph& g, const FeatureMatrix& x) {
  if (g.num_nodes() < 2)
    throw DataError("spectral info needs at least two nodes");
  if (x.rows() != g.num_nodes())
    throw ParamError("spectral info: feature matrix has wrong row count");
  if (connected_components(g).count() != 1)
    throw DataError("spectral info requires a connected graph");

  SpectralInfo info;
  info.lambda2 =
      g.num_nodes() <= kDenseEigenLimit ? lambda2_dense(g) : lambda2_power(g);
  info.cdx = 0.0;
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    const double dt = static_cast<double>(g.degree(i)) + 1.0;
    const double norm = l2_norm(x.row(i));
    info.cdx += dt * norm * norm;
  }
  return info;
}

std::vector<double> theorem1_bound(const Graph& g, const SpectralInfo& spectral, int k) {
  if (k < 0) throw ParamError("step must be non-negative");
  // Numerical eigensolves can return -1e-16 for an exactly zero lambda2;
  // the decay factor is clamped so the bound stays nonnegative.
  const double lambda = std::max(spectral.lambda2, 0.0);
  const double decay = k == 0 ? 1.0 : std::pow(lambda, k);
  std::vector<double> bound(static_cast<std::size_t>(g.num_nodes()));
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    const double dt = static_cast<double>(g.degree(i)) + 1.0;
    bound[i] = decay * std::sqrt(spectral.cdx / dt);
  }
  return bound;
}

std::vector<std::int64_t> mixing_time_bound(const Graph& g, const FeatureMatrix& x,
                                            const SpectralInfo& spectral,
                                            double epsilon) {
  if (!(epsilon > 0.0)) throw ParamError("epsilon must be positive");
  if (!(spectral.lambda2 > 0.0 && spectral.lambda2 < 1.0))
    throw ParamError("mixing time bound needs lambda2 strictly inside (0, 1)");
  if (x.rows() != g.num_nodes())
    throw ParamError("mixing time: feature matrix has wrong row count");

  double weighted_l1 = 0.0;
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    const double dt = static_cast<double>(g.degree(i)) + 1.0;
    weighted_l1 += dt * l1_norm(x.row(i));
  }

  const double log_lambda = std::log(spectral.lambda2);
  std::vector<std::int64_t> bound(static_cast<std::size_t>(g.num_nodes()), 0);
  if (weighted_l1 == 0.0) return bound;  // all-zero features are already mixed
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    const double dt = static_cast<double>(g.degree(i)) + 1.0;
    const double arg = 2.0 * dt * epsilon / weighted_l1;
    if (arg >= 1.0) continue;
    bound[i] = static_cast<std::int64_t>(std::ceil(std::log(arg) / log_lambda));
    bound[i] = std::max<std::int64_t>(bound[i], 0);
  }
  return bound;
}

DegreeBucketCurves smoothing_speed_report(const Graph& g, const FeatureMatrix& x,
                                          double r, int k_max,
                                          std::span<const std::int64_t> thresholds) {
  if (k_max < 0) throw ParamError("k_max must be non-negative");
  if (!std::is_sorted(thresholds.begin(), thresholds.end()))
    throw ParamError("degree thresholds must be sorted ascending");
  if (x.rows() != g.num_nodes())
    throw ParamError("smoothing speed: feature matrix has wrong row count");

  const NodeId n = g.num_nodes();
  const std::size_t nbuckets = thresholds.size() + 1;
  std::vector<std::size_t> bucket_of(static_cast<std::size_t>(n));
  std::vector<std::int64_t> counts(nbuckets, 0);
  for (NodeId i = 0; i < n; ++i) {
    const auto it = std::upper_bound(thresholds.begin(), thresholds.end(), g.degree(i));
    const std::size_t b = static_cast<std::size_t>(it - thresholds.begin());
    bucket_of[i] = b;
    ++counts[b];
  }

  const NormalizedOperator op(g, r);
  const FeatureMatrix stationary =
      stationary_state(op, x, connected_components(g)).matrix;

  std::vector<std::vector<double>> sums(nbuckets, std::vector<double>(k_max + 1, 0.0));
  FeatureMatrix cur = x;
  FeatureMatrix next;
  for (int k = 0; k <= k_max; ++k) {
    for (NodeId i = 0; i < n; ++i) {
      double s = 0.0;
      const auto a = cur.row(i);
      const auto b = stationary.row(i);
      for (std::size_t c = 0; c < a.size(); ++c) {
        const double d = a[c] - b[c];
        s += d * d;
      }
      sums[bucket_of[i]][k] += std::sqrt(s);
    }
    if (k < k_max) {
      spmm(op, cur, next);
      std::swap(cur, next);
    }
  }

  DegreeBucketCurves curves;
  curves.buckets.resize(nbuckets);
  for (std::size_t b = 0; b < nbuckets; ++b) {
    auto& bucket = curves.buckets[b];
    if (b > 0) bucket.lo = thresholds[b - 1];
    if (b < thresholds.size()) bucket.hi = thresholds[b];
    bucket.count = counts[b];
    if (counts[b] == 0) continue;  // absent, not an error
    bucket.mean_distance.resize(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k)
      bucket.mean_distance[k] = sums[b][k] / static_cast<double>(counts[b]);
  }
  return curves;
}

}  // namespace nafs
