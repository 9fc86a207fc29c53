#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nafs/graph.hpp"
#include "nafs/matrix.hpp"

namespace nafs {

struct SpectralInfo {
  // Second-largest eigenvalue of the r = 0 operator, obtained from the
  // similar symmetric matrix D̃^(-1/2) Ã D̃^(-1/2).
  double lambda2 = 0.0;
  // Σ_j d̃_j ||X_j||_2^2, the constant in the decay bound.
  double cdx = 0.0;
};

// Dense symmetric eigensolve up to n = 2000, shifted power iteration with
// analytic deflation of the top eigenvector above that (tolerance 1e-8).
// Requires a connected graph with at least two nodes.
SpectralInfo compute_spectral_info(const Graph& g, const FeatureMatrix& x);

// Per-node decay bound lambda2^k * sqrt(cdx / d̃_i) on the euclidean
// over-smoothing distance at step k (r = 0).
std::vector<double> theorem1_bound(const Graph& g, const SpectralInfo& spectral, int k);

// Per-node upper bound ceil(log_lambda2(2 d̃_i eps / Σ_j d̃_j ||X_j||_1)) on
// the first step whose distance stays below eps, clamped at 0. Requires
// lambda2 strictly inside (0, 1).
std::vector<std::int64_t> mixing_time_bound(const Graph& g, const FeatureMatrix& x,
                                            const SpectralInfo& spectral, double epsilon);

// Mean euclidean distance-to-stationary curves stratified by degree.
// thresholds t_1 < ... < t_B carve B+1 buckets: degrees below t_1, each
// [t_b, t_b+1), and at-or-above t_B. Empty buckets carry count 0 and no
// curve.
struct DegreeBucketCurves {
  struct Bucket {
    std::optional<std::int64_t> lo;  // inclusive; nullopt = unbounded below
    std::optional<std::int64_t> hi;  // exclusive; nullopt = unbounded above
    std::int64_t count = 0;
    std::vector<double> mean_distance;  // size k_max + 1 when count > 0
  };
  std::vector<Bucket> buckets;
};

DegreeBucketCurves smoothing_speed_report(const Graph& g, const FeatureMatrix& x,
                                          double r, int k_max,
                                          std::span<const std::int64_t> thresholds);

}  // namespace nafs
