#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nafs/matrix.hpp"

namespace nafs {

struct ClusterResult {
  std::vector<int> assignments;  // per point, in [0, c)
  FeatureMatrix centroids;       // c x dim
  double inertia = 0.0;          // sum of squared distances to assigned centroid
};

// Lloyd's algorithm with k-means++ seeding. Each restart draws from its own
// derived stream; the best-inertia restart wins (ties keep the earliest).
// Iterates to an assignment fixpoint or 300 rounds; an emptied cluster
// seizes the point farthest from its assigned centroid.
ClusterResult kmeans(const FeatureMatrix& z, int c, int restarts, std::uint64_t seed);

struct ClusteringMetrics {
  double acc = 0.0;      // best label-permutation accuracy (Hungarian)
  double nmi = 0.0;      // MI normalized by arithmetic mean of entropies
  double ari = 0.0;      // adjusted Rand index clamped at 0
  double ari_raw = 0.0;  // unclamped adjusted Rand index
};

// Label values may be arbitrary integers; only the induced partitions
// matter. NMI and ARI are exactly symmetric and relabel-invariant (term
// sums are accumulated in a canonical order).
ClusteringMetrics clustering_metrics(std::span<const int> pred, std::span<const int> truth);

}  // namespace nafs
