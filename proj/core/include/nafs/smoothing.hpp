#pragma once

#include <string>
#include <vector>

#include "nafs/graph.hpp"
#include "nafs/matrix.hpp"
#include "nafs/operator.hpp"

namespace nafs {

// How the per-node, per-step distance D_i(k) is measured.
//   kEuclidStationary: ||[Â^k X]_i - [Â^∞ X]_i||_2, the over-smoothing
//     distance proper. Needs the stationary state.
//   kCosInitial: cosine similarity between [Â^k X]_i and X_i; cheaper, no
//     stationary state, larger still means farther from over-smoothed.
enum class DistanceMode { kEuclidStationary, kCosInitial };

// How the K+1 propagated features are weighted per node.
enum class Weighting { kAdaptive, kNaiveAverage, kSingleHop };

struct SmoothingConfig {
  int k_max = 20;
  DistanceMode distance_mode = DistanceMode::kCosInitial;
  Weighting weighting = Weighting::kAdaptive;
  bool row_normalize_input = true;
};

const char* to_string(DistanceMode mode);
const char* to_string(Weighting weighting);
DistanceMode distance_mode_from_string(const std::string& s);
Weighting weighting_from_string(const std::string& s);

// The materialized sequence X^(0), ..., X^(K). Small-graph and diagnostic
// paths use this; the end-to-end pipeline streams instead.
struct MultiScaleFeatures {
  std::vector<FeatureMatrix> steps;

  int k_max() const { return static_cast<int>(steps.size()) - 1; }
  const FeatureMatrix& at(int k) const { return steps[k]; }
};

// Â^∞ X evaluated per connected component from the closed form
// Â^∞[i,j] = d̃_i^r d̃_j^(1-r) / (2 m_c + n_c), without materializing Â^∞.
struct StationaryState {
  FeatureMatrix matrix;  // n x f
};

struct WeightProfile {
  FeatureMatrix distances;  // n x (K+1); empty when weighting ignores them
  FeatureMatrix weights;    // n x (K+1); every row sums to 1
};

MultiScaleFeatures propagate(const NormalizedOperator& op, const FeatureMatrix& x,
                             int k_max);

StationaryState stationary_state(const NormalizedOperator& op, const FeatureMatrix& x,
                                 const ComponentMap& components);

// n x (K+1) distance matrix. stationary may be null for kCosInitial. A node
// whose feature row is all zeros gets cosine similarity 0 by convention.
FeatureMatrix distance_profile(const MultiScaleFeatures& scales,
                               const StationaryState* stationary, DistanceMode mode);

// Adaptive weights are the per-node softmax of the distances over steps,
// computed with max subtraction. Naive average ignores the values; single
// hop puts all weight on the last step.
WeightProfile smoothing_weights(const FeatureMatrix& distances, Weighting weighting);

// X̂_i = Σ_k w_i(k) [Â^k X]_i.
FeatureMatrix combine(const MultiScaleFeatures& scales, const WeightProfile& profile);

// The full single-operator pipeline. Equivalent to composing the pieces
// above, but streams the propagation so only a constant number of n x f
// buffers live at once (two passes for adaptive weighting, one otherwise).
FeatureMatrix nafs_single(const Graph& g, const FeatureMatrix& x, double r,
                          const SmoothingConfig& cfg);

// Incremental evaluator: after k calls to advance() the embedding for
// maximal step K = k is available in O(n f) without rerunning the pipeline.
// Matches nafs_single up to floating-point reassociation (~1e-12). Used by
// the K sweep.
class PrefixSmoother {
 public:
  PrefixSmoother(const Graph& g, const FeatureMatrix& x, double r,
                 const SmoothingConfig& cfg);

  int step() const { return step_; }
  void advance();
  FeatureMatrix current() const;

 private:
  void fold_current_step();

  NormalizedOperator op_;
  SmoothingConfig cfg_;
  int step_ = 0;
  FeatureMatrix x0_;
  FeatureMatrix stationary_;  // empty unless kEuclidStationary
  FeatureMatrix cur_;
  FeatureMatrix next_;
  FeatureMatrix weighted_sum_;       // Σ_k e^(D(k) - M) X^(k), adaptive
  std::vector<double> weight_total_;  // Σ_k e^(D(k) - M), adaptive
  std::vector<double> running_max_;   // M, adaptive
  FeatureMatrix plain_sum_;           // Σ_k X^(k), naive average
};

}  // namespace nafs
