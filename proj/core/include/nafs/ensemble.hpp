#pragma once

#include <string>
#include <vector>

#include "nafs/graph.hpp"
#include "nafs/matrix.hpp"
#include "nafs/smoothing.hpp"

namespace nafs {

enum class EnsembleStrategy { kMean, kMax, kConcat };

const char* to_string(EnsembleStrategy s);
EnsembleStrategy ensemble_strategy_from_string(const std::string& s);

struct EnsembleConfig {
  std::vector<double> r_values = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  EnsembleStrategy strategy = EnsembleStrategy::kMean;
  // Branches run sequentially unless this is set; output is identical
  // either way since pooling happens in r_values order.
  bool parallel_branches = false;
  // Optional L2 row normalization of the pooled embedding.
  bool post_normalize = false;
};

// Runs nafs_single once per r value and pools the branches: element-wise
// mean or max (n x f), or column-wise concatenation in r_values order
// (n x T*f).
FeatureMatrix nafs_ensemble(const Graph& g, const FeatureMatrix& x,
                            const SmoothingConfig& cfg, const EnsembleConfig& ens);

// Lockstep PrefixSmoother across all branches; current() pools them at the
// present step. Powers the K sweep without recomputation per K.
class PrefixEnsemble {
 public:
  PrefixEnsemble(const Graph& g, const FeatureMatrix& x, const SmoothingConfig& cfg,
                 const EnsembleConfig& ens);

  int step() const;
  void advance();
  FeatureMatrix current() const;

 private:
  EnsembleConfig ens_;
  std::vector<PrefixSmoother> branches_;
};

}  // namespace nafs
