#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nafs/ensemble.hpp"
#include "nafs/graph.hpp"
#include "nafs/io.hpp"
#include "nafs/matrix.hpp"
#include "nafs/smoothing.hpp"

namespace nafs {

struct EdgeSplit {
  Graph train_graph;           // original minus val/test positives
  std::vector<Edge> val_pos;
  std::vector<Edge> val_neg;
  std::vector<Edge> test_pos;
  std::vector<Edge> test_neg;
  std::uint64_t seed = 0;
};

// Reserves floor(val_frac*m) and floor(test_frac*m) edges uniformly without
// replacement. Negatives are sampled from the non-edges of the ORIGINAL
// graph (no self loops), one per positive, disjoint across the two splits.
EdgeSplit split_edges(const Graph& g, double val_frac, double test_frac,
                      std::uint64_t seed);

// sigmoid(Z_u . Z_v) per pair; rows are L2-normalized first when
// normalize_rows is set (zero rows score as zero vectors).
std::vector<double> decode_scores(const FeatureMatrix& z, std::span<const Edge> pairs,
                                  bool normalize_rows = true);

struct RankMetrics {
  double auc = 0.0;
  double ap = 0.0;
};

// AUC from rank statistics with ties counted half; AP by descending-score
// sweep with tied scores grouped.
RankMetrics auc_ap(std::span<const double> pos_scores, std::span<const double> neg_scores);

struct LinkPredConfig {
  double val_frac = 0.05;
  double test_frac = 0.10;
  std::uint64_t seed = 42;
  bool normalize_decode = true;
};

// Split, embed on the train graph only, score, report. With both fractions
// zero this degenerates to self-evaluation: the original edges against an
// equal number of sampled non-edges (fewer if the graph is nearly complete).
MetricReport run_linkpred(const Graph& g, const FeatureMatrix& x,
                          const SmoothingConfig& cfg, const EnsembleConfig& ens,
                          const LinkPredConfig& lp);

struct SweepRow {
  int k = 0;
  EnsembleStrategy strategy = EnsembleStrategy::kMean;
  double selection = 0.0;                  // val AUC or mean NMI
  std::map<std::string, double> metrics;
};

// Evaluates every K in [k_min, k_max] for each strategy on the validation
// split, using one incremental propagation per strategy. Rows come back
// ranked by the selection metric (ties: smaller K first); test metrics are
// attached only to the winning row.
std::vector<SweepRow> sweep_linkpred(const Graph& g, const FeatureMatrix& x,
                                     SmoothingConfig cfg, EnsembleConfig ens,
                                     const LinkPredConfig& lp, int k_min, int k_max,
                                     std::span<const EnsembleStrategy> strategies);

// Same sweep shape for clustering; selection metric is the mean NMI over
// `repeats` seeded k-means runs.
std::vector<SweepRow> sweep_cluster(const Graph& g, const FeatureMatrix& x,
                                    SmoothingConfig cfg, EnsembleConfig ens,
                                    std::span<const int> labels, int clusters,
                                    int restarts, int repeats, std::uint64_t seed,
                                    int k_min, int k_max,
                                    std::span<const EnsembleStrategy> strategies);

}  // namespace nafs
