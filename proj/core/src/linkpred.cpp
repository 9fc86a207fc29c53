#include "nafs/linkpred.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "nafs/cluster.hpp"
#include "nafs/error.hpp"
#include "nafs/rng.hpp"

namespace nafs {

namespace {

std::uint64_t pair_key(NodeId u, NodeId v, NodeId n) {
  if (u > v) std::swap(u, v);
  return static_cast<std::uint64_t>(u) * static_cast<std::uint64_t>(n) +
         static_cast<std::uint64_t>(v);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

EdgeSplit split_edges(const Graph& g, double val_frac, double test_frac,
                      std::uint64_t seed) {
  if (val_frac < 0.0 || test_frac < 0.0 || val_frac + test_frac >= 1.0)
    throw ParamError("split fractions must be non-negative and sum below 1");

  const NodeId n = g.num_nodes();
  std::vector<Edge> edges = g.edge_list();
  const std::int64_t m = static_cast<std::int64_t>(edges.size());
  const std::int64_t n_val = static_cast<std::int64_t>(std::floor(val_frac * static_cast<double>(m)));
  const std::int64_t n_test = static_cast<std::int64_t>(std::floor(test_frac * static_cast<double>(m)));

  Rng rng(derive_seed(seed, 0));
  // Fisher-Yates; std::shuffle is implementation-defined, this is not.
  for (std::int64_t i = m - 1; i > 0; --i) {
    const std::int64_t j =
        static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(i + 1)));
    std::swap(edges[i], edges[j]);
  }

  EdgeSplit split;
  split.seed = seed;
  split.val_pos.assign(edges.begin(), edges.begin() + n_val);
  split.test_pos.assign(edges.begin() + n_val, edges.begin() + n_val + n_test);
  const std::vector<Edge> train_edges(edges.begin() + n_val + n_test, edges.end());
  split.train_graph = build_graph(train_edges, n);

  // Negatives: uniform non-edges of the ORIGINAL graph, no self loops,
  // distinct, disjoint across the two splits.
  const std::int64_t needed = n_val + n_test;
  if (needed > 0) {
    const std::int64_t all_pairs = n * (n - 1) / 2;
    if (needed > all_pairs - m)
      throw DataError("graph too dense: not enough non-edges to sample negatives");

    std::unordered_set<std::uint64_t> taken;
    taken.reserve(static_cast<std::size_t>(m + needed) * 2);
    for (const auto& [u, v] : g.edge_list()) taken.insert(pair_key(u, v, n));

    Rng neg_rng(derive_seed(seed, 1));
    std::vector<Edge> negatives;
    negatives.reserve(static_cast<std::size_t>(needed));
    std::int64_t attempts = 0;
    const std::int64_t attempt_cap = 1000 * needed + 100000;
    while (static_cast<std::int64_t>(negatives.size()) < needed) {
      if (++attempts > attempt_cap)
        throw DataError("graph too dense: negative sampling failed to converge");
      const NodeId u = static_cast<NodeId>(neg_rng.next_below(static_cast<std::uint64_t>(n)));
      const NodeId v = static_cast<NodeId>(neg_rng.next_below(static_cast<std::uint64_t>(n)));
      if (u == v) continue;
      const std::uint64_t key = pair_key(u, v, n);
      if (!taken.insert(key).second) continue;
      negatives.emplace_back(std::min(u, v), std::max(u, v));
    }
    split.val_neg.assign(negatives.begin(), negatives.begin() + n_val);
    split.test_neg.assign(negatives.begin() + n_val, negatives.end());
  }
  return split;
}

std::vector<double> decode_scores(const FeatureMatrix& z, std::span<const Edge> pairs,
                                  bool normalize_rows) {
  std::vector<double> inv_norm;
  if (normalize_rows) {
    inv_norm.resize(static_cast<std::size_t>(z.rows()));
    for (std::int64_t i = 0; i < z.rows(); ++i) {
      const double norm = l2_norm(z.row(i));
      inv_norm[i] = norm == 0.0 ? 0.0 : 1.0 / norm;
    }
  }

  std::vector<double> scores;
  scores.reserve(pairs.size());
  for (const auto& [u, v] : pairs) {
    if (u < 0 || u >= z.rows() || v < 0 || v >= z.rows())
      throw DataError("decode: node index out of range");
    double d = dot(z.row(u), z.row(v));
    if (normalize_rows) d *= inv_norm[u] * inv_norm[v];
    scores.push_back(sigmoid(d));
  }
  return scores;
}

RankMetrics auc_ap(std::span<const double> pos_scores, std::span<const double> neg_scores) {
  if (pos_scores.empty() || neg_scores.empty())
    throw ParamError("auc_ap: both score sets must be non-empty");

  struct Entry {
    double score;
    bool positive;
  };
  std::vector<Entry> all;
  all.reserve(pos_scores.size() + neg_scores.size());
  for (double s : pos_scores) all.push_back({s, true});
  for (double s : neg_scores) all.push_back({s, false});
  std::sort(all.begin(), all.end(),
            [](const Entry& a, const Entry& b) { return a.score < b.score; });

  // AUC from average ranks (ties share the mean rank of their block).
  double pos_rank_sum = 0.0;
  for (std::size_t lo = 0; lo < all.size();) {
    std::size_t hi = lo;
    while (hi + 1 < all.size() && all[hi + 1].score == all[lo].score) ++hi;
    const double mean_rank = 0.5 * static_cast<double>(lo + 1 + hi + 1);
    for (std::size_t i = lo; i <= hi; ++i) {
      if (all[i].positive) pos_rank_sum += mean_rank;
    }
    lo = hi + 1;
  }
  const double p = static_cast<double>(pos_scores.size());
  const double q = static_cast<double>(neg_scores.size());
  RankMetrics metrics;
  metrics.auc = (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * q);

  // AP by descending sweep; tied scores form one block so precision is
  // evaluated only after the whole block is admitted.
  double ap = 0.0;
  double tp = 0.0, fp = 0.0, recall_prev = 0.0;
  for (std::size_t hi = all.size(); hi > 0;) {
    std::size_t lo = hi;
    while (lo > 1 && all[lo - 2].score == all[hi - 1].score) --lo;
    for (std::size_t i = lo - 1; i < hi; ++i) {
      if (all[i].positive) tp += 1.0;
      else fp += 1.0;
    }
    const double recall = tp / p;
    const double precision = tp / (tp + fp);
    ap += (recall - recall_prev) * precision;
    recall_prev = recall;
    hi = lo - 1;
  }
  metrics.ap = ap;
  return metrics;
}

namespace {

// Non-edge sample for the degenerate zero-fraction mode: as many distinct
// non-edges as exist, capped at `want`.
std::vector<Edge> sample_non_edges(const Graph& g, std::int64_t want, std::uint64_t seed) {
  const NodeId n = g.num_nodes();
  const std::int64_t available = n * (n - 1) / 2 - g.num_edges();
  const std::int64_t target = std::min(want, available);
  if (target <= 0) throw DataError("graph is complete: no non-edges to score against");

  std::unordered_set<std::uint64_t> taken;
  for (const auto& [u, v] : g.edge_list()) taken.insert(pair_key(u, v, n));
  Rng rng(derive_seed(seed, 2));
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(target));

  if (4 * (g.num_edges() + target) > n * (n - 1) / 2) {
    // Dense graph: enumerate, then take a deterministic random subset.
    std::vector<Edge> pool;
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = u + 1; v < n; ++v)
        if (!taken.count(pair_key(u, v, n))) pool.emplace_back(u, v);
    for (std::int64_t i = 0; i < target; ++i) {
      const std::size_t j = static_cast<std::size_t>(
          rng.next_below(static_cast<std::uint64_t>(pool.size() - i)) + i);
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
  } else {
    while (static_cast<std::int64_t>(out.size()) < target) {
      const NodeId u = static_cast<NodeId>(rng.next_below(static_cast<std::uint64_t>(n)));
      const NodeId v = static_cast<NodeId>(rng.next_below(static_cast<std::uint64_t>(n)));
      if (u == v) continue;
      if (!taken.insert(pair_key(u, v, n)).second) continue;
      out.emplace_back(std::min(u, v), std::max(u, v));
    }
  }
  return out;
}

}  // namespace

MetricReport run_linkpred(const Graph& g, const FeatureMatrix& x,
                          const SmoothingConfig& cfg, const EnsembleConfig& ens,
                          const LinkPredConfig& lp) {
  MetricReport report;
  report.task = "linkpred";

  if (lp.val_frac == 0.0 && lp.test_frac == 0.0) {
    // Self-evaluation: embed on the full graph, score its own edges against
    // sampled non-edges.
    const FeatureMatrix z = nafs_ensemble(g, x, cfg, ens);
    const std::vector<Edge> pos = g.edge_list();
    if (pos.empty()) throw DataError("link prediction needs at least one edge");
    const std::vector<Edge> neg =
        sample_non_edges(g, static_cast<std::int64_t>(pos.size()), lp.seed);
    const auto pos_scores = decode_scores(z, pos, lp.normalize_decode);
    const auto neg_scores = decode_scores(z, neg, lp.normalize_decode);
    const RankMetrics rm = auc_ap(pos_scores, neg_scores);
    report.metrics["auc"] = rm.auc;
    report.metrics["ap"] = rm.ap;
    report.config["split"] = "self";
    return report;
  }

  const EdgeSplit split = split_edges(g, lp.val_frac, lp.test_frac, lp.seed);
  const FeatureMatrix z = nafs_ensemble(split.train_graph, x, cfg, ens);

  if (!split.val_pos.empty()) {
    const RankMetrics rm = auc_ap(decode_scores(z, split.val_pos, lp.normalize_decode),
                                  decode_scores(z, split.val_neg, lp.normalize_decode));
    report.metrics["val_auc"] = rm.auc;
    report.metrics["val_ap"] = rm.ap;
  }
  if (!split.test_pos.empty()) {
    const RankMetrics rm = auc_ap(decode_scores(z, split.test_pos, lp.normalize_decode),
                                  decode_scores(z, split.test_neg, lp.normalize_decode));
    report.metrics["test_auc"] = rm.auc;
    report.metrics["test_ap"] = rm.ap;
  }
  return report;
}

namespace {

void rank_rows(std::vector<SweepRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.selection != b.selection) return a.selection > b.selection;
    if (a.k != b.k) return a.k < b.k;
    return static_cast<int>(a.strategy) < static_cast<int>(b.strategy);
  });
}

}  // namespace

std::vector<SweepRow> sweep_linkpred(const Graph& g, const FeatureMatrix& x,
                                     SmoothingConfig cfg, EnsembleConfig ens,
                                     const LinkPredConfig& lp, int k_min, int k_max,
                                     std::span<const EnsembleStrategy> strategies) {
  if (k_min < 0 || k_max < k_min) throw ParamError("invalid K range");
  if (strategies.empty()) throw ParamError("sweep needs at least one strategy");
  if (lp.val_frac <= 0.0)
    throw ParamError("link-prediction sweep needs a non-empty validation split");

  const EdgeSplit split = split_edges(g, lp.val_frac, lp.test_frac, lp.seed);
  if (split.val_pos.empty())
    throw DataError("validation split is empty: too few edges for val_frac=" +
                    std::to_string(lp.val_frac));
  std::vector<SweepRow> rows;

  for (const EnsembleStrategy strategy : strategies) {
    ens.strategy = strategy;
    cfg.k_max = k_max;
    PrefixEnsemble prefix(split.train_graph, x, cfg, ens);
    while (prefix.step() < k_min) prefix.advance();
    for (int k = k_min; k <= k_max; ++k) {
      const FeatureMatrix z = prefix.current();
      const RankMetrics val = auc_ap(decode_scores(z, split.val_pos, lp.normalize_decode),
                                     decode_scores(z, split.val_neg, lp.normalize_decode));
      SweepRow row;
      row.k = k;
      row.strategy = strategy;
      row.selection = val.auc;
      row.metrics["val_auc"] = val.auc;
      row.metrics["val_ap"] = val.ap;
      rows.push_back(std::move(row));
      if (k < k_max) prefix.advance();
    }
  }
  rank_rows(rows);

  // Test metrics come from the winning configuration only.
  if (!rows.empty() && !split.test_pos.empty()) {
    SweepRow& best = rows.front();
    ens.strategy = best.strategy;
    cfg.k_max = best.k;
    const FeatureMatrix z = nafs_ensemble(split.train_graph, x, cfg, ens);
    const RankMetrics test = auc_ap(decode_scores(z, split.test_pos, lp.normalize_decode),
                                    decode_scores(z, split.test_neg, lp.normalize_decode));
    best.metrics["test_auc"] = test.auc;
    best.metrics["test_ap"] = test.ap;
  }
  return rows;
}

std::vector<SweepRow> sweep_cluster(const Graph& g, const FeatureMatrix& x,
                                    SmoothingConfig cfg, EnsembleConfig ens,
                                    std::span<const int> labels, int clusters,
                                    int restarts, int repeats, std::uint64_t seed,
                                    int k_min, int k_max,
                                    std::span<const EnsembleStrategy> strategies) {
  if (k_min < 0 || k_max < k_min) throw ParamError("invalid K range");
  if (strategies.empty()) throw ParamError("sweep needs at least one strategy");
  if (repeats < 1) throw ParamError("repeats must be at least 1");
  if (static_cast<std::int64_t>(labels.size()) != g.num_nodes())
    throw DataError("label count does not match node count");

  std::vector<SweepRow> rows;
  for (const EnsembleStrategy strategy : strategies) {
    ens.strategy = strategy;
    cfg.k_max = k_max;
    PrefixEnsemble prefix(g, x, cfg, ens);
    while (prefix.step() < k_min) prefix.advance();
    for (int k = k_min; k <= k_max; ++k) {
      const FeatureMatrix z = prefix.current();
      double acc_sum = 0.0, nmi_sum = 0.0, ari_sum = 0.0;
      for (int rep = 0; rep < repeats; ++rep) {
        const ClusterResult result =
            kmeans(z, clusters, restarts, derive_seed(seed, static_cast<std::uint64_t>(rep)));
        const ClusteringMetrics cm = clustering_metrics(result.assignments, labels);
        acc_sum += cm.acc;
        nmi_sum += cm.nmi;
        ari_sum += cm.ari;
      }
      SweepRow row;
      row.k = k;
      row.strategy = strategy;
      row.selection = nmi_sum / repeats;
      row.metrics["acc"] = acc_sum / repeats;
      row.metrics["nmi"] = nmi_sum / repeats;
      row.metrics["ari"] = ari_sum / repeats;
      rows.push_back(std::move(row));
      if (k < k_max) prefix.advance();
    }
  }
  rank_rows(rows);
  return rows;
}

}  // namespace nafs
