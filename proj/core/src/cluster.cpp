#include "nafs/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "nafs/error.hpp"
#include "nafs/rng.hpp"

namespace nafs {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

struct LloydState {
  std::vector<int> assignments;
  FeatureMatrix centroids;
  double inertia = 0.0;
};

void kmeanspp_init(const FeatureMatrix& z, int c, Rng& rng, FeatureMatrix& centroids) {
  const std::int64_t n = z.rows();
  std::vector<double> best_sq(static_cast<std::size_t>(n),
                              std::numeric_limits<double>::infinity());

  std::int64_t first = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(n)));
  std::copy_n(z.row(first).begin(), z.cols(), centroids.row(0).begin());

  for (int k = 1; k < c; ++k) {
    const auto prev = centroids.row(k - 1);
    double total = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      best_sq[i] = std::min(best_sq[i], squared_distance(z.row(i), prev));
      total += best_sq[i];
    }
    std::int64_t chosen;
    if (total > 0.0) {
      // D^2 sampling via a single uniform draw over the cumulative mass.
      const double target = rng.next_unit() * total;
      double cum = 0.0;
      chosen = n - 1;
      for (std::int64_t i = 0; i < n; ++i) {
        cum += best_sq[i];
        if (cum > target) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(n)));
    }
    std::copy_n(z.row(chosen).begin(), z.cols(), centroids.row(k).begin());
  }
}

LloydState lloyd(const FeatureMatrix& z, int c, Rng& rng) {
  const std::int64_t n = z.rows();
  const std::int64_t dim = z.cols();
  constexpr int kMaxIterations = 300;

  LloydState state;
  state.centroids = FeatureMatrix(c, dim);
  kmeanspp_init(z, c, rng, state.centroids);
  state.assignments.assign(static_cast<std::size_t>(n), -1);

  std::vector<std::int64_t> sizes(static_cast<std::size_t>(c), 0);
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    // Assignment is per-point independent: parallel and bit-deterministic.
    bool changed = false;
#pragma omp parallel for schedule(static) reduction(|| : changed)
    for (std::int64_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = squared_distance(z.row(i), state.centroids.row(0));
      for (int k = 1; k < c; ++k) {
        const double d = squared_distance(z.row(i), state.centroids.row(k));
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      if (best != state.assignments[i]) {
        state.assignments[i] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    std::fill(sizes.begin(), sizes.end(), 0);
    for (double& v : state.centroids.data()) v = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      const int k = state.assignments[i];
      ++sizes[k];
      auto dst = state.centroids.row(k);
      const auto src = z.row(i);
      for (std::int64_t j = 0; j < dim; ++j) dst[j] += src[j];
    }

    // Repair empty clusters before dividing: each one seizes the point
    // currently farthest from its assigned centroid.
    for (int k = 0; k < c; ++k) {
      if (sizes[k] > 0) continue;
      std::int64_t farthest = -1;
      double worst = -1.0;
      for (std::int64_t i = 0; i < n; ++i) {
        const int a = state.assignments[i];
        if (sizes[a] <= 1) continue;  // never empty a singleton cluster
        double pending = 0.0;
        const auto centroid_sum = state.centroids.row(a);
        const auto p = z.row(i);
        for (std::int64_t j = 0; j < dim; ++j) {
          const double d = p[j] - centroid_sum[j] / static_cast<double>(sizes[a]);
          pending += d * d;
        }
        if (pending > worst) {
          worst = pending;
          farthest = i;
        }
      }
      if (farthest < 0) continue;  // degenerate data; leave centroid as zeros
      const int old = state.assignments[farthest];
      auto from = state.centroids.row(old);
      auto to = state.centroids.row(k);
      const auto p = z.row(farthest);
      for (std::int64_t j = 0; j < dim; ++j) {
        from[j] -= p[j];
        to[j] += p[j];
      }
      --sizes[old];
      sizes[k] = 1;
      state.assignments[farthest] = k;
      changed = true;
    }

    for (int k = 0; k < c; ++k) {
      if (sizes[k] == 0) continue;
      const double inv = 1.0 / static_cast<double>(sizes[k]);
      for (double& v : state.centroids.row(k)) v *= inv;
    }
  }

  state.inertia = 0.0;
  for (std::int64_t i = 0; i < n; ++i)
    state.inertia += squared_distance(z.row(i), state.centroids.row(state.assignments[i]));
  return state;
}

}  // namespace

ClusterResult kmeans(const FeatureMatrix& z, int c, int restarts, std::uint64_t seed) {
  if (c < 1) throw ParamError("cluster count must be at least 1");
  if (restarts < 1) throw ParamError("restart count must be at least 1");
  if (static_cast<std::int64_t>(c) > z.rows())
    throw ParamError("cluster count exceeds number of points");

  ClusterResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < restarts; ++restart) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(restart)));
    LloydState state = lloyd(z, c, rng);
    if (state.inertia < best.inertia) {
      best.inertia = state.inertia;
      best.assignments = std::move(state.assignments);
      best.centroids = std::move(state.centroids);
    }
  }
  return best;
}

namespace {

// Dense contingency table over the remapped label ids.
struct Contingency {
  std::vector<std::int64_t> cell;  // a x b row-major
  std::vector<std::int64_t> row_sum;
  std::vector<std::int64_t> col_sum;
  std::int64_t total = 0;
  std::size_t a = 0, b = 0;
};

std::vector<int> remap(std::span<const int> labels, std::size_t* count) {
  std::map<int, int> ids;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto [it, inserted] = ids.emplace(labels[i], static_cast<int>(ids.size()));
    out[i] = it->second;
  }
  *count = ids.size();
  return out;
}

Contingency contingency(std::span<const int> pred, std::span<const int> truth) {
  Contingency table;
  const auto p = remap(pred, &table.a);
  const auto t = remap(truth, &table.b);
  table.cell.assign(table.a * table.b, 0);
  table.row_sum.assign(table.a, 0);
  table.col_sum.assign(table.b, 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    ++table.cell[static_cast<std::size_t>(p[i]) * table.b + t[i]];
    ++table.row_sum[p[i]];
    ++table.col_sum[t[i]];
    ++table.total;
  }
  return table;
}

// Hungarian algorithm (Jonker-Volgenant style potentials) minimizing an
// integer cost matrix; returns the optimal assignment cost.
std::int64_t hungarian_min_cost(const std::vector<std::int64_t>& cost, std::size_t n) {
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0);
  std::vector<std::size_t> match(n + 1, 0);  // matched row per column (1-based)
  std::vector<std::size_t> way(n + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<std::int64_t> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      std::int64_t delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const std::int64_t cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::int64_t total = 0;
  for (std::size_t j = 1; j <= n; ++j) {
    if (match[j] != 0) total += cost[(match[j] - 1) * n + (j - 1)];
  }
  return total;
}

double accuracy(const Contingency& table) {
  const std::size_t s = std::max(table.a, table.b);
  std::int64_t max_cell = 0;
  for (std::int64_t c : table.cell) max_cell = std::max(max_cell, c);

  // Maximize matched counts by minimizing (max_cell - count) on a padded
  // square matrix.
  std::vector<std::int64_t> cost(s * s, max_cell);
  for (std::size_t i = 0; i < table.a; ++i)
    for (std::size_t j = 0; j < table.b; ++j)
      cost[i * s + j] = max_cell - table.cell[i * table.b + j];
  const std::int64_t matched =
      static_cast<std::int64_t>(s) * max_cell - hungarian_min_cost(cost, s);
  return static_cast<double>(matched) / static_cast<double>(table.total);
}

// Sums are accumulated over sorted terms so that transposing or relabeling
// the contingency (which only permutes the term multiset) yields the exact
// same value.
double sorted_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

double entropy(const std::vector<std::int64_t>& counts, std::int64_t total) {
  std::vector<double> terms;
  terms.reserve(counts.size());
  for (std::int64_t c : counts) {
    if (c <= 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    terms.push_back(-p * std::log(p));
  }
  return sorted_sum(terms);
}

double nmi(const Contingency& table) {
  const double h_pred = entropy(table.row_sum, table.total);
  const double h_truth = entropy(table.col_sum, table.total);
  const double denom = 0.5 * (h_pred + h_truth);
  if (denom == 0.0) return 1.0;  // both partitions trivial, hence identical

  std::vector<double> terms;
  terms.reserve(table.cell.size());
  const double n = static_cast<double>(table.total);
  for (std::size_t i = 0; i < table.a; ++i) {
    for (std::size_t j = 0; j < table.b; ++j) {
      const std::int64_t c = table.cell[i * table.b + j];
      if (c <= 0) continue;
      const double pij = static_cast<double>(c) / n;
      terms.push_back(pij * std::log(n * static_cast<double>(c) /
                                     (static_cast<double>(table.row_sum[i]) *
                                      static_cast<double>(table.col_sum[j]))));
    }
  }
  const double mi = sorted_sum(terms);
  return std::clamp(mi / denom, 0.0, 1.0);
}

std::int64_t pairs2(std::int64_t x) { return x * (x - 1) / 2; }

double ari_raw_value(const Contingency& table) {
  std::int64_t sum_cells = 0;
  for (std::int64_t c : table.cell) sum_cells += pairs2(c);
  std::int64_t sum_rows = 0;
  for (std::int64_t c : table.row_sum) sum_rows += pairs2(c);
  std::int64_t sum_cols = 0;
  for (std::int64_t c : table.col_sum) sum_cols += pairs2(c);
  const std::int64_t all = pairs2(table.total);
  if (all == 0) return 1.0;

  const double expected =
      static_cast<double>(sum_rows) * static_cast<double>(sum_cols) / static_cast<double>(all);
  const double max_index = 0.5 * static_cast<double>(sum_rows + sum_cols);
  const double denom = max_index - expected;
  if (denom == 0.0) return 1.0;  // both partitions degenerate in the same way
  return (static_cast<double>(sum_cells) - expected) / denom;
}

}  // namespace

ClusteringMetrics clustering_metrics(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size())
    throw ParamError("clustering metrics: prediction and truth lengths differ");
  if (pred.empty()) throw ParamError("clustering metrics: empty labelings");

  const Contingency table = contingency(pred, truth);
  ClusteringMetrics metrics;
  metrics.acc = accuracy(table);
  metrics.nmi = nmi(table);
  metrics.ari_raw = ari_raw_value(table);
  metrics.ari = std::clamp(metrics.ari_raw, 0.0, 1.0);
  return metrics;
}

}  // namespace nafs
