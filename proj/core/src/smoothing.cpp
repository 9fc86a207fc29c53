#include "nafs/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "nafs/error.hpp"

namespace nafs {

const char* to_string(DistanceMode mode) {
  return mode == DistanceMode::kEuclidStationary ? "euclid-stationary" : "cos-initial";
}

const char* to_string(Weighting weighting) {
  switch (weighting) {
    case Weighting::kAdaptive: return "adaptive";
    case Weighting::kNaiveAverage: return "naive";
    case Weighting::kSingleHop: return "single-hop";
  }
  return "?";
}

DistanceMode distance_mode_from_string(const std::string& s) {
  if (s == "euclid-stationary") return DistanceMode::kEuclidStationary;
  if (s == "cos-initial") return DistanceMode::kCosInitial;
  throw ParamError("unknown distance mode: " + s);
}

Weighting weighting_from_string(const std::string& s) {
  if (s == "adaptive") return Weighting::kAdaptive;
  if (s == "naive" || s == "naive-average") return Weighting::kNaiveAverage;
  if (s == "single-hop") return Weighting::kSingleHop;
  throw ParamError("unknown weighting: " + s);
}

MultiScaleFeatures propagate(const NormalizedOperator& op, const FeatureMatrix& x,
                             int k_max) {
  if (k_max < 0) throw ParamError("k_max must be non-negative");
  if (x.rows() != op.graph().num_nodes())
    throw ParamError("propagate: feature matrix has wrong row count");
  MultiScaleFeatures scales;
  scales.steps.reserve(static_cast<std::size_t>(k_max) + 1);
  scales.steps.push_back(x);
  for (int k = 1; k <= k_max; ++k) scales.steps.push_back(spmm(op, scales.steps.back()));
  return scales;
}

StationaryState stationary_state(const NormalizedOperator& op, const FeatureMatrix& x,
                                 const ComponentMap& components) {
  const Graph& g = op.graph();
  const NodeId n = g.num_nodes();
  if (x.rows() != n) throw ParamError("stationary_state: feature matrix has wrong row count");
  const std::int64_t f = x.cols();
  const double r = op.r();

  // Per-component weighted feature sum Σ_j d̃_j^(1-r) X_j, then the
  // per-node d̃_i^r / (2 m_c + n_c) scaling.
  const NodeId c = components.count();
  FeatureMatrix sums(c, f, 0.0);
  for (NodeId i = 0; i < n; ++i) {
    const double w = std::pow(op.dtilde(i), 1.0 - r);
    auto dst = sums.row(components.component_id[i]);
    const auto src = x.row(i);
    for (std::int64_t j = 0; j < f; ++j) dst[j] += w * src[j];
  }

  StationaryState state;
  state.matrix = FeatureMatrix(n, f);
  for (NodeId i = 0; i < n; ++i) {
    const NodeId comp = components.component_id[i];
    const double denom =
        2.0 * static_cast<double>(components.edge_count[comp]) +
        static_cast<double>(components.node_count[comp]);
    const double scale = std::pow(op.dtilde(i), r) / denom;
    auto dst = state.matrix.row(i);
    const auto src = sums.row(comp);
    for (std::int64_t j = 0; j < f; ++j) dst[j] = scale * src[j];
  }
  return state;
}

namespace {

double euclid_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// Cosine similarity with the zero-vector convention: any zero vector
// yields 0.
double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

void distance_column(const FeatureMatrix& step, const FeatureMatrix& reference,
                     DistanceMode mode, std::int64_t k, FeatureMatrix& distances) {
#pragma omp parallel for schedule(static)
  for (NodeId i = 0; i < step.rows(); ++i) {
    distances(i, k) = mode == DistanceMode::kEuclidStationary
                          ? euclid_distance(step.row(i), reference.row(i))
                          : cosine_similarity(step.row(i), reference.row(i));
  }
}

}  // namespace

FeatureMatrix distance_profile(const MultiScaleFeatures& scales,
                               const StationaryState* stationary, DistanceMode mode) {
  if (scales.steps.empty()) throw ParamError("distance_profile: empty scale stack");
  const FeatureMatrix& x0 = scales.steps.front();
  if (mode == DistanceMode::kEuclidStationary) {
    if (stationary == nullptr)
      throw ParamError("distance_profile: euclid-stationary mode needs the stationary state");
    if (stationary->matrix.rows() != x0.rows() || stationary->matrix.cols() != x0.cols())
      throw ParamError("distance_profile: stationary state has wrong shape");
  }
  const FeatureMatrix& reference =
      mode == DistanceMode::kEuclidStationary ? stationary->matrix : x0;

  FeatureMatrix distances(x0.rows(), scales.k_max() + 1);
  for (int k = 0; k <= scales.k_max(); ++k)
    distance_column(scales.at(k), reference, mode, k, distances);
  return distances;
}

WeightProfile smoothing_weights(const FeatureMatrix& distances, Weighting weighting) {
  const std::int64_t n = distances.rows();
  const std::int64_t steps = distances.cols();
  if (steps < 1) throw ParamError("smoothing_weights: need at least one step");
  for (double v : distances.data()) {
    if (std::isnan(v)) throw DataError("smoothing_weights: NaN distance");
  }

  WeightProfile profile;
  profile.distances = distances;
  profile.weights = FeatureMatrix(n, steps);

  switch (weighting) {
    case Weighting::kAdaptive:
      for (std::int64_t i = 0; i < n; ++i) {
        const auto d = distances.row(i);
        auto w = profile.weights.row(i);
        const double m = *std::max_element(d.begin(), d.end());
        double total = 0.0;
        for (std::int64_t k = 0; k < steps; ++k) {
          w[k] = std::exp(d[k] - m);
          total += w[k];
        }
        for (double& v : w) v /= total;
      }
      break;
    case Weighting::kNaiveAverage: {
      const double uniform = 1.0 / static_cast<double>(steps);
      for (double& v : profile.weights.data()) v = uniform;
      break;
    }
    case Weighting::kSingleHop:
      for (std::int64_t i = 0; i < n; ++i) profile.weights(i, steps - 1) = 1.0;
      break;
  }
  return profile;
}

FeatureMatrix combine(const MultiScaleFeatures& scales, const WeightProfile& profile) {
  const FeatureMatrix& x0 = scales.steps.front();
  const int k_max = scales.k_max();
  if (profile.weights.rows() != x0.rows() || profile.weights.cols() != k_max + 1)
    throw ParamError("combine: weight profile shape does not match the scale stack");

  FeatureMatrix out(x0.rows(), x0.cols(), 0.0);
  for (int k = 0; k <= k_max; ++k) {
    const FeatureMatrix& step = scales.at(k);
#pragma omp parallel for schedule(static)
    for (NodeId i = 0; i < out.rows(); ++i) {
      const double w = profile.weights(i, k);
      auto dst = out.row(i);
      const auto src = step.row(i);
      for (std::int64_t c = 0; c < out.cols(); ++c) dst[c] += w * src[c];
    }
  }
  return out;
}

namespace {

FeatureMatrix prepared_input(const FeatureMatrix& x, const SmoothingConfig& cfg) {
  FeatureMatrix x0 = x;
  if (cfg.row_normalize_input) x0.l2_normalize_rows();
  return x0;
}

}  // namespace

FeatureMatrix nafs_single(const Graph& g, const FeatureMatrix& x, double r,
                          const SmoothingConfig& cfg) {
  if (cfg.k_max < 0) throw ParamError("k_max must be non-negative");
  if (x.rows() != g.num_nodes())
    throw ParamError("nafs_single: feature matrix has wrong row count");

  const NormalizedOperator op(g, r);
  const FeatureMatrix x0 = prepared_input(x, cfg);
  const int k_max = cfg.k_max;

  if (cfg.weighting == Weighting::kSingleHop) {
    // Only the last step survives; no distances needed.
    FeatureMatrix cur = x0;
    FeatureMatrix next;
    for (int k = 1; k <= k_max; ++k) {
      spmm(op, cur, next);
      std::swap(cur, next);
    }
    return cur;
  }

  FeatureMatrix stationary;
  if (cfg.distance_mode == DistanceMode::kEuclidStationary &&
      cfg.weighting == Weighting::kAdaptive) {
    stationary = stationary_state(op, x0, connected_components(g)).matrix;
  }
  const FeatureMatrix& reference =
      cfg.distance_mode == DistanceMode::kEuclidStationary ? stationary : x0;

  // Pass 1 (adaptive only): stream the propagation to collect distances.
  FeatureMatrix weights;
  if (cfg.weighting == Weighting::kAdaptive) {
    FeatureMatrix distances(x0.rows(), k_max + 1);
    FeatureMatrix cur = x0;
    FeatureMatrix next;
    for (int k = 0; k <= k_max; ++k) {
      distance_column(cur, reference, cfg.distance_mode, k, distances);
      if (k < k_max) {
        spmm(op, cur, next);
        std::swap(cur, next);
      }
    }
    weights = smoothing_weights(distances, Weighting::kAdaptive).weights;
  } else {
    weights = smoothing_weights(FeatureMatrix(x0.rows(), k_max + 1, 0.0),
                                Weighting::kNaiveAverage)
                  .weights;
  }

  // Pass 2: stream again, accumulating the weighted combination.
  FeatureMatrix acc(x0.rows(), x0.cols(), 0.0);
  FeatureMatrix cur = x0;
  FeatureMatrix next;
  for (int k = 0; k <= k_max; ++k) {
#pragma omp parallel for schedule(static)
    for (NodeId i = 0; i < acc.rows(); ++i) {
      const double w = weights(i, k);
      auto dst = acc.row(i);
      const auto src = cur.row(i);
      for (std::int64_t c = 0; c < acc.cols(); ++c) dst[c] += w * src[c];
    }
    if (k < k_max) {
      spmm(op, cur, next);
      std::swap(cur, next);
    }
  }
  return acc;
}

PrefixSmoother::PrefixSmoother(const Graph& g, const FeatureMatrix& x, double r,
                               const SmoothingConfig& cfg)
    : op_(g, r), cfg_(cfg), x0_(prepared_input(x, cfg)) {
  if (x.rows() != g.num_nodes())
    throw ParamError("PrefixSmoother: feature matrix has wrong row count");
  cur_ = x0_;
  switch (cfg_.weighting) {
    case Weighting::kAdaptive:
      if (cfg_.distance_mode == DistanceMode::kEuclidStationary)
        stationary_ = stationary_state(op_, x0_, connected_components(g)).matrix;
      weighted_sum_ = FeatureMatrix(x0_.rows(), x0_.cols(), 0.0);
      weight_total_.assign(static_cast<std::size_t>(x0_.rows()), 0.0);
      running_max_.assign(static_cast<std::size_t>(x0_.rows()),
                          -std::numeric_limits<double>::infinity());
      break;
    case Weighting::kNaiveAverage:
      plain_sum_ = FeatureMatrix(x0_.rows(), x0_.cols(), 0.0);
      break;
    case Weighting::kSingleHop:
      break;
  }
  fold_current_step();
}

void PrefixSmoother::advance() {
  spmm(op_, cur_, next_);
  std::swap(cur_, next_);
  ++step_;
  fold_current_step();
}

// Online softmax: fold step k into Σ e^(D - M) X^(k) and Σ e^(D - M),
// rescaling both whenever a new per-node maximum M appears.
void PrefixSmoother::fold_current_step() {
  const std::int64_t f = x0_.cols();
  switch (cfg_.weighting) {
    case Weighting::kAdaptive: {
      const FeatureMatrix& reference =
          cfg_.distance_mode == DistanceMode::kEuclidStationary ? stationary_ : x0_;
#pragma omp parallel for schedule(static)
      for (NodeId i = 0; i < x0_.rows(); ++i) {
        const double d = cfg_.distance_mode == DistanceMode::kEuclidStationary
                             ? euclid_distance(cur_.row(i), reference.row(i))
                             : cosine_similarity(cur_.row(i), reference.row(i));
        if (std::isnan(d)) continue;  // cannot happen for finite inputs
        auto sum = weighted_sum_.row(i);
        if (d > running_max_[i]) {
          const double rescale =
              std::isinf(running_max_[i]) ? 0.0 : std::exp(running_max_[i] - d);
          for (double& v : sum) v *= rescale;
          weight_total_[i] *= rescale;
          running_max_[i] = d;
        }
        const double w = std::exp(d - running_max_[i]);
        const auto src = cur_.row(i);
        for (std::int64_t c = 0; c < f; ++c) sum[c] += w * src[c];
        weight_total_[i] += w;
      }
      break;
    }
    case Weighting::kNaiveAverage: {
      auto dst = plain_sum_.data();
      const auto src = cur_.data();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
      break;
    }
    case Weighting::kSingleHop:
      break;
  }
}

FeatureMatrix PrefixSmoother::current() const {
  switch (cfg_.weighting) {
    case Weighting::kAdaptive: {
      FeatureMatrix out(x0_.rows(), x0_.cols());
      for (NodeId i = 0; i < out.rows(); ++i) {
        const double inv = 1.0 / weight_total_[i];
        auto dst = out.row(i);
        const auto src = weighted_sum_.row(i);
        for (std::int64_t c = 0; c < out.cols(); ++c) dst[c] = src[c] * inv;
      }
      return out;
    }
    case Weighting::kNaiveAverage: {
      FeatureMatrix out = plain_sum_;
      const double inv = 1.0 / static_cast<double>(step_ + 1);
      for (double& v : out.data()) v *= inv;
      return out;
    }
    case Weighting::kSingleHop:
      return cur_;
  }
  return cur_;
}

}  // namespace nafs
