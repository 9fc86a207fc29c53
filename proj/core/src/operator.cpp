#include "nafs/operator.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nafs/error.hpp"

namespace nafs {

NormalizedOperator::NormalizedOperator(const Graph& g, double r) : graph_(&g), r_(r) {
  if (!(r >= 0.0 && r <= 1.0)) throw ParamError("r must lie in [0, 1]");
  const NodeId n = g.num_nodes();
  dtilde_.resize(static_cast<std::size_t>(n));
  in_scale_.resize(static_cast<std::size_t>(n));
  out_scale_.resize(static_cast<std::size_t>(n));
  for (NodeId i = 0; i < n; ++i) {
    const double dt = static_cast<double>(g.degree(i)) + 1.0;
    dtilde_[i] = dt;
    in_scale_[i] = std::pow(dt, -r);
    out_scale_[i] = std::pow(dt, r - 1.0);
  }
}

double NormalizedOperator::entry(NodeId i, NodeId j) const {
  if (i != j && !graph_->has_edge(i, j)) return 0.0;
  return out_scale_[i] * in_scale_[j];
}

NormalizedOperator normalized_operator(const Graph& g, double r) {
  return NormalizedOperator(g, r);
}

void spmm(const NormalizedOperator& op, const FeatureMatrix& x, FeatureMatrix& out) {
  const Graph& g = *op.graph_;
  const NodeId n = g.num_nodes();
  if (x.rows() != n) throw ParamError("spmm: feature matrix has wrong row count");
  if (&x == &out) throw ParamError("spmm: output must not alias input");
  const std::int64_t f = x.cols();
  if (out.rows() != n || out.cols() != f) out = FeatureMatrix(n, f);

  const double* in_scale = op.in_scale_.data();
  const double* out_scale = op.out_scale_.data();

#pragma omp parallel for schedule(static)
  for (NodeId i = 0; i < n; ++i) {
    auto acc = out.row(i);
    for (double& v : acc) v = 0.0;

    // Accumulate in sorted column order, with the implicit self loop
    // spliced into its sorted position.
    bool self_done = false;
    const auto add = [&](NodeId j) {
      const double s = in_scale[j];
      const auto src = x.row(j);
      for (std::int64_t c = 0; c < f; ++c) acc[c] += s * src[c];
    };
    for (NodeId j : g.neighbors(i)) {
      if (!self_done && j > i) {
        add(i);
        self_done = true;
      }
      add(j);
    }
    if (!self_done) add(i);

    const double scale = out_scale[i];
    for (double& v : acc) v *= scale;
  }
}

FeatureMatrix spmm(const NormalizedOperator& op, const FeatureMatrix& x) {
  FeatureMatrix out;
  spmm(op, x, out);
  return out;
}

void set_max_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

}  // namespace nafs
