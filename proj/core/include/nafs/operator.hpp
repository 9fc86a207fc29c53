#pragma once

#include "nafs/graph.hpp"
#include "nafs/matrix.hpp"

namespace nafs {

// The smoothing operator D̃^(r-1) (A+I) D̃^(-r) with d̃_i = d_i + 1,
// represented implicitly by the graph plus r. The self loop lives in the
// degree bookkeeping and in the multiply kernel; it is never stored in the
// CSR. r = 0 is row-stochastic, r = 1 column-stochastic, r = 0.5 the
// symmetric normalization.
class NormalizedOperator {
 public:
  NormalizedOperator(const Graph& g, double r);

  const Graph& graph() const { return *graph_; }
  double r() const { return r_; }
  double dtilde(NodeId v) const { return dtilde_[v]; }
  std::span<const double> dtilde() const { return dtilde_; }

  // Implicit matrix entry, diagonal included; 0 where no edge exists.
  double entry(NodeId i, NodeId j) const;

 private:
  const Graph* graph_;
  double r_;
  std::vector<double> dtilde_;
  std::vector<double> in_scale_;   // d̃_j^(-r)
  std::vector<double> out_scale_;  // d̃_i^(r-1)

  friend void spmm(const NormalizedOperator&, const FeatureMatrix&, FeatureMatrix&);
};

NormalizedOperator normalized_operator(const Graph& g, double r);

// out = op * x. Parallel over output rows; within a row the accumulation
// order is fixed (sorted neighbor indices, diagonal in sorted position), so
// results are bit-identical across runs at any thread count. out must not
// alias x.
void spmm(const NormalizedOperator& op, const FeatureMatrix& x, FeatureMatrix& out);
FeatureMatrix spmm(const NormalizedOperator& op, const FeatureMatrix& x);

// Caps the worker count used by row-parallel kernels (0 = implementation
// default). Exposed so front ends need not link OpenMP themselves.
void set_max_threads(int threads);

}  // namespace nafs
