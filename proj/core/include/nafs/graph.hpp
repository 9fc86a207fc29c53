#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nafs {

using NodeId = std::int64_t;
using Edge = std::pair<NodeId, NodeId>;

// Immutable undirected graph in CSR form. The adjacency is symmetric,
// deduplicated and self-loop free; column indices are strictly increasing
// within each row, so sum over degrees is exactly 2m.
class Graph {
 public:
  Graph() = default;

  NodeId num_nodes() const { return n_; }
  std::int64_t num_edges() const { return m_; }

  std::int64_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {cols_.data() + offsets_[v],
            static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
  }

  bool has_edge(NodeId u, NodeId v) const;

  // Every undirected edge once, with u < v, in row-major CSR order.
  std::vector<Edge> edge_list() const;

  friend Graph build_graph(std::span<const Edge> edges, NodeId n);

 private:
  NodeId n_ = 0;
  std::int64_t m_ = 0;
  std::vector<std::int64_t> offsets_ = {0};
  std::vector<NodeId> cols_;
};

// Builds the CSR from an arbitrary edge list: duplicates collapse, self
// loops are dropped, endpoints must lie in [0, n).
Graph build_graph(std::span<const Edge> edges, NodeId n);

struct ComponentMap {
  std::vector<NodeId> component_id;      // per node, ids dense in [0, count)
  std::vector<NodeId> node_count;        // n_c per component
  std::vector<std::int64_t> edge_count;  // m_c per component
  NodeId count() const { return static_cast<NodeId>(node_count.size()); }
};

ComponentMap connected_components(const Graph& g);

// G(n, p) with every unordered pair included independently; geometric
// skipping keeps the cost proportional to the number of edges produced.
Graph generate_er(NodeId n, double p, std::uint64_t seed);

// Edge-list text format: one edge per line, two 0-based integers separated
// by tabs or spaces; lines starting with '#' are ignored. Node count is
// max index + 1 unless overridden.
std::vector<Edge> read_edge_list(const std::string& path, NodeId* max_index = nullptr);
Graph load_graph(const std::string& path, std::optional<NodeId> n_override = std::nullopt);
void write_edge_list(const Graph& g, const std::string& path);

}  // namespace nafs
