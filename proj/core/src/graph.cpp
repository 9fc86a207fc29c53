#include "nafs/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nafs/error.hpp"
#include "nafs/rng.hpp"

namespace nafs {

bool Graph::has_edge(NodeId u, NodeId v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edge_list() const {
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m_));
  for (NodeId u = 0; u < n_; ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) edges.emplace_back(u, v);
    }
  }
  return edges;
}

Graph build_graph(std::span<const Edge> edges, NodeId n) {
  if (n < 0) throw ParamError("node count must be non-negative");
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto [u, v] = edges[k];
    if (u < 0 || u >= n || v < 0 || v >= n) {
      throw DataError("edge " + std::to_string(k) + ": node index " +
                      std::to_string(u < 0 || u >= n ? u : v) +
                      " out of range (n=" + std::to_string(n) + ")");
    }
  }

  std::vector<std::int64_t> counts(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& [u, v] : edges) {
    if (u == v) continue;
    ++counts[u + 1];
    ++counts[v + 1];
  }
  for (NodeId i = 0; i < n; ++i) counts[i + 1] += counts[i];

  std::vector<NodeId> cols(static_cast<std::size_t>(counts[n]));
  std::vector<std::int64_t> cursor(counts.begin(), counts.end() - 1);
  for (const auto& [u, v] : edges) {
    if (u == v) continue;
    cols[cursor[u]++] = v;
    cols[cursor[v]++] = u;
  }

  // Sort and deduplicate each row, compacting in place.
  Graph g;
  g.n_ = n;
  g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  std::int64_t write = 0;
  for (NodeId i = 0; i < n; ++i) {
    const auto first = cols.begin() + counts[i];
    const auto last = cols.begin() + counts[i + 1];
    std::sort(first, last);
    const auto end = std::unique(first, last);
    for (auto it = first; it != end; ++it) cols[write++] = *it;
    g.offsets_[i + 1] = write;
  }
  cols.resize(static_cast<std::size_t>(write));
  cols.shrink_to_fit();
  g.cols_ = std::move(cols);
  g.m_ = write / 2;
  return g;
}

ComponentMap connected_components(const Graph& g) {
  const NodeId n = g.num_nodes();
  ComponentMap map;
  map.component_id.assign(static_cast<std::size_t>(n), -1);

  std::vector<NodeId> queue;
  for (NodeId start = 0; start < n; ++start) {
    if (map.component_id[start] != -1) continue;
    const NodeId id = map.count();
    map.node_count.push_back(0);
    map.edge_count.push_back(0);

    queue.clear();
    queue.push_back(start);
    map.component_id[start] = id;
    std::size_t head = 0;
    std::int64_t degree_sum = 0;
    while (head < queue.size()) {
      const NodeId u = queue[head++];
      ++map.node_count[id];
      degree_sum += g.degree(u);
      for (NodeId v : g.neighbors(u)) {
        if (map.component_id[v] == -1) {
          map.component_id[v] = id;
          queue.push_back(v);
        }
      }
    }
    map.edge_count[id] = degree_sum / 2;
  }
  return map;
}

Graph generate_er(NodeId n, double p, std::uint64_t seed) {
  if (n < 0) throw ParamError("node count must be non-negative");
  if (p < 0.0 || p > 1.0) throw ParamError("edge probability must lie in [0, 1]");

  std::vector<Edge> edges;
  if (n >= 2 && p > 0.0) {
    if (p >= 1.0) {
      edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
      for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v) edges.emplace_back(u, v);
    } else {
      // Geometric skipping over the strictly-lower-triangular pair order.
      Rng rng(seed);
      const double log_q = std::log1p(-p);
      NodeId v = 1;
      std::int64_t w = -1;
      while (v < n) {
        const double r = rng.next_unit();
        w += 1 + static_cast<std::int64_t>(std::floor(std::log1p(-r) / log_q));
        while (w >= v && v < n) {
          w -= v;
          ++v;
        }
        if (v < n) edges.emplace_back(static_cast<NodeId>(w), v);
      }
    }
  }
  return build_graph(edges, n);
}

namespace {

std::vector<Edge> parse_edge_lines(const std::string& path, std::optional<NodeId> n_check,
                                   NodeId* max_index) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open graph file: " + path);

  std::vector<Edge> edges;
  NodeId max_seen = -1;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;

    std::istringstream fields(line);
    long long u = 0, v = 0;
    if (!(fields >> u >> v)) {
      throw DataError(path + ", line " + std::to_string(line_no) +
                      ": expected two integers");
    }
    std::string extra;
    if (fields >> extra) {
      throw DataError(path + ", line " + std::to_string(line_no) +
                      ": trailing content after edge");
    }
    if (u < 0 || v < 0) {
      throw DataError(path + ", line " + std::to_string(line_no) +
                      ": negative node index");
    }
    if (n_check && (u >= *n_check || v >= *n_check)) {
      throw DataError(path + ", line " + std::to_string(line_no) + ": node index " +
                      std::to_string(std::max(u, v)) + " out of range (n=" +
                      std::to_string(*n_check) + ")");
    }
    edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    max_seen = std::max(max_seen, static_cast<NodeId>(std::max(u, v)));
  }
  if (max_index) *max_index = max_seen;
  return edges;
}

}  // namespace

std::vector<Edge> read_edge_list(const std::string& path, NodeId* max_index) {
  return parse_edge_lines(path, std::nullopt, max_index);
}

Graph load_graph(const std::string& path, std::optional<NodeId> n_override) {
  NodeId max_index = -1;
  const auto edges = parse_edge_lines(path, n_override, &max_index);
  const NodeId n = n_override.value_or(max_index + 1);
  return build_graph(edges, n);
}

void write_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "# nodes: " << g.num_nodes() << "\n";
  out << "# edges: " << g.num_edges() << "\n";
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.neighbors(u)) {
      if (u < v) out << u << "\t" << v << "\n";
    }
  }
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace nafs
