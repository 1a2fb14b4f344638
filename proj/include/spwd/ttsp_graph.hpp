#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "spwd/common.hpp"
#include "spwd/workflow.hpp"

namespace spwd {

enum class VertexKind { original, synthetic, substitute };

struct Vertex {
  VertexId id = 0;
  VertexKind kind = VertexKind::original;
  // Task id for original vertices and for substitutes (the task they stand in for).
  std::optional<TaskId> origin;

  /// True when the vertex carries the workload of a real task.
  bool has_workload() const noexcept { return kind == VertexKind::original; }
};

struct GraphEdge {
  EdgeId id = 0;
  VertexId from = 0;
  VertexId to = 0;
};

/// Two-terminal directed multigraph over workflow tasks plus synthetic vertices.
/// Vertex and edge ids equal their positions in the respective vectors.
struct TtspGraph {
  std::vector<Vertex> vertices;
  std::vector<GraphEdge> edges;
  VertexId source = kNoVertex;
  VertexId sink = kNoVertex;

  int vertex_count() const noexcept { return static_cast<int>(vertices.size()); }
  int edge_count() const noexcept { return static_cast<int>(edges.size()); }

  VertexId add_vertex(VertexKind kind, std::optional<TaskId> origin = std::nullopt) {
    const VertexId id = vertex_count();
    vertices.push_back(Vertex{id, kind, origin});
    return id;
  }

  EdgeId add_edge(VertexId from, VertexId to) {
    const EdgeId id = edge_count();
    edges.push_back(GraphEdge{id, from, to});
    return id;
  }
};

/// Edge-id adjacency lists, each sorted by (neighbour, edge id).
struct Adjacency {
  std::vector<std::vector<EdgeId>> out;
  std::vector<std::vector<EdgeId>> in;

  explicit Adjacency(const TtspGraph& g) : out(g.vertex_count()), in(g.vertex_count()) {
    for (const GraphEdge& e : g.edges) {
      out[e.from].push_back(e.id);
      in[e.to].push_back(e.id);
    }
    for (auto& list : out)
      std::sort(list.begin(), list.end(), [&](EdgeId a, EdgeId b) {
        return std::pair(g.edges[a].to, a) < std::pair(g.edges[b].to, b);
      });
    for (auto& list : in)
      std::sort(list.begin(), list.end(), [&](EdgeId a, EdgeId b) {
        return std::pair(g.edges[a].from, a) < std::pair(g.edges[b].from, b);
      });
  }
};

/// Fixed-size bitset sized at run time.
class DynamicBitset {
 public:
  DynamicBitset() = default;
  explicit DynamicBitset(std::size_t bits) : words_((bits + 63) / 64, 0) {}

  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
  DynamicBitset& operator|=(const DynamicBitset& other) {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= other.words_[k];
    return *this;
  }

 private:
  std::vector<std::uint64_t> words_;
};

/// Topological order of the graph's vertices (smallest ready id first); empty optional on a cycle.
inline std::optional<std::vector<VertexId>> topological_order(const TtspGraph& g) {
  const int n = g.vertex_count();
  std::vector<std::vector<int>> succ(n);
  std::vector<int> in_degree(n, 0);
  for (const GraphEdge& e : g.edges) {
    succ[e.from].push_back(e.to);
    ++in_degree[e.to];
  }
  auto order = detail::topological_order(n, succ, in_degree);
  if (static_cast<int>(order.size()) != n) return std::nullopt;
  return order;
}

/// reach[v] holds every vertex reachable from v by a non-empty path.
inline std::vector<DynamicBitset> reachability(const TtspGraph& g) {
  auto order = topological_order(g);
  if (!order) throw Error(ErrorKind::cycle, "graph contains a cycle");
  const int n = g.vertex_count();
  Adjacency adj(g);
  std::vector<DynamicBitset> reach(n, DynamicBitset(n));
  for (auto it = order->rbegin(); it != order->rend(); ++it) {
    const VertexId v = *it;
    for (EdgeId e : adj.out[v]) {
      const VertexId w = g.edges[e].to;
      reach[v].set(w);
      reach[v] |= reach[w];
    }
  }
  return reach;
}

/// Drops parallel duplicates and every edge implied by a longer path. Reachability is unchanged;
/// surviving edges keep their relative order and are renumbered densely.
inline TtspGraph transitive_reduction(const TtspGraph& g) {
  auto reach = reachability(g);
  Adjacency adj(g);
  std::vector<bool> keep(g.edge_count(), true);
  for (VertexId u = 0; u < g.vertex_count(); ++u) {
    const auto& out = adj.out[u];
    for (std::size_t i = 0; i < out.size(); ++i) {
      const VertexId v = g.edges[out[i]].to;
      if (i > 0 && g.edges[out[i - 1]].to == v) {
        keep[out[i]] = false;
        continue;
      }
      for (EdgeId other : out) {
        const VertexId w = g.edges[other].to;
        if (w != v && reach[w].test(v)) {
          keep[out[i]] = false;
          break;
        }
      }
    }
  }
  TtspGraph r;
  r.vertices = g.vertices;
  r.source = g.source;
  r.sink = g.sink;
  for (const GraphEdge& e : g.edges)
    if (keep[e.id]) r.add_edge(e.from, e.to);
  return r;
}

/// Adds a zero-workload super-source/super-sink where the workflow has several roots/leaves.
/// A single-task workflow receives a synthetic sink so the result has at least one edge.
inline TtspGraph normalize_two_terminal(const Workflow& wf) {
  if (wf.empty()) throw Error(ErrorKind::invalid_input, "workflow has no tasks");
  TtspGraph g;
  for (const Task& t : wf.tasks()) g.add_vertex(VertexKind::original, t.id);
  for (const Edge& e : wf.edges()) g.add_edge(e.from, e.to);

  if (wf.roots().size() == 1) {
    g.source = wf.roots().front();
  } else {
    g.source = g.add_vertex(VertexKind::synthetic);
    for (TaskId r : wf.roots()) g.add_edge(g.source, r);
  }
  if (wf.leaves().size() == 1 && wf.size() > 1) {
    g.sink = wf.leaves().front();
  } else {
    g.sink = g.add_vertex(VertexKind::synthetic);
    for (TaskId l : wf.leaves()) g.add_edge(l, g.sink);
  }
  return g;
}

/// True when the graph has exactly one in-degree-0 vertex (source) and one out-degree-0 vertex (sink),
/// no self-loops and no cycles.
inline bool is_two_terminal_dag(const TtspGraph& g) {
  if (g.vertex_count() < 2 || g.source == kNoVertex || g.sink == kNoVertex) return false;
  std::vector<int> in(g.vertex_count(), 0), out(g.vertex_count(), 0);
  for (const GraphEdge& e : g.edges) {
    if (e.from == e.to) return false;
    ++out[e.from];
    ++in[e.to];
  }
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if ((in[v] == 0) != (v == g.source)) return false;
    if ((out[v] == 0) != (v == g.sink)) return false;
  }
  return topological_order(g).has_value();
}

/// Source-to-sink paths as vertex sequences, lexicographic by vertex id (parallel edges yield
/// repeated sequences). Throws Error(path_explosion) when more than `cap` paths exist.
inline std::vector<std::vector<VertexId>> enumerate_paths(const TtspGraph& g, std::size_t cap = kDefaultPathCap) {
  Adjacency adj(g);
  std::vector<std::vector<VertexId>> paths;
  std::vector<VertexId> current;
  std::function<void(VertexId)> walk = [&](VertexId v) {
    current.push_back(v);
    if (v == g.sink) {
      if (paths.size() >= cap)
        throw Error(ErrorKind::path_explosion, "more than " + std::to_string(cap) + " source-to-sink paths");
      paths.push_back(current);
    } else {
      for (EdgeId e : adj.out[v]) walk(g.edges[e].to);
    }
    current.pop_back();
  };
  walk(g.source);
  return paths;
}

/// Number of source-to-sink paths (counting parallel edges separately).
inline PathCount count_graph_paths(const TtspGraph& g) {
  auto order = topological_order(g);
  if (!order) throw Error(ErrorKind::cycle, "graph contains a cycle");
  Adjacency adj(g);
  std::vector<PathCount> to_sink(g.vertex_count());
  for (auto it = order->rbegin(); it != order->rend(); ++it) {
    const VertexId v = *it;
    if (v == g.sink) {
      to_sink[v] = PathCount{1, false};
      continue;
    }
    PathCount sum;
    for (EdgeId e : adj.out[v]) sum = sum + to_sink[g.edges[e].to];
    to_sink[v] = sum;
  }
  return to_sink[g.source];
}

/// One edge per line, in Graphviz dot syntax.
inline std::string dump_dot(const TtspGraph& g, const std::function<std::string(const Vertex&)>& label = {}) {
  std::ostringstream os;
  os << "digraph ttsp {\n";
  for (const Vertex& v : g.vertices) {
    os << "  v" << v.id << " [label=\"";
    if (label) {
      os << label(v);
    } else {
      os << v.id;
      if (v.kind == VertexKind::synthetic) os << "*";
      if (v.kind == VertexKind::substitute) os << "'";
    }
    os << "\"];\n";
  }
  for (const GraphEdge& e : g.edges) os << "  v" << e.from << " -> v" << e.to << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace spwd
