#pragma once

// Weighting, substitution, deadline distribution and division of the decomposition tree.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "spwd/common.hpp"
#include "spwd/instance.hpp"
#include "spwd/sp_tree.hpp"
#include "spwd/ttsp_graph.hpp"
#include "spwd/ttsp_mapping.hpp"

namespace spwd {

/// Maximum subgraph size, either absolute or as a percentage of the mapped graph's vertex count.
struct SizeSpec {
  double value = 100.0;
  bool percent = true;

  static SizeSpec absolute(int n) { return SizeSpec{static_cast<double>(n), false}; }
  static SizeSpec percentage(double p) { return SizeSpec{p, true}; }

  /// Accepts "N" or "P%".
  static SizeSpec parse(std::string_view text) {
    const bool pct = !text.empty() && text.back() == '%';
    if (pct) text.remove_suffix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
      throw Error(ErrorKind::config, "bad subgraph size '" + std::string(text) + "'");
    if (pct) {
      if (!(v > 0.0 && v <= 100.0)) throw Error(ErrorKind::config, "percentage must lie in (0, 100]");
      return percentage(v);
    }
    if (v < 2.0 || v != std::floor(v)) throw Error(ErrorKind::config, "absolute subgraph size must be an integer >= 2");
    return absolute(static_cast<int>(v));
  }

  /// Absolute size for a graph with `vertex_count` vertices; percentages round up, never below 2.
  int resolve(int vertex_count) const {
    if (!percent) return static_cast<int>(value);
    const double raw = value * vertex_count / 100.0;
    return std::max(2, static_cast<int>(std::ceil(raw - 1e-9)));
  }

  std::string to_string() const { return percent ? fmt::format("{}%", value) : fmt::format("{}", value); }
};

/// Mean execution time of each vertex's task; zero for synthetic and substitute vertices.
inline std::vector<double> vertex_weights(const TtspGraph& g, const WspInstance& instance) {
  std::vector<double> w(g.vertex_count(), 0.0);
  for (const Vertex& v : g.vertices)
    if (v.has_workload()) w[v.id] = instance.mean_time(*v.origin);
  return w;
}

/// Bottom-up node weights: leaf = both endpoints, series = sum minus the shared vertex,
/// parallel = heavier child.
inline void assign_weights(SpTree& tree, const TtspGraph& g, const std::vector<double>& w) {
  for (NodeId id : tree.postorder()) {
    SpNode& n = tree[id];
    switch (n.kind) {
      case NodeKind::leaf: {
        const GraphEdge& e = g.edges[n.edge];
        n.weight = w[e.from] + w[e.to];
        break;
      }
      case NodeKind::series: {
        const VertexId shared = n.shared_vertex();
        n.weight = tree[n.left].weight + tree[n.right].weight - (shared != kNoVertex ? w[shared] : 0.0);
        break;
      }
      case NodeKind::parallel:
        n.weight = std::max(tree[n.left].weight, tree[n.right].weight);
        break;
    }
  }
}

/// Top-down scan: a node whose vertex count fits in `s` becomes a frontier node and its subtree is
/// not visited. Frontier nodes come out left to right.
inline std::vector<NodeId> divide(const SpTree& tree, int s) {
  if (s < 2) throw Error(ErrorKind::config, "maximum subgraph size must be at least 2");
  std::vector<NodeId> frontier;
  std::vector<NodeId> stack{tree.root};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    const SpNode& n = tree[id];
    if (n.vertex_count <= s || n.is_leaf()) {
      frontier.push_back(id);
      continue;
    }
    stack.push_back(n.right);
    stack.push_back(n.left);
  }
  return frontier;
}

/// Internal nodes strictly above the frontier.
inline std::vector<NodeId> nodes_above(const SpTree& tree, const std::vector<NodeId>& frontier) {
  std::set<NodeId> cut(frontier.begin(), frontier.end());
  std::vector<NodeId> above;
  std::vector<NodeId> stack{tree.root};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    if (cut.contains(id)) continue;
    above.push_back(id);
    stack.push_back(tree[id].right);
    stack.push_back(tree[id].left);
  }
  return above;
}

struct Substitution {
  NodeId node;
  VertexId original;
  VertexId substitute;
  EdgeId link;  // (original, substitute); kept out of the tree
};

/// Gives every series node above the frontier whose connector carries workload a zero-weight
/// substitute: the connector's out-edges (all inside the right child) leave from the substitute,
/// and a link edge connects the two. Vertex counts and weights are recomputed afterwards.
inline std::vector<Substitution> modify_series_nodes(SpTree& tree, TtspGraph& g, const std::vector<NodeId>& frontier,
                                                     std::vector<double>& w) {
  std::vector<Substitution> done;
  for (NodeId id : nodes_above(tree, frontier)) {
    SpNode& n = tree[id];
    if (n.kind != NodeKind::series || n.substitute != kNoVertex) continue;
    const VertexId v = n.connector;
    if (!(w[v] > 0.0)) continue;

    const VertexId sub = g.add_vertex(VertexKind::substitute, g.vertices[v].origin);
    w.push_back(0.0);
    for (GraphEdge& e : g.edges)
      if (e.from == v) e.from = sub;
    for (NodeId r : tree.preorder(n.right))
      if (tree[r].source == v) tree[r].source = sub;
    const EdgeId link = g.add_edge(v, sub);
    tree[id].substitute = sub;
    done.push_back(Substitution{id, v, sub, link});
  }
  tree.recount_vertices();
  assign_weights(tree, g, w);
  return done;
}

/// Root gets `d`; series children split their parent's deadline in proportion to their weights
/// (evenly when both weigh nothing); parallel children inherit it.
inline void distribute_deadline(SpTree& tree, double d) {
  if (!(d > 0.0)) throw Error(ErrorKind::invalid_input, "deadline must be positive");
  tree[tree.root].deadline = d;
  std::vector<NodeId> stack{tree.root};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    const SpNode& n = tree[id];
    if (n.is_leaf()) continue;
    const double dn = *n.deadline;
    if (n.kind == NodeKind::parallel) {
      tree[n.left].deadline = dn;
      tree[n.right].deadline = dn;
    } else {
      const double wl = tree[n.left].weight;
      const double wr = tree[n.right].weight;
      const double total = wl + wr;
      const double dl = total > 0.0 ? dn * wl / total : dn / 2.0;
      tree[n.left].deadline = dl;
      tree[n.right].deadline = total > 0.0 ? dn * wr / total : dn / 2.0;
    }
    stack.push_back(n.right);
    stack.push_back(n.left);
  }
}

struct SubProblem {
  int id = 0;
  NodeId node = kNoNode;
  std::vector<VertexId> vertices;  // ids in the plan graph, sorted
  TtspGraph subgraph;              // local ids; local vertex i is plan vertex vertices[i]
  double deadline = 0.0;
  double weight = 0.0;
  std::vector<VertexId> boundary;  // plan vertices also present in another subproblem
};

struct DecompositionPlan {
  TtspGraph graph;  // mapped graph, including substitutes and link edges
  SpTree tree;
  std::vector<NodeId> frontier;
  std::vector<SubProblem> subproblems;
  std::map<VertexId, TaskId> substitutes;
  std::vector<Substitution> substitutions;
  std::vector<double> weights;  // per plan vertex
  MappingStats mapping;
  int max_size = 0;
  double deadline = 0.0;

  /// True when the whole graph forms a single subproblem.
  bool degenerate() const noexcept { return frontier.size() == 1 && frontier.front() == tree.root; }
};

namespace detail {

inline TtspGraph local_subgraph(const TtspGraph& g, const SpTree& tree, NodeId node,
                                const std::vector<VertexId>& vertices) {
  TtspGraph local;
  std::map<VertexId, VertexId> to_local;
  for (VertexId v : vertices) {
    const Vertex& src = g.vertices[v];
    to_local[v] = local.add_vertex(src.kind, src.origin);
  }
  for (EdgeId e : tree.edges_under(node)) local.add_edge(to_local.at(g.edges[e].from), to_local.at(g.edges[e].to));
  local.source = to_local.at(tree[node].source);
  local.sink = to_local.at(tree[node].sink);
  return local;
}

}  // namespace detail

/// Builds the full plan for an instance: two-terminal normalization, mapping, tree construction,
/// weighting, division, substitution, reweighting, deadline distribution and subproblem extraction.
inline DecompositionPlan plan(const WspInstance& instance, SizeSpec size) {
  DecompositionPlan p;
  const TtspGraph normalized = normalize_two_terminal(instance.workflow());
  MappingResult mapped = map_to_ttsp_detailed(normalized);
  p.graph = std::move(mapped.graph);
  p.mapping = mapped.stats;
  p.tree = recognize_and_build_tree(p.graph);
  count_paths(p.tree);
  p.weights = vertex_weights(p.graph, instance);
  assign_weights(p.tree, p.graph, p.weights);

  p.max_size = size.resolve(p.graph.vertex_count());
  p.frontier = divide(p.tree, p.max_size);
  p.substitutions = modify_series_nodes(p.tree, p.graph, p.frontier, p.weights);
  for (const Substitution& s : p.substitutions) p.substitutes[s.substitute] = *p.graph.vertices[s.original].origin;
  p.deadline = instance.deadline();
  distribute_deadline(p.tree, p.deadline);

  std::map<VertexId, int> seen;
  for (std::size_t i = 0; i < p.frontier.size(); ++i) {
    SubProblem sp;
    sp.id = static_cast<int>(i);
    sp.node = p.frontier[i];
    sp.vertices = p.tree.vertices_under(sp.node, p.graph);
    sp.subgraph = detail::local_subgraph(p.graph, p.tree, sp.node, sp.vertices);
    sp.deadline = *p.tree[sp.node].deadline;
    sp.weight = p.tree[sp.node].weight;
    for (VertexId v : sp.vertices) ++seen[v];
    p.subproblems.push_back(std::move(sp));
  }
  for (SubProblem& sp : p.subproblems)
    for (VertexId v : sp.vertices)
      if (seen[v] > 1) sp.boundary.push_back(v);
  return p;
}

/// Text report of the frontier.
inline std::string dump_plan(const DecompositionPlan& p) {
  std::ostringstream os;
  os << fmt::format("graph: {} vertices, {} edges ({} sync, {} substitutes)\n", p.graph.vertex_count(),
                    p.graph.edge_count(), p.mapping.sync_vertices, p.substitutes.size());
  os << fmt::format("max subgraph size: {}\ndeadline: {}\nsubproblems: {}\n", p.max_size, p.deadline,
                    p.subproblems.size());
  for (const SubProblem& sp : p.subproblems) {
    const SpNode& n = p.tree[sp.node];
    os << fmt::format("  #{} node {} ({}) vertices={} weight={} deadline={} boundary=[", sp.id, sp.node,
                      to_string(n.kind), n.vertex_count, sp.weight, sp.deadline);
    for (std::size_t i = 0; i < sp.boundary.size(); ++i) os << (i ? " " : "") << sp.boundary[i];
    os << "]\n";
  }
  return os.str();
}

inline std::string plan_csv(const DecompositionPlan& p) {
  std::string out = "subproblem_id,vertex_count,weight_s,deadline_s,boundary_size\n";
  for (const SubProblem& sp : p.subproblems)
    out += fmt::format("{},{},{},{},{}\n", sp.id, p.tree[sp.node].vertex_count, sp.weight, sp.deadline,
                       sp.boundary.size());
  return out;
}

}  // namespace spwd
