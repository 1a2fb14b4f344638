#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "spwd/common.hpp"
#include "spwd/ttsp_graph.hpp"

namespace spwd {

enum class NodeKind { leaf, series, parallel };

inline const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::leaf: return "L";
    case NodeKind::series: return "S";
    case NodeKind::parallel: return "P";
  }
  return "?";
}

struct SpNode {
  NodeKind kind = NodeKind::leaf;
  NodeId left = kNoNode;
  NodeId right = kNoNode;
  NodeId parent = kNoNode;
  EdgeId edge = -1;  // leaves only

  // Terminals of the subgraph this node represents.
  VertexId source = kNoVertex;
  VertexId sink = kNoVertex;

  // Series nodes: sink of the left child. After substitution the right child starts at
  // `substitute` instead, and the two children share no vertex.
  VertexId connector = kNoVertex;
  VertexId substitute = kNoVertex;

  double weight = 0.0;
  std::optional<double> deadline;
  int vertex_count = 0;
  PathCount paths;

  bool is_leaf() const noexcept { return kind == NodeKind::leaf; }
  /// Vertex shared by the two children of a series node, if any.
  VertexId shared_vertex() const noexcept {
    return kind == NodeKind::series && substitute == kNoVertex ? connector : kNoVertex;
  }
};

/// Binary decomposition tree; node ids index `nodes`.
struct SpTree {
  std::vector<SpNode> nodes;
  NodeId root = kNoNode;

  const SpNode& operator[](NodeId id) const { return nodes[id]; }
  SpNode& operator[](NodeId id) { return nodes[id]; }
  int size() const noexcept { return static_cast<int>(nodes.size()); }

  NodeId add_leaf(EdgeId edge, VertexId from, VertexId to) {
    SpNode n;
    n.kind = NodeKind::leaf;
    n.edge = edge;
    n.source = from;
    n.sink = to;
    n.vertex_count = 2;
    n.paths = PathCount{1, false};
    nodes.push_back(n);
    return size() - 1;
  }

  NodeId add_series(NodeId left, NodeId right) {
    SpNode n;
    n.kind = NodeKind::series;
    n.left = left;
    n.right = right;
    n.source = nodes[left].source;
    n.sink = nodes[right].sink;
    n.connector = nodes[left].sink;
    n.vertex_count = nodes[left].vertex_count + nodes[right].vertex_count - 1;
    nodes.push_back(n);
    const NodeId id = size() - 1;
    nodes[left].parent = id;
    nodes[right].parent = id;
    return id;
  }

  NodeId add_parallel(NodeId left, NodeId right) {
    SpNode n;
    n.kind = NodeKind::parallel;
    n.left = left;
    n.right = right;
    n.source = nodes[left].source;
    n.sink = nodes[left].sink;
    n.vertex_count = nodes[left].vertex_count + nodes[right].vertex_count - 2;
    nodes.push_back(n);
    const NodeId id = size() - 1;
    nodes[left].parent = id;
    nodes[right].parent = id;
    return id;
  }

  /// Nodes of the subtree rooted at `id`, in pre-order (left before right).
  std::vector<NodeId> preorder(NodeId id) const {
    std::vector<NodeId> out;
    std::vector<NodeId> stack{id};
    while (!stack.empty()) {
      NodeId n = stack.back();
      stack.pop_back();
      out.push_back(n);
      if (!nodes[n].is_leaf()) {
        stack.push_back(nodes[n].right);
        stack.push_back(nodes[n].left);
      }
    }
    return out;
  }

  /// Leaves (graph edges) under a node, left to right.
  std::vector<EdgeId> edges_under(NodeId id) const {
    std::vector<EdgeId> out;
    for (NodeId n : preorder(id))
      if (nodes[n].is_leaf()) out.push_back(nodes[n].edge);
    return out;
  }

  /// Sorted vertex set of the subgraph under a node.
  std::vector<VertexId> vertices_under(NodeId id, const TtspGraph& g) const {
    std::vector<VertexId> out;
    for (EdgeId e : edges_under(id)) {
      out.push_back(g.edges[e].from);
      out.push_back(g.edges[e].to);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  bool is_ancestor(NodeId ancestor, NodeId node) const {
    for (NodeId n = node; n != kNoNode; n = nodes[n].parent)
      if (n == ancestor) return true;
    return false;
  }

  /// Recomputes vertex counts bottom-up from the children and their shared vertices.
  void recount_vertices() {
    for (NodeId id : postorder()) {
      SpNode& n = nodes[id];
      if (n.is_leaf()) {
        n.vertex_count = 2;
      } else if (n.kind == NodeKind::series) {
        n.vertex_count = nodes[n.left].vertex_count + nodes[n.right].vertex_count -
                         (n.shared_vertex() != kNoVertex ? 1 : 0);
      } else {
        n.vertex_count = nodes[n.left].vertex_count + nodes[n.right].vertex_count - 2;
      }
    }
  }

  std::vector<NodeId> postorder() const {
    // Mirrored pre-order (right before left), reversed.
    std::vector<NodeId> stack{root};
    std::vector<NodeId> rev;
    while (!stack.empty()) {
      NodeId n = stack.back();
      stack.pop_back();
      rev.push_back(n);
      if (!nodes[n].is_leaf()) {
        stack.push_back(nodes[n].left);
        stack.push_back(nodes[n].right);
      }
    }
    return {rev.rbegin(), rev.rend()};
  }
};

namespace detail {

/// Series/parallel reduction engine. Vertices are processed in ascending id order and a series
/// reduction is tried before a parallel one at the same vertex.
class Reducer {
 public:
  struct WorkEdge {
    VertexId from;
    VertexId to;
    NodeId node;
    bool alive;
  };

  explicit Reducer(const TtspGraph& g) : graph_(g), out_(g.vertex_count()), in_(g.vertex_count()) {
    for (const GraphEdge& e : g.edges) {
      const NodeId leaf = tree_.add_leaf(e.id, e.from, e.to);
      push_edge(e.from, e.to, leaf);
    }
  }

  /// Runs reductions to a fixed point. Returns true when a single source-to-sink edge remains.
  bool run() {
    std::set<VertexId> pending;
    for (VertexId v = 0; v < graph_.vertex_count(); ++v) pending.insert(v);
    while (!pending.empty()) {
      const VertexId v = *pending.begin();
      pending.erase(pending.begin());
      if (v != graph_.source && v != graph_.sink && in_[v].size() == 1 && out_[v].size() == 1) {
        const int e1 = in_[v].front();
        const int e2 = out_[v].front();
        const VertexId u = work_[e1].from;
        const VertexId w = work_[e2].to;
        const NodeId node = tree_.add_series(work_[e1].node, work_[e2].node);
        kill(e1);
        kill(e2);
        push_edge(u, w, node);
        pending.insert(u);
        pending.insert(w);
        continue;
      }
      // First pair of parallel out-edges, scanning in creation order.
      std::unordered_map<VertexId, int> first_to;
      for (int e : out_[v]) {
        auto [it, inserted] = first_to.emplace(work_[e].to, e);
        if (inserted) continue;
        const int e1 = it->second;
        const VertexId w = work_[e].to;
        const NodeId node = tree_.add_parallel(work_[e1].node, work_[e].node);
        kill(e1);
        kill(e);
        push_edge(v, w, node);
        pending.insert(v);
        pending.insert(w);
        break;
      }
    }
    int alive = 0;
    int last = -1;
    for (int i = 0; i < static_cast<int>(work_.size()); ++i)
      if (work_[i].alive) {
        ++alive;
        last = i;
      }
    if (alive == 1 && work_[last].from == graph_.source && work_[last].to == graph_.sink) {
      tree_.root = work_[last].node;
      return true;
    }
    return false;
  }

  const SpTree& tree() const noexcept { return tree_; }
  SpTree take_tree() { return std::move(tree_); }

  /// Surviving (reduced) edges after run().
  std::vector<WorkEdge> remaining() const {
    std::vector<WorkEdge> out;
    for (const WorkEdge& e : work_)
      if (e.alive) out.push_back(e);
    return out;
  }

 private:
  void push_edge(VertexId from, VertexId to, NodeId node) {
    const int id = static_cast<int>(work_.size());
    work_.push_back(WorkEdge{from, to, node, true});
    out_[from].push_back(id);
    in_[to].push_back(id);
  }

  void kill(int id) {
    work_[id].alive = false;
    auto erase = [id](std::vector<int>& list) { list.erase(std::find(list.begin(), list.end(), id)); };
    erase(out_[work_[id].from]);
    erase(in_[work_[id].to]);
  }

  const TtspGraph& graph_;
  SpTree tree_;
  std::vector<WorkEdge> work_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

}  // namespace detail

/// Recognizes a two-terminal series-parallel multigraph and returns its decomposition tree.
/// Throws Error(not_series_parallel) when reductions stall before a single edge remains.
inline SpTree recognize_and_build_tree(const TtspGraph& g) {
  if (!is_two_terminal_dag(g)) throw Error(ErrorKind::invalid_input, "graph is not a two-terminal DAG");
  detail::Reducer reducer(g);
  if (!reducer.run()) {
    throw Error(ErrorKind::not_series_parallel,
                std::to_string(reducer.remaining().size()) + " edges remain after reduction");
  }
  return reducer.take_tree();
}

inline bool is_series_parallel(const TtspGraph& g) {
  if (!is_two_terminal_dag(g)) return false;
  detail::Reducer reducer(g);
  return reducer.run();
}

/// Fills `paths` on every node (leaf 1, series product, parallel sum) and returns the root value.
inline PathCount count_paths(SpTree& tree) {
  for (NodeId id : tree.postorder()) {
    SpNode& n = tree[id];
    if (n.is_leaf())
      n.paths = PathCount{1, false};
    else if (n.kind == NodeKind::series)
      n.paths = tree[n.left].paths * tree[n.right].paths;
    else
      n.paths = tree[n.left].paths + tree[n.right].paths;
  }
  return tree[tree.root].paths;
}

/// Source-to-sink vertex paths of the subgraph under `node`, built from the tree: series nodes
/// join child paths at the connector (or across the substitute link), parallel nodes concatenate.
inline std::vector<std::vector<VertexId>> sp_paths(const SpTree& tree, NodeId node, const TtspGraph& g,
                                                   std::size_t cap = kDefaultPathCap) {
  const SpNode& n = tree[node];
  if (n.is_leaf()) {
    const GraphEdge& e = g.edges[n.edge];
    return {{e.from, e.to}};
  }
  auto left = sp_paths(tree, n.left, g, cap);
  auto right = sp_paths(tree, n.right, g, cap);
  std::vector<std::vector<VertexId>> out;
  if (n.kind == NodeKind::parallel) {
    if (left.size() + right.size() > cap)
      throw Error(ErrorKind::path_explosion, "more than " + std::to_string(cap) + " paths");
    out = std::move(left);
    out.insert(out.end(), std::make_move_iterator(right.begin()), std::make_move_iterator(right.end()));
    return out;
  }
  if (!right.empty() && left.size() > cap / right.size())
    throw Error(ErrorKind::path_explosion, "more than " + std::to_string(cap) + " paths");
  const bool shared = n.shared_vertex() != kNoVertex;
  out.reserve(left.size() * right.size());
  for (const auto& l : left)
    for (const auto& r : right) {
      std::vector<VertexId> p = l;
      p.insert(p.end(), r.begin() + (shared ? 1 : 0), r.end());
      out.push_back(std::move(p));
    }
  return out;
}

/// Indented outline, one node per line.
inline std::string dump_outline(const SpTree& tree) {
  std::ostringstream os;
  std::vector<std::pair<NodeId, int>> stack{{tree.root, 0}};
  while (!stack.empty()) {
    auto [id, depth] = stack.back();
    stack.pop_back();
    const SpNode& n = tree[id];
    os << std::string(2 * depth, ' ') << to_string(n.kind);
    if (n.is_leaf()) os << " e" << n.edge;
    os << " [" << n.source << "->" << n.sink << "]";
    if (n.kind == NodeKind::series) {
      os << " via " << n.connector;
      if (n.substitute != kNoVertex) os << "/" << n.substitute << "'";
    }
    os << " vertices=" << n.vertex_count << " weight=" << n.weight;
    if (n.deadline) os << " deadline=" << *n.deadline;
    os << "\n";
    if (!n.is_leaf()) {
      stack.push_back({n.right, depth + 1});
      stack.push_back({n.left, depth + 1});
    }
  }
  return os.str();
}

/// Compact term such as P(S(e0,e1),S(e2,e3)).
inline std::string tree_expression(const SpTree& tree, NodeId id) {
  const SpNode& n = tree[id];
  if (n.is_leaf()) return "e" + std::to_string(n.edge);
  return std::string(to_string(n.kind)) + "(" + tree_expression(tree, n.left) + "," +
         tree_expression(tree, n.right) + ")";
}

}  // namespace spwd
