#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "spwd/common.hpp"
#include "spwd/sp_tree.hpp"
#include "spwd/ttsp_graph.hpp"

namespace spwd {

struct MappingStats {
  int vertices_before = 0;
  int edges_before = 0;
  int vertices_after = 0;
  int edges_after = 0;
  int sync_vertices = 0;
  int iterations = 0;
  bool used_fallback = false;
};

struct MappingResult {
  TtspGraph graph;
  MappingStats stats;
};

/// Size bounds of the mapping: t <= t' <= 2t and e' <= 2(t' - 2). The edge bound cannot hold for
/// a single edge (t' = 2), so it is only checked from three vertices on.
inline bool satisfies_mapping_bounds(int t, int t_mapped, int e_mapped) {
  if (t_mapped < t || t_mapped > 2 * t) return false;
  return t_mapped < 3 || e_mapped <= 2 * (t_mapped - 2);
}

/// Serializes consecutive longest-path layers. Between two layers with more than one vertex each a
/// synthetic barrier vertex is inserted; otherwise the layers are joined directly.
inline TtspGraph layered_barrier_mapping(const TtspGraph& input) {
  const TtspGraph g = transitive_reduction(input);
  auto order = topological_order(g);
  if (!order) throw Error(ErrorKind::cycle, "graph contains a cycle");
  Adjacency adj(g);
  std::vector<int> layer(g.vertex_count(), 0);
  int depth = 0;
  for (VertexId v : *order)
    for (EdgeId e : adj.out[v]) {
      const VertexId w = g.edges[e].to;
      layer[w] = std::max(layer[w], layer[v] + 1);
      depth = std::max(depth, layer[w]);
    }
  std::vector<std::vector<VertexId>> layers(depth + 1);
  for (VertexId v = 0; v < g.vertex_count(); ++v) layers[layer[v]].push_back(v);

  TtspGraph out;
  out.vertices = g.vertices;
  out.source = g.source;
  out.sink = g.sink;
  for (int i = 0; i < depth; ++i) {
    const auto& upper = layers[i];
    const auto& lower = layers[i + 1];
    if (upper.size() == 1 || lower.size() == 1) {
      for (VertexId a : upper)
        for (VertexId b : lower) out.add_edge(a, b);
    } else {
      const VertexId barrier = out.add_vertex(VertexKind::synthetic);
      for (VertexId a : upper) out.add_edge(a, barrier);
      for (VertexId b : lower) out.add_edge(barrier, b);
    }
  }
  return out;
}

namespace detail {

// One synchronization step on a stalled reduction. Picks the first join vertex v of the reduced
// graph (topological order) whose predecessor set can be synchronized: predecessors that reach
// another predecessor are replaced by the first vertices inside their reduced edge, so the set is
// an antichain. All out-edges of that set are rerouted through a new synthetic vertex.
// Returns false when no join admits a useful synchronization.
inline bool insert_sync_vertex(TtspGraph& g, const std::vector<Reducer::WorkEdge>& reduced, const SpTree& partial) {
  const int n = g.vertex_count();
  std::vector<std::vector<int>> h_in(n);
  std::vector<std::vector<int>> h_succ(n);
  std::vector<int> h_in_degree(n, 0);
  for (int i = 0; i < static_cast<int>(reduced.size()); ++i) {
    h_in[reduced[i].to].push_back(i);
    h_succ[reduced[i].from].push_back(reduced[i].to);
    ++h_in_degree[reduced[i].to];
  }
  const auto h_order = detail::topological_order(n, h_succ, h_in_degree);
  const auto reach = reachability(g);
  Adjacency adj(g);

  for (VertexId v : h_order) {
    if (h_in[v].size() < 2) continue;
    std::vector<VertexId> preds;
    for (int i : h_in[v]) preds.push_back(reduced[i].from);

    std::set<VertexId> sync_set;
    for (int i : h_in[v]) {
      const VertexId p = reduced[i].from;
      const bool dominated = std::any_of(preds.begin(), preds.end(),
                                         [&](VertexId q) { return q != p && reach[p].test(q); });
      if (!dominated) {
        sync_set.insert(p);
        continue;
      }
      for (EdgeId e : partial.edges_under(reduced[i].node))
        if (g.edges[e].from == p) sync_set.insert(g.edges[e].to);
    }
    if (sync_set.contains(g.source) || sync_set.contains(g.sink)) continue;

    std::set<VertexId> targets;
    for (VertexId p : sync_set)
      for (EdgeId e : adj.out[p]) targets.insert(g.edges[e].to);
    if (targets.size() < 2) continue;

    const VertexId sync = g.add_vertex(VertexKind::synthetic);
    for (GraphEdge& e : g.edges)
      if (sync_set.contains(e.from)) e.from = sync;
    for (VertexId p : sync_set) g.add_edge(p, sync);
    return true;
  }
  return false;
}

}  // namespace detail

/// Maps a two-terminal DAG onto a two-terminal series-parallel graph that preserves every
/// precedence. Transitive edges are dropped first (they never bind a path constraint); stalled
/// reductions are then resolved by inserting synchronization vertices. When that would exceed the
/// size bounds the layered barrier mapping is used instead.
inline MappingResult map_to_ttsp_detailed(const TtspGraph& input) {
  if (!is_two_terminal_dag(input)) throw Error(ErrorKind::invalid_input, "graph is not a two-terminal DAG");
  MappingResult result;
  result.stats.vertices_before = input.vertex_count();
  result.stats.edges_before = input.edge_count();
  const int t = input.vertex_count();

  TtspGraph current = transitive_reduction(input);
  bool mapped = false;
  for (;;) {
    ++result.stats.iterations;
    detail::Reducer reducer(current);
    if (reducer.run()) {
      mapped = true;
      break;
    }
    if (current.vertex_count() >= 2 * t) break;
    if (!detail::insert_sync_vertex(current, reducer.remaining(), reducer.tree())) break;
    ++result.stats.sync_vertices;
    current = transitive_reduction(current);
  }

  if (!mapped || !satisfies_mapping_bounds(t, current.vertex_count(), current.edge_count())) {
    current = layered_barrier_mapping(input);
    result.stats.used_fallback = true;
    result.stats.sync_vertices = current.vertex_count() - t;
    if (!is_series_parallel(current))
      throw Error(ErrorKind::not_series_parallel, "layered mapping did not yield a series-parallel graph");
  }
  result.stats.vertices_after = current.vertex_count();
  result.stats.edges_after = current.edge_count();
  if (!satisfies_mapping_bounds(t, current.vertex_count(), current.edge_count()))
    throw Error(ErrorKind::bound_violation, "mapped graph has " + std::to_string(current.vertex_count()) +
                                                " vertices and " + std::to_string(current.edge_count()) + " edges");
  result.graph = std::move(current);
  return result;
}

inline TtspGraph map_to_ttsp(const TtspGraph& input) { return map_to_ttsp_detailed(input).graph; }

}  // namespace spwd
