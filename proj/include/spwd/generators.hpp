#pragma once

// Seeded workflow and graph generators: desk-scale stand-ins for workflow families and the
// random inputs of the property tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "spwd/common.hpp"
#include "spwd/ttsp_graph.hpp"
#include "spwd/workflow.hpp"

namespace spwd {

/// mt19937_64 with distribution helpers whose output does not depend on the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Integer in [lo, hi].
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }
  bool bernoulli(double p) { return uniform01() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<std::size_t>(engine_() % i)]);
  }

 private:
  std::mt19937_64 engine_;
};

struct RuntimeRange {
  double min = 1.0;
  double max = 10.0;
};

namespace detail {

inline double draw_runtime(Rng& rng, RuntimeRange range) {
  return std::round(rng.uniform(range.min, range.max) * 100.0) / 100.0;
}

inline std::string task_name(const std::string& prefix, int index) {
  std::string digits = std::to_string(index);
  return prefix + "_" + std::string(digits.size() < 4 ? 4 - digits.size() : 0, '0') + digits;
}

inline Workflow workflow_from_edges(const std::string& prefix, int n, const std::vector<Edge>& edges, Rng& rng,
                                    RuntimeRange range) {
  std::vector<Task> tasks;
  for (int i = 0; i < n; ++i) tasks.push_back(Task{i, task_name(prefix, i), draw_runtime(rng, range)});
  std::vector<Edge> sorted = edges;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  return Workflow::create(std::move(tasks), std::move(sorted));
}

}  // namespace detail

inline Workflow generate_chain(int n, std::uint64_t seed, RuntimeRange range = {}) {
  if (n < 1) throw Error(ErrorKind::invalid_input, "chain needs at least one task");
  Rng rng(seed);
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back(Edge{i, i + 1});
  return detail::workflow_from_edges("chain", n, edges, rng, range);
}

/// Consecutive layers joined by random fan-out/fan-in edges: every pair is linked with
/// probability `density`, and every task keeps at least one parent and one child.
inline Workflow generate_layered(const std::vector<int>& widths, double density, std::uint64_t seed,
                                 RuntimeRange range = {}) {
  if (widths.empty()) throw Error(ErrorKind::invalid_input, "layered shape needs at least one layer");
  if (!(density >= 0.0 && density <= 1.0)) throw Error(ErrorKind::invalid_input, "density must lie in [0, 1]");
  for (int w : widths)
    if (w < 1) throw Error(ErrorKind::invalid_input, "layer widths must be positive");
  Rng rng(seed);
  std::vector<int> offset(widths.size() + 1, 0);
  for (std::size_t i = 0; i < widths.size(); ++i) offset[i + 1] = offset[i] + widths[i];
  std::vector<Edge> edges;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    std::vector<int> children(widths[l], 0), parents(widths[l + 1], 0);
    for (int a = 0; a < widths[l]; ++a)
      for (int b = 0; b < widths[l + 1]; ++b)
        if (rng.bernoulli(density)) {
          edges.push_back(Edge{offset[l] + a, offset[l + 1] + b});
          ++children[a];
          ++parents[b];
        }
    for (int b = 0; b < widths[l + 1]; ++b)
      if (parents[b] == 0) {
        const int a = rng.uniform_int(0, widths[l] - 1);
        edges.push_back(Edge{offset[l] + a, offset[l + 1] + b});
        ++children[a];
      }
    for (int a = 0; a < widths[l]; ++a)
      if (children[a] == 0) edges.push_back(Edge{offset[l] + a, offset[l + 1] + rng.uniform_int(0, widths[l + 1] - 1)});
  }
  return detail::workflow_from_edges("layered", offset.back(), edges, rng, range);
}

/// `stages` fork-join blocks in series; each block forks into `branches` chains of `depth` tasks.
inline Workflow generate_fork_join(int branches, int depth, int stages, std::uint64_t seed, RuntimeRange range = {}) {
  if (branches < 1 || depth < 1 || stages < 1)
    throw Error(ErrorKind::invalid_input, "fork-join parameters must be positive");
  Rng rng(seed);
  std::vector<Edge> edges;
  int next = 0;
  int fork = next++;
  for (int s = 0; s < stages; ++s) {
    std::vector<int> tails;
    for (int b = 0; b < branches; ++b) {
      int prev = fork;
      for (int d = 0; d < depth; ++d) {
        const int v = next++;
        edges.push_back(Edge{prev, v});
        prev = v;
      }
      tails.push_back(prev);
    }
    const int join = next++;
    for (int tail : tails) edges.push_back(Edge{tail, join});
    fork = join;
  }
  return detail::workflow_from_edges("forkjoin", next, edges, rng, range);
}

namespace detail {

// Builds an SP graph with `m` edges between src and dst. When `simple` is set, parallel branches
// always contain an inner vertex, so the result has neither parallel nor transitive edges.
inline void compose_sp(TtspGraph& g, VertexId src, VertexId dst, int m, Rng& rng, bool simple) {
  if (m == 1) {
    g.add_edge(src, dst);
    return;
  }
  const bool can_parallel = simple ? m >= 4 : true;
  const bool parallel = can_parallel && rng.bernoulli(0.5);
  if (parallel) {
    const int lo = simple ? 2 : 1;
    const int a = rng.uniform_int(lo, m - lo);
    compose_sp(g, src, dst, a, rng, simple);
    compose_sp(g, src, dst, m - a, rng, simple);
  } else {
    const VertexId mid = g.add_vertex(VertexKind::original);
    g.vertices[mid].origin = mid;
    const int a = rng.uniform_int(1, m - 1);
    compose_sp(g, src, mid, a, rng, simple);
    compose_sp(g, mid, dst, m - a, rng, simple);
  }
}

}  // namespace detail

/// Random two-terminal series-parallel graph with `edge_count` edges built from random series and
/// parallel compositions. Vertex ids are shuffled so the ids carry no construction order.
inline TtspGraph generate_sp_graph(int edge_count, std::uint64_t seed, bool simple = false) {
  if (edge_count < 1) throw Error(ErrorKind::invalid_input, "need at least one edge");
  Rng rng(seed);
  TtspGraph g;
  g.source = g.add_vertex(VertexKind::original, 0);
  g.sink = g.add_vertex(VertexKind::original, 1);
  detail::compose_sp(g, g.source, g.sink, edge_count, rng, simple);

  std::vector<VertexId> perm(g.vertex_count());
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  TtspGraph shuffled;
  for (VertexId v = 0; v < g.vertex_count(); ++v) shuffled.add_vertex(VertexKind::original, v);
  for (const GraphEdge& e : g.edges) shuffled.add_edge(perm[e.from], perm[e.to]);
  shuffled.source = perm[g.source];
  shuffled.sink = perm[g.sink];
  return shuffled;
}

/// Random series-parallel workflow with roughly `edge_count` edges and no duplicate edges.
inline Workflow generate_random_sp_workflow(int edge_count, std::uint64_t seed, RuntimeRange range = {}) {
  TtspGraph g = generate_sp_graph(std::max(1, edge_count), seed, /*simple=*/true);
  std::vector<Edge> edges;
  for (const GraphEdge& e : g.edges) edges.push_back(Edge{e.from, e.to});
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  return detail::workflow_from_edges("sp", g.vertex_count(), edges, rng, range);
}

/// Random DAG over `n` tasks: each task after the first picks 1..max_parents parents among the
/// earlier tasks; roots and leaves are left as they fall.
inline Workflow generate_random_dag(int n, int max_parents, std::uint64_t seed, RuntimeRange range = {}) {
  if (n < 1) throw Error(ErrorKind::invalid_input, "need at least one task");
  Rng rng(seed);
  std::vector<Edge> edges;
  for (int v = 1; v < n; ++v) {
    const int k = rng.uniform_int(1, std::max(1, max_parents));
    for (int i = 0; i < k; ++i) {
      // Bias towards recent tasks so the DAG has depth.
      const int lo = std::max(0, v - 1 - rng.uniform_int(0, std::max(1, n / 4)));
      edges.push_back(Edge{rng.uniform_int(lo, v - 1), v});
    }
  }
  return detail::workflow_from_edges("dag", n, edges, rng, range);
}

/// Random two-terminal DAG with shuffled vertex ids, for mapping tests.
inline TtspGraph generate_two_terminal_dag(int n, int max_parents, std::uint64_t seed) {
  Workflow wf = generate_random_dag(std::max(1, n - 2), max_parents, seed);
  TtspGraph g = normalize_two_terminal(wf);
  Rng rng(seed ^ 0x51ed2701f3a5c7bdULL);
  std::vector<VertexId> perm(g.vertex_count());
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  TtspGraph out;
  out.vertices.resize(g.vertex_count());
  for (const Vertex& v : g.vertices) out.vertices[perm[v.id]] = Vertex{perm[v.id], v.kind, v.origin};
  for (const GraphEdge& e : g.edges) out.add_edge(perm[e.from], perm[e.to]);
  out.source = perm[g.source];
  out.sink = perm[g.sink];
  return out;
}

}  // namespace spwd
