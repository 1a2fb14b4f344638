#include <set>

#include <gtest/gtest.h>

#include "spwd/spwd.hpp"
#include "support.hpp"

using namespace spwd;

namespace {

// S A B C D T = 0..5
TtspGraph n_graph() {
  return fixtures::graph_from_edges(6, 0, 5, {{0, 1}, {0, 2}, {1, 3}, {1, 4}, {2, 4}, {3, 5}, {4, 5}});
}

// Every edge of `original` is a path in `mapped`, where vertices keep their ids.
bool precedence_preserved(const TtspGraph& original, const TtspGraph& mapped) {
  const auto reach = reachability(mapped);
  for (const GraphEdge& e : original.edges)
    if (!reach[e.from].test(e.to)) return false;
  return true;
}

std::multiset<std::vector<VertexId>> path_set(std::vector<std::vector<VertexId>> paths) {
  return {paths.begin(), paths.end()};
}

}  // namespace

TEST(Recognizer, SingleEdgeIsOneLeaf) {
  const SpTree tree = recognize_and_build_tree(fixtures::graph_from_edges(2, 0, 1, {{0, 1}}));
  ASSERT_EQ(tree.size(), 1);
  EXPECT_TRUE(tree[tree.root].is_leaf());
}

TEST(Recognizer, FourEdgeDiamondShape) {
  const TtspGraph g = fixtures::graph_from_edges(4, 0, 3, {{0, 1}, {1, 3}, {0, 2}, {2, 3}});
  SpTree tree = recognize_and_build_tree(g);
  EXPECT_EQ(tree_expression(tree, tree.root), "P(S(e0,e1),S(e2,e3))");
  EXPECT_EQ(count_paths(tree).value, 2u);
}

TEST(Recognizer, NGraphIsNotSeriesParallel) {
  EXPECT_FALSE(is_series_parallel(n_graph()));
  try {
    recognize_and_build_tree(n_graph());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_series_parallel);
  }
}

TEST(Recognizer, ParallelEdgesAndSeriesOfDiamonds) {
  const TtspGraph multi = fixtures::graph_from_edges(2, 0, 1, {{0, 1}, {0, 1}, {0, 1}});
  SpTree m = recognize_and_build_tree(multi);
  EXPECT_EQ(count_paths(m).value, 3u);

  const TtspGraph two = fixtures::graph_from_edges(
      7, 0, 6, {{0, 1}, {1, 3}, {0, 2}, {2, 3}, {3, 4}, {4, 6}, {3, 5}, {5, 6}});
  SpTree tree = recognize_and_build_tree(two);
  EXPECT_EQ(tree[tree.root].kind, NodeKind::series);
  EXPECT_EQ(count_paths(tree).value, 4u);
  EXPECT_EQ(tree[tree.root].vertex_count, 7);
}

TEST(Recognizer, RandomSeriesParallelRoundTrip) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const TtspGraph g = generate_sp_graph(1 + static_cast<int>(seed % 40), seed);
    ASSERT_TRUE(is_series_parallel(g)) << seed;
    SpTree tree = recognize_and_build_tree(g);
    const std::vector<EdgeId> edges = tree.edges_under(tree.root);
    EXPECT_EQ(std::set<EdgeId>(edges.begin(), edges.end()).size(), static_cast<std::size_t>(g.edge_count()));
    EXPECT_EQ(tree[tree.root].vertex_count, g.vertex_count());
    EXPECT_EQ(count_paths(tree).value, count_graph_paths(g).value);
    // Re-expanding the tree yields exactly the graph's source-to-sink paths.
    EXPECT_EQ(path_set(sp_paths(tree, tree.root, g)), path_set(enumerate_paths(g))) << seed;
  }
}

TEST(Graph, TransitiveReductionDropsShortcuts) {
  const TtspGraph g = fixtures::graph_from_edges(3, 0, 2, {{0, 1}, {1, 2}, {0, 2}});
  const TtspGraph r = transitive_reduction(g);
  EXPECT_EQ(r.edge_count(), 2);
  EXPECT_TRUE(is_series_parallel(r));
}

TEST(Graph, NormalizeAddsTerminalsOnlyWhenNeeded) {
  const TtspGraph diamond = normalize_two_terminal(fixtures::diamond().workflow());
  EXPECT_EQ(diamond.vertex_count(), 4);
  EXPECT_EQ(diamond.source, 0);
  EXPECT_EQ(diamond.sink, 3);

  const Workflow two_roots = Workflow::create({{0, "a", 1}, {1, "b", 1}, {2, "c", 1}}, {{0, 2}, {1, 2}});
  const TtspGraph g = normalize_two_terminal(two_roots);
  EXPECT_EQ(g.vertex_count(), 4);
  EXPECT_FALSE(g.vertices[g.source].has_workload());
  EXPECT_TRUE(is_two_terminal_dag(g));
}

TEST(Mapping, NGraphBecomesSeriesParallel) {
  const TtspGraph g = n_graph();
  const MappingResult r = map_to_ttsp_detailed(g);
  EXPECT_TRUE(is_series_parallel(r.graph));
  EXPECT_LE(r.graph.vertex_count(), 2 * g.vertex_count());
  EXPECT_TRUE(satisfies_mapping_bounds(g.vertex_count(), r.graph.vertex_count(), r.graph.edge_count()));
  EXPECT_TRUE(precedence_preserved(g, r.graph));
  EXPECT_GE(count_graph_paths(r.graph).value, count_graph_paths(g).value);
  for (VertexId v = 0; v < g.vertex_count(); ++v) EXPECT_EQ(r.graph.vertices[v].origin, g.vertices[v].origin);
}

TEST(Mapping, SeriesParallelInputUnchanged) {
  const TtspGraph g = generate_sp_graph(25, 3, /*simple=*/true);
  const MappingResult r = map_to_ttsp_detailed(g);
  EXPECT_EQ(r.stats.sync_vertices, 0);
  EXPECT_EQ(r.graph.vertex_count(), g.vertex_count());
  EXPECT_EQ(r.graph.edge_count(), g.edge_count());
}

TEST(Mapping, RandomDagsKeepBoundsAndPrecedence) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const TtspGraph g = generate_two_terminal_dag(3 + static_cast<int>(seed * 7 % 120), 1 + seed % 4, seed);
    const MappingResult r = map_to_ttsp_detailed(g);
    EXPECT_TRUE(is_series_parallel(r.graph)) << seed;
    EXPECT_TRUE(satisfies_mapping_bounds(g.vertex_count(), r.graph.vertex_count(), r.graph.edge_count())) << seed;
    EXPECT_TRUE(precedence_preserved(g, r.graph)) << seed;
  }
}

TEST(Mapping, LayeredBarrierFallbackIsSeriesParallel) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const TtspGraph g = generate_two_terminal_dag(40, 3, seed);
    const TtspGraph b = layered_barrier_mapping(g);
    EXPECT_TRUE(is_series_parallel(b)) << seed;
    EXPECT_TRUE(precedence_preserved(g, b)) << seed;
  }
}

TEST(Mapping, BoundCheck) {
  EXPECT_TRUE(satisfies_mapping_bounds(2, 2, 1));
  EXPECT_TRUE(satisfies_mapping_bounds(6, 7, 10));
  EXPECT_FALSE(satisfies_mapping_bounds(6, 13, 10));
  EXPECT_FALSE(satisfies_mapping_bounds(6, 5, 4));
  EXPECT_FALSE(satisfies_mapping_bounds(6, 7, 11));
}
