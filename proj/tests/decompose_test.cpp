#include <set>

#include <gtest/gtest.h>

#include "spwd/spwd.hpp"
#include "support.hpp"

using namespace spwd;

namespace {

std::vector<std::string> names(const DecompositionPlan& p, const SubProblem& sp, const WspInstance& inst) {
  std::vector<std::string> out;
  for (VertexId v : sp.vertices) {
    const Vertex& vx = p.graph.vertices[v];
    out.push_back(vx.origin ? inst.workflow().task(*vx.origin).name + (vx.has_workload() ? "" : "'") : "*");
  }
  return out;
}

WspInstance random_instance(std::uint64_t seed) {
  Rng rng(seed);
  const int n = rng.uniform_int(2, 40);
  Workflow wf = seed % 3 == 0 ? generate_random_sp_workflow(n, seed) : generate_random_dag(n, 3, seed);
  return make_instance(std::move(wf), table1_machines(), 1.0, CpvDeadline{});
}

}  // namespace

TEST(SizeSpec, ParseAndResolve) {
  EXPECT_EQ(SizeSpec::parse("3").resolve(100), 3);
  EXPECT_EQ(SizeSpec::parse("75%").resolve(4), 3);
  EXPECT_EQ(SizeSpec::parse("1%").resolve(80), 2);
  EXPECT_EQ(SizeSpec::parse("10%").resolve(81), 9);
  EXPECT_EQ(SizeSpec::parse("100%").resolve(7), 7);
  for (const char* bad : {"1", "0%", "101%", "abc", "2.5", "", "%"}) {
    try {
      SizeSpec::parse(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::config);
    }
  }
}

TEST(Weights, Diamond) {
  const WspInstance inst = fixtures::diamond();
  const TtspGraph g = normalize_two_terminal(inst.workflow());
  const std::vector<double> w = vertex_weights(g, inst);
  EXPECT_EQ(w, (std::vector<double>{1.5, 3.0, 3.0, 1.5}));
  SpTree tree = recognize_and_build_tree(g);
  assign_weights(tree, g, w);
  const SpNode& root = tree[tree.root];
  EXPECT_EQ(root.kind, NodeKind::parallel);
  EXPECT_DOUBLE_EQ(tree[root.left].weight, 6.0);
  EXPECT_DOUBLE_EQ(tree[root.right].weight, 6.0);
  EXPECT_DOUBLE_EQ(root.weight, 6.0);
}

TEST(Weights, RootEqualsHeaviestPath) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    Rng rng(seed);
    const TtspGraph g = generate_sp_graph(rng.uniform_int(1, 40), seed);
    std::vector<double> w(g.vertex_count());
    for (double& x : w) x = rng.uniform(0.0, 5.0);
    SpTree tree = recognize_and_build_tree(g);
    assign_weights(tree, g, w);
    EXPECT_NEAR(tree[tree.root].weight, fixtures::max_path_weight(g, w), 1e-9);
  }
}

TEST(Divide, DiamondAndChain) {
  const TtspGraph g = normalize_two_terminal(fixtures::diamond().workflow());
  const SpTree tree = recognize_and_build_tree(g);
  const auto frontier = divide(tree, 3);
  ASSERT_EQ(frontier.size(), 2u);
  for (NodeId id : frontier) {
    EXPECT_EQ(tree[id].kind, NodeKind::series);
    EXPECT_EQ(tree[id].vertex_count, 3);
  }
  EXPECT_EQ(divide(tree, 4), std::vector<NodeId>{tree.root});

  std::vector<std::pair<int, int>> chain;
  for (int i = 0; i < 8; ++i) chain.push_back({i, i + 1});
  const SpTree ct = recognize_and_build_tree(fixtures::graph_from_edges(9, 0, 8, chain));
  const auto leaves = divide(ct, 2);
  EXPECT_EQ(leaves.size(), 8u);
  for (NodeId id : leaves) EXPECT_TRUE(ct[id].is_leaf());
  EXPECT_THROW(divide(ct, 1), Error);
}

TEST(Substitution, ConnectorWithWorkloadGetsSubstitute) {
  // x -> v -> y, all weight 1: children 2 and 2, node 3.
  TtspGraph g = fixtures::graph_from_edges(3, 0, 2, {{0, 1}, {1, 2}});
  SpTree tree = recognize_and_build_tree(g);
  std::vector<double> w{1.0, 1.0, 1.0};
  assign_weights(tree, g, w);
  const NodeId root = tree.root;
  EXPECT_DOUBLE_EQ(tree[root].weight, 3.0);

  const auto subs = modify_series_nodes(tree, g, divide(tree, 2), w);
  ASSERT_EQ(subs.size(), 1u);
  const Substitution& s = subs.front();
  EXPECT_EQ(s.original, 1);
  EXPECT_EQ(g.vertices[s.substitute].kind, VertexKind::substitute);
  EXPECT_EQ(g.vertices[s.substitute].origin, g.vertices[1].origin);
  EXPECT_DOUBLE_EQ(w[s.substitute], 0.0);
  EXPECT_EQ(g.edges[s.link].from, 1);
  EXPECT_EQ(g.edges[s.link].to, s.substitute);
  EXPECT_EQ(tree[tree[root].right].source, s.substitute);
  EXPECT_DOUBLE_EQ(tree[tree[root].left].weight, 2.0);
  EXPECT_DOUBLE_EQ(tree[tree[root].right].weight, 1.0);
  EXPECT_DOUBLE_EQ(tree[root].weight, 3.0);
  EXPECT_EQ(tree[root].shared_vertex(), kNoVertex);
}

TEST(Substitution, NodesAtOrBelowFrontierUntouched) {
  TtspGraph g = fixtures::graph_from_edges(3, 0, 2, {{0, 1}, {1, 2}});
  SpTree tree = recognize_and_build_tree(g);
  std::vector<double> w{1.0, 1.0, 1.0};
  assign_weights(tree, g, w);
  EXPECT_TRUE(modify_series_nodes(tree, g, divide(tree, 3), w).empty());
  EXPECT_EQ(g.vertex_count(), 3);

  // Zero-weight connector needs no substitute either.
  std::vector<double> z{1.0, 0.0, 1.0};
  assign_weights(tree, g, z);
  EXPECT_TRUE(modify_series_nodes(tree, g, divide(tree, 2), z).empty());
}

TEST(Deadline, SeriesSplitsByWeightParallelInherits) {
  TtspGraph g = fixtures::graph_from_edges(3, 0, 2, {{0, 1}, {1, 2}});
  SpTree tree = recognize_and_build_tree(g);
  assign_weights(tree, g, {1.0, 1.0, 1.0});
  distribute_deadline(tree, 3.0);
  EXPECT_DOUBLE_EQ(*tree[tree[tree.root].left].deadline, 1.5);
  EXPECT_DOUBLE_EQ(*tree[tree[tree.root].right].deadline, 1.5);

  assign_weights(tree, g, {1.0, 0.0, 1.0});
  distribute_deadline(tree, 2.0);
  EXPECT_DOUBLE_EQ(*tree[tree[tree.root].left].deadline, 1.0);
  EXPECT_DOUBLE_EQ(*tree[tree[tree.root].right].deadline, 1.0);

  assign_weights(tree, g, {0.0, 0.0, 0.0});
  distribute_deadline(tree, 2.0);
  EXPECT_DOUBLE_EQ(*tree[tree[tree.root].left].deadline, 1.0);
  EXPECT_THROW(distribute_deadline(tree, 0.0), Error);
}

TEST(Deadline, ConservedThroughTheTree) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const WspInstance inst = random_instance(seed);
    const DecompositionPlan p = plan(inst, SizeSpec::absolute(2));
    const SpTree& t = p.tree;
    for (NodeId id = 0; id < t.size(); ++id) {
      const SpNode& n = t[id];
      if (n.is_leaf()) continue;
      if (n.kind == NodeKind::parallel) {
        EXPECT_DOUBLE_EQ(*t[n.left].deadline, *n.deadline);
        EXPECT_DOUBLE_EQ(*t[n.right].deadline, *n.deadline);
      } else {
        EXPECT_NEAR(*t[n.left].deadline + *t[n.right].deadline, *n.deadline, 1e-9);
      }
    }
  }
}

TEST(Plan, DiamondSizes) {
  const WspInstance inst = fixtures::diamond();

  const DecompositionPlan whole = plan(inst, SizeSpec::absolute(4));
  EXPECT_TRUE(whole.degenerate());
  EXPECT_EQ(whole.subproblems.size(), 1u);

  const DecompositionPlan halves = plan(inst, SizeSpec::parse("75%"));
  EXPECT_EQ(halves.max_size, 3);
  ASSERT_EQ(halves.subproblems.size(), 2u);
  EXPECT_EQ(names(halves, halves.subproblems[0], inst), (std::vector<std::string>{"A", "B", "D"}));
  EXPECT_EQ(names(halves, halves.subproblems[1], inst), (std::vector<std::string>{"A", "C", "D"}));
  for (const SubProblem& sp : halves.subproblems) {
    EXPECT_DOUBLE_EQ(sp.deadline, 6.0);
    EXPECT_EQ(sp.boundary, (std::vector<VertexId>{0, 3}));
  }

  const DecompositionPlan edges = plan(inst, SizeSpec::absolute(2));
  ASSERT_EQ(edges.subproblems.size(), 4u);
  EXPECT_EQ(edges.substitutions.size(), 2u);
  // Each branch A -> B -> D splits 4.5 / 1.5: the connector's weight moves to the left half.
  EXPECT_DOUBLE_EQ(edges.subproblems[0].deadline, 4.5);
  EXPECT_DOUBLE_EQ(edges.subproblems[1].deadline, 1.5);
}

TEST(Plan, ChainDeadlinesFollowWeights) {
  const Workflow wf = Workflow::create({{0, "A", 2}, {1, "B", 2}, {2, "C", 4}}, {{0, 1}, {1, 2}});
  const WspInstance inst = make_instance(wf, {{0, "m", 1.0, 1.0, 1}}, 1.0, 8.0);
  const DecompositionPlan p = plan(inst, SizeSpec::absolute(2));
  ASSERT_EQ(p.subproblems.size(), 2u);
  double total = 0.0;
  for (const SubProblem& sp : p.subproblems) {
    total += sp.deadline;
    EXPECT_NEAR(sp.deadline / 8.0, sp.weight / p.tree[p.tree.root].weight, 1e-12);
  }
  EXPECT_NEAR(total, 8.0, 1e-12);
  // A -> B carries A and B (4 s), B' -> C only C (4 s).
  EXPECT_DOUBLE_EQ(p.subproblems[0].deadline, 4.0);
  EXPECT_DOUBLE_EQ(p.subproblems[1].deadline, 4.0);
}

TEST(Plan, CoversEveryTaskAndEdge) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const WspInstance inst = random_instance(seed);
    for (int s : {2, 3, 5, 9}) {
      const DecompositionPlan p = plan(inst, SizeSpec::absolute(s));
      std::set<TaskId> tasks;
      std::vector<int> edge_use(p.graph.edge_count(), 0);
      for (const SubProblem& sp : p.subproblems) {
        EXPECT_LE(static_cast<int>(sp.vertices.size()), std::max(s, 2));
        for (VertexId v : sp.vertices)
          if (p.graph.vertices[v].has_workload()) tasks.insert(*p.graph.vertices[v].origin);
        for (EdgeId e : p.tree.edges_under(sp.node)) ++edge_use[e];
      }
      EXPECT_EQ(static_cast<int>(tasks.size()), inst.task_count());
      std::set<EdgeId> links;
      for (const Substitution& sub : p.substitutions) links.insert(sub.link);
      for (EdgeId e = 0; e < p.graph.edge_count(); ++e) EXPECT_EQ(edge_use[e], links.contains(e) ? 0 : 1);
    }
  }
}

TEST(Plan, FewerSubproblemsAsSizeGrows) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const WspInstance inst = random_instance(seed);
    std::size_t previous = std::numeric_limits<std::size_t>::max();
    for (int s = 2; s <= 2 * inst.task_count() + 2; ++s) {
      const std::size_t count = plan(inst, SizeSpec::absolute(s)).subproblems.size();
      EXPECT_LE(count, previous) << seed << " s=" << s;
      previous = count;
    }
    EXPECT_EQ(previous, 1u);
  }
}

TEST(Plan, CsvAndDump) {
  const DecompositionPlan p = plan(fixtures::diamond(), SizeSpec::absolute(3));
  EXPECT_EQ(plan_csv(p), "subproblem_id,vertex_count,weight_s,deadline_s,boundary_size\n0,3,6,6,2\n1,3,6,6,2\n");
  EXPECT_NE(dump_plan(p).find("boundary=[0 3]"), std::string::npos);
}
