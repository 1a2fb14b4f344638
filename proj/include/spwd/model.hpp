#pragma once

// The binary assignment model: one variable per (task, machine), a one-hot row per task and a
// deadline row per source-to-sink path.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "spwd/common.hpp"
#include "spwd/decompose.hpp"
#include "spwd/instance.hpp"
#include "spwd/sp_tree.hpp"
#include "spwd/ttsp_graph.hpp"

namespace spwd {

struct ProblemSize {
  std::uint64_t variables = 0;
  std::uint64_t constraints = 0;
  friend bool operator==(const ProblemSize&, const ProblemSize&) = default;
};

struct Model {
  std::vector<TaskId> tasks;      // schedulable tasks, ascending
  std::vector<std::string> task_names;
  std::vector<std::string> machine_names;
  int machine_count = 0;
  std::vector<double> time;       // tasks x machines, row-major
  std::vector<double> cost;
  std::vector<std::vector<int>> paths;  // indices into `tasks`
  double deadline = 0.0;

  int task_count() const noexcept { return static_cast<int>(tasks.size()); }
  double tau(int i, int m) const { return time[static_cast<std::size_t>(i) * machine_count + m]; }
  double c(int i, int m) const { return cost[static_cast<std::size_t>(i) * machine_count + m]; }
  int variable(int i, int m) const { return i * machine_count + m; }
};

inline ProblemSize problem_size(const Model& model) {
  return ProblemSize{static_cast<std::uint64_t>(model.task_count()) * model.machine_count,
                     static_cast<std::uint64_t>(model.task_count()) + model.paths.size()};
}

namespace detail {

// Builds a model from vertex paths over `g`; vertices without workload are dropped from paths.
inline Model model_from_paths(const TtspGraph& g, const std::vector<std::vector<VertexId>>& vertex_paths,
                              const std::vector<VertexId>& vertices, double deadline, const WspInstance& instance) {
  Model model;
  model.deadline = deadline;
  model.machine_count = instance.machine_count();
  for (const Machine& m : instance.machines()) model.machine_names.push_back(m.name);

  std::map<TaskId, int> index;
  for (VertexId v : vertices) {
    const Vertex& vx = g.vertices[v];
    if (vx.has_workload() && instance.mean_time(*vx.origin) > 0.0) index.emplace(*vx.origin, 0);
  }
  for (auto& [task, i] : index) {
    i = model.task_count();
    model.tasks.push_back(task);
    model.task_names.push_back(instance.workflow().task(task).name);
    for (MachineId m = 0; m < model.machine_count; ++m) {
      model.time.push_back(instance.time(task, m));
      model.cost.push_back(instance.cost(task, m));
    }
  }
  model.paths.reserve(vertex_paths.size());
  for (const auto& path : vertex_paths) {
    std::vector<int> row;
    for (VertexId v : path) {
      const Vertex& vx = g.vertices[v];
      if (!vx.has_workload()) continue;
      if (auto it = index.find(*vx.origin); it != index.end()) row.push_back(it->second);
    }
    // A path through workload-free vertices only constrains nothing.
    if (!row.empty()) model.paths.push_back(std::move(row));
  }
  return model;
}

}  // namespace detail

/// Model of the undivided instance over the original workflow's root-to-leaf paths.
inline Model build_model(const WspInstance& instance, std::size_t path_cap = kDefaultPathCap) {
  const Workflow& wf = instance.workflow();
  TtspGraph g;
  for (const Task& t : wf.tasks()) g.add_vertex(VertexKind::original, t.id);
  std::vector<VertexId> all(wf.size());
  for (int i = 0; i < wf.size(); ++i) all[i] = i;
  return detail::model_from_paths(g, enumerate_workflow_paths(wf, path_cap), all, instance.deadline(), instance);
}

/// Model of a subgraph whose paths come from an SP-tree node, or from enumeration when no tree is given.
inline Model build_model(const TtspGraph& g, double deadline, const WspInstance& instance,
                         const SpTree* tree = nullptr, NodeId node = kNoNode,
                         std::size_t path_cap = kDefaultPathCap) {
  std::vector<VertexId> vertices;
  std::vector<std::vector<VertexId>> paths;
  if (tree != nullptr) {
    const NodeId at = node == kNoNode ? tree->root : node;
    vertices = tree->vertices_under(at, g);
    paths = sp_paths(*tree, at, g, path_cap);
  } else {
    for (VertexId v = 0; v < g.vertex_count(); ++v) vertices.push_back(v);
    paths = enumerate_paths(g, path_cap);
  }
  return detail::model_from_paths(g, paths, vertices, deadline, instance);
}

/// Model of one subproblem of a plan.
inline Model build_model(const DecompositionPlan& p, const SubProblem& sp, const WspInstance& instance,
                         std::size_t path_cap = kDefaultPathCap) {
  return build_model(p.graph, sp.deadline, instance, &p.tree, sp.node, path_cap);
}

/// Size of a subproblem's model without materializing its paths: the tree yields both the path
/// count and the number of paths that meet no schedulable task.
inline ProblemSize subproblem_size(const DecompositionPlan& p, const SubProblem& sp, const WspInstance& instance) {
  auto schedulable = [&](VertexId v) {
    const Vertex& vx = p.graph.vertices[v];
    return vx.has_workload() && instance.mean_time(*vx.origin) > 0.0;
  };
  std::uint64_t tasks = 0;
  for (VertexId v : sp.vertices)
    if (schedulable(v)) ++tasks;

  std::map<NodeId, std::pair<PathCount, PathCount>> count;  // (all paths, empty paths)
  const auto order = p.tree.preorder(sp.node);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const SpNode& n = p.tree[*it];
    if (n.is_leaf()) {
      const GraphEdge& e = p.graph.edges[n.edge];
      const bool empty = !schedulable(e.from) && !schedulable(e.to);
      count[*it] = {PathCount{1, false}, PathCount{empty ? 1u : 0u, false}};
      continue;
    }
    const auto& [la, le] = count.at(n.left);
    const auto& [ra, re] = count.at(n.right);
    if (n.kind == NodeKind::series)
      count[*it] = {la * ra, le * re};
    else
      count[*it] = {la + ra, le + re};
  }
  const auto& [all, empty] = count.at(sp.node);
  const std::uint64_t rows = all.saturated ? all.value : all.value - empty.value;
  return ProblemSize{tasks * static_cast<std::uint64_t>(instance.machine_count()),
                     (PathCount{tasks, false} + PathCount{rows, all.saturated}).value};
}

/// Size of the undivided model, counting paths without enumerating them.
inline ProblemSize instance_size(const WspInstance& instance) {
  const Workflow& wf = instance.workflow();
  std::uint64_t tasks = 0;
  for (TaskId t = 0; t < instance.task_count(); ++t)
    if (instance.mean_time(t) > 0.0) ++tasks;
  // Paths made only of zero-runtime tasks yield no row; count them to leave them out.
  std::vector<PathCount> empty(wf.size());
  PathCount empty_total;
  const auto& order = wf.topological_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const TaskId v = *it;
    if (instance.mean_time(v) > 0.0) continue;
    PathCount sum{wf.successors(v).empty() ? 1u : 0u, false};
    for (TaskId s : wf.successors(v)) sum = sum + empty[s];
    empty[v] = sum;
  }
  for (TaskId r : wf.roots()) empty_total = empty_total + empty[r];
  const PathCount paths = count_workflow_paths(wf);
  const std::uint64_t rows = paths.saturated ? paths.value : paths.value - empty_total.value;
  return ProblemSize{tasks * static_cast<std::uint64_t>(instance.machine_count()),
                     (PathCount{tasks, false} + PathCount{rows, paths.saturated}).value};
}

/// LP text: objective, one-hot equalities, path inequalities and the binary section.
inline std::string export_lp(const Model& model) {
  auto var = [&](int i, int m) { return fmt::format("x_{}_{}", model.tasks[i], m); };
  std::string out = "\\ workflow scheduling model\nMinimize\n obj:";
  for (int i = 0; i < model.task_count(); ++i)
    for (int m = 0; m < model.machine_count; ++m) out += fmt::format(" + {} {}", model.c(i, m), var(i, m));
  if (model.task_count() == 0) out += " 0";
  out += "\nSubject To\n";
  for (int i = 0; i < model.task_count(); ++i) {
    out += fmt::format(" onehot_{}:", model.tasks[i]);
    for (int m = 0; m < model.machine_count; ++m) out += fmt::format(" + {}", var(i, m));
    out += " = 1\n";
  }
  for (std::size_t p = 0; p < model.paths.size(); ++p) {
    const auto& row = model.paths[p];
    out += fmt::format(" path_{}:", p);
    for (int i : row)
      for (int m = 0; m < model.machine_count; ++m) out += fmt::format(" + {} {}", model.tau(i, m), var(i, m));
    out += fmt::format(" <= {}\n", model.deadline);
  }
  out += "Binary\n";
  for (int i = 0; i < model.task_count(); ++i)
    for (int m = 0; m < model.machine_count; ++m) out += " " + var(i, m) + "\n";
  out += "End\n";
  return out;
}

}  // namespace spwd
