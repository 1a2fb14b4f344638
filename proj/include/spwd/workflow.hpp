#pragma once

#include <algorithm>
#include <compare>
#include <functional>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spwd/common.hpp"

namespace spwd {

struct Task {
  TaskId id = 0;
  std::string name;
  double base_runtime = 0.0;  // seconds at the reference speed
};

struct Machine {
  MachineId id = 0;
  std::string name;
  double speed = 1.0;  // GHz
  double price = 0.0;  // currency per second
  int core_count = 1;  // stored only; the model has no capacity constraint
};

struct Edge {
  TaskId from = 0;
  TaskId to = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct ValidationReport {
  bool valid = true;
  bool acyclic = true;
  bool ids_contiguous = true;
  bool edges_valid = true;
  std::vector<TaskId> roots;
  std::vector<TaskId> leaves;
  std::vector<std::string> diagnostics;
};

namespace detail {

// Kahn's algorithm, smallest ready id first. Returns fewer than n ids on a cycle.
inline std::vector<int> topological_order(int n, const std::vector<std::vector<int>>& succ,
                                          const std::vector<int>& in_degree) {
  std::vector<int> remaining = in_degree;
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int v = 0; v < n; ++v)
    if (remaining[v] == 0) ready.push(v);
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int w : succ[v])
      if (--remaining[w] == 0) ready.push(w);
  }
  return order;
}

}  // namespace detail

/// Checks raw task/edge lists without requiring them to form a Workflow.
inline ValidationReport validate(std::span<const Task> tasks, std::span<const Edge> edges) {
  ValidationReport report;
  const int n = static_cast<int>(tasks.size());
  for (int i = 0; i < n; ++i) {
    if (tasks[i].id != i) {
      report.ids_contiguous = false;
      report.diagnostics.push_back("task at position " + std::to_string(i) + " has id " +
                                   std::to_string(tasks[i].id));
    }
    if (!(tasks[i].base_runtime >= 0.0)) {
      report.valid = false;
      report.diagnostics.push_back("task " + tasks[i].name + " has negative runtime");
    }
  }

  std::vector<std::vector<int>> succ(n);
  std::vector<int> in_degree(n, 0), out_degree(n, 0);
  std::set<Edge> seen;
  for (const Edge& e : edges) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n) {
      report.edges_valid = false;
      report.diagnostics.push_back("edge (" + std::to_string(e.from) + ", " + std::to_string(e.to) +
                                   ") references a nonexistent task");
      continue;
    }
    if (e.from == e.to) {
      report.edges_valid = false;
      report.acyclic = false;
      report.diagnostics.push_back("self-loop on task " + std::to_string(e.from));
      continue;
    }
    if (!seen.insert(e).second) {
      report.edges_valid = false;
      report.diagnostics.push_back("duplicate edge (" + std::to_string(e.from) + ", " +
                                   std::to_string(e.to) + ")");
      continue;
    }
    succ[e.from].push_back(e.to);
    ++in_degree[e.to];
    ++out_degree[e.from];
  }

  if (static_cast<int>(detail::topological_order(n, succ, in_degree).size()) != n) {
    report.acyclic = false;
    report.diagnostics.push_back("graph contains a cycle");
  }
  for (int v = 0; v < n; ++v) {
    if (in_degree[v] == 0) report.roots.push_back(v);
    if (out_degree[v] == 0) report.leaves.push_back(v);
  }
  report.valid = report.valid && report.acyclic && report.ids_contiguous && report.edges_valid;
  return report;
}

/// Immutable task DAG.
class Workflow {
 public:
  Workflow() = default;

  /// Throws Error(cycle) for cycles and Error(invalid_input) for every other defect.
  static Workflow create(std::vector<Task> tasks, std::vector<Edge> edges) {
    ValidationReport report = validate(tasks, edges);
    if (!report.valid) {
      std::string message = report.diagnostics.empty() ? "invalid workflow" : report.diagnostics.front();
      throw Error(report.acyclic ? ErrorKind::invalid_input : ErrorKind::cycle, message);
    }
    Workflow wf;
    const int n = static_cast<int>(tasks.size());
    wf.tasks_ = std::move(tasks);
    wf.edges_ = std::move(edges);
    wf.succ_.assign(n, {});
    wf.pred_.assign(n, {});
    for (const Edge& e : wf.edges_) {
      wf.succ_[e.from].push_back(e.to);
      wf.pred_[e.to].push_back(e.from);
    }
    for (int v = 0; v < n; ++v) {
      std::sort(wf.succ_[v].begin(), wf.succ_[v].end());
      std::sort(wf.pred_[v].begin(), wf.pred_[v].end());
    }
    wf.roots_ = std::move(report.roots);
    wf.leaves_ = std::move(report.leaves);
    std::vector<int> in_degree(n);
    for (int v = 0; v < n; ++v) in_degree[v] = static_cast<int>(wf.pred_[v].size());
    wf.topo_ = detail::topological_order(n, wf.succ_, in_degree);
    return wf;
  }

  int size() const noexcept { return static_cast<int>(tasks_.size()); }
  bool empty() const noexcept { return tasks_.empty(); }
  const std::vector<Task>& tasks() const noexcept { return tasks_; }
  const Task& task(TaskId id) const { return tasks_.at(id); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<TaskId>& successors(TaskId id) const { return succ_.at(id); }
  const std::vector<TaskId>& predecessors(TaskId id) const { return pred_.at(id); }
  const std::vector<TaskId>& roots() const noexcept { return roots_; }
  const std::vector<TaskId>& leaves() const noexcept { return leaves_; }
  const std::vector<TaskId>& topological_order() const noexcept { return topo_; }

 private:
  std::vector<Task> tasks_;
  std::vector<Edge> edges_;
  std::vector<std::vector<TaskId>> succ_;
  std::vector<std::vector<TaskId>> pred_;
  std::vector<TaskId> roots_;
  std::vector<TaskId> leaves_;
  std::vector<TaskId> topo_;
};

inline ValidationReport validate(const Workflow& workflow) {
  return validate(std::span<const Task>(workflow.tasks()), std::span<const Edge>(workflow.edges()));
}

/// Number of root-to-leaf paths, by dynamic programming over the topological order.
inline PathCount count_workflow_paths(const Workflow& wf) {
  const int n = wf.size();
  std::vector<PathCount> from(n);
  const auto& topo = wf.topological_order();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    TaskId v = *it;
    if (wf.successors(v).empty()) {
      from[v] = PathCount{1, false};
      continue;
    }
    PathCount sum;
    for (TaskId w : wf.successors(v)) sum = sum + from[w];
    from[v] = sum;
  }
  PathCount total;
  for (TaskId r : wf.roots()) total = total + from[r];
  return total;
}

/// Root-to-leaf task paths in lexicographic order; throws Error(path_explosion) past `cap`.
inline std::vector<std::vector<TaskId>> enumerate_workflow_paths(const Workflow& wf,
                                                                 std::size_t cap = kDefaultPathCap) {
  std::vector<std::vector<TaskId>> paths;
  std::vector<TaskId> current;
  std::function<void(TaskId)> walk = [&](TaskId v) {
    current.push_back(v);
    if (wf.successors(v).empty()) {
      if (paths.size() >= cap)
        throw Error(ErrorKind::path_explosion, "more than " + std::to_string(cap) + " workflow paths");
      paths.push_back(current);
    } else {
      for (TaskId w : wf.successors(v)) walk(w);
    }
    current.pop_back();
  };
  for (TaskId r : wf.roots()) walk(r);
  return paths;
}

}  // namespace spwd
