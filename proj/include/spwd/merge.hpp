#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/format.h>

#include "spwd/common.hpp"
#include "spwd/decompose.hpp"
#include "spwd/instance.hpp"
#include "spwd/solver.hpp"

namespace spwd {

struct PathSlack {
  double time = 0.0;
  double slack = 0.0;
};

struct ValidationResult {
  bool feasible = true;
  bool complete = true;  // every task has exactly one valid machine
  bool enumerated = true;  // false when paths were too many and the longest path was checked instead
  double max_path_time = 0.0;
  double cost = 0.0;
  std::vector<PathSlack> paths;  // lexicographic path order; empty when not enumerated
  std::vector<std::string> diagnostics;
};

/// Checks a full assignment (indexed by task id) against every root-to-leaf path of the
/// instance's workflow. Beyond `path_cap` paths only the longest path is evaluated, which decides
/// feasibility just as well since all times are non-negative.
inline ValidationResult validate_schedule(const std::vector<MachineId>& assignment, const WspInstance& instance,
                                          std::size_t path_cap = kDefaultPathCap) {
  ValidationResult r;
  const Workflow& wf = instance.workflow();
  if (static_cast<int>(assignment.size()) != wf.size()) {
    r.complete = r.feasible = false;
    r.diagnostics.push_back(fmt::format("{} assignments for {} tasks", assignment.size(), wf.size()));
    return r;
  }
  for (TaskId t = 0; t < wf.size(); ++t)
    if (assignment[t] < 0 || assignment[t] >= instance.machine_count()) {
      r.complete = r.feasible = false;
      r.diagnostics.push_back(fmt::format("task {} has no valid machine", wf.task(t).name));
    }
  if (!r.complete) return r;
  for (TaskId t = 0; t < wf.size(); ++t) r.cost += instance.cost(t, assignment[t]);
  if (wf.empty()) return r;

  const double d = instance.deadline();
  const PathCount count = count_workflow_paths(wf);
  if (count.saturated || count.value > path_cap) {
    r.enumerated = false;
    std::vector<double> finish(wf.size(), 0.0);
    for (TaskId v : wf.topological_order()) {
      double start = 0.0;
      for (TaskId p : wf.predecessors(v)) start = std::max(start, finish[p]);
      finish[v] = start + instance.time(v, assignment[v]);
      r.max_path_time = std::max(r.max_path_time, finish[v]);
    }
  } else {
    r.paths.reserve(count.value);
    std::function<void(TaskId, double)> walk = [&](TaskId v, double acc) {
      acc += instance.time(v, assignment[v]);
      if (wf.successors(v).empty()) {
        r.paths.push_back(PathSlack{acc, d - acc});
        r.max_path_time = std::max(r.max_path_time, acc);
        return;
      }
      for (TaskId s : wf.successors(v)) walk(s, acc);
    };
    for (TaskId root : wf.roots()) walk(root, 0.0);
  }
  if (r.max_path_time > d + kTolerance) {
    r.feasible = false;
    r.diagnostics.push_back(fmt::format("longest path takes {} s, deadline {} s", r.max_path_time, d));
  }
  return r;
}

struct Collision {
  TaskId task = 0;
  std::vector<MachineId> candidates;  // distinct, ascending
  MachineId chosen = 0;
};

struct MergeReport {
  std::vector<MachineId> assignment;  // by original task id
  double cost = 0.0;
  std::vector<Collision> collisions;
  int substitute_resolutions = 0;
  ValidationResult validation;
  bool feasible() const noexcept { return validation.feasible; }
};

/// Fastest candidate; ties go to the cheaper, then the lower id.
inline MachineId pick_fastest(const WspInstance& instance, TaskId t, const std::vector<MachineId>& candidates) {
  MachineId best = candidates.front();
  for (MachineId m : candidates) {
    const auto key = std::tuple(instance.time(t, m), instance.cost(t, m), m);
    if (key < std::tuple(instance.time(t, best), instance.cost(t, best), best)) best = m;
  }
  return best;
}

/// Joins subschedules (one per subproblem, in plan order) into an assignment of every original
/// task and validates it against the original workflow. Tasks scheduled by several subproblems
/// take the fastest of their machines; tasks no model schedules (zero runtime) take the fastest
/// machine overall.
inline MergeReport merge(const DecompositionPlan& p, const std::vector<Schedule>& subschedules,
                         const WspInstance& instance, std::size_t path_cap = kDefaultPathCap) {
  if (subschedules.size() != p.subproblems.size())
    throw Error(ErrorKind::missing_subschedule, fmt::format("{} subschedules for {} subproblems", subschedules.size(),
                                                            p.subproblems.size()));
  const int n = instance.task_count();
  std::vector<std::set<MachineId>> candidates(n);
  for (std::size_t k = 0; k < subschedules.size(); ++k) {
    const Schedule& s = subschedules[k];
    if (!s.feasible || s.machines.size() != s.tasks.size())
      throw Error(ErrorKind::missing_subschedule, fmt::format("subproblem {} has no feasible schedule", k));
    for (std::size_t i = 0; i < s.tasks.size(); ++i) candidates[s.tasks[i]].insert(s.machines[i]);
  }

  MergeReport report;
  report.assignment.assign(n, 0);
  std::vector<MachineId> all(instance.machine_count());
  for (MachineId m = 0; m < instance.machine_count(); ++m) all[m] = m;
  for (TaskId t = 0; t < n; ++t) {
    if (candidates[t].empty()) {
      report.assignment[t] = pick_fastest(instance, t, all);
      continue;
    }
    std::vector<MachineId> list(candidates[t].begin(), candidates[t].end());
    report.assignment[t] = pick_fastest(instance, t, list);
    if (list.size() > 1) report.collisions.push_back(Collision{t, list, report.assignment[t]});
  }
  for (const SubProblem& sp : p.subproblems)
    for (VertexId v : sp.vertices)
      if (p.substitutes.contains(v)) ++report.substitute_resolutions;

  report.validation = validate_schedule(report.assignment, instance, path_cap);
  report.cost = report.validation.cost;
  return report;
}

/// Final schedule as CSV plus a summary comment line.
inline std::string schedule_csv(const std::vector<MachineId>& assignment, const WspInstance& instance,
                                const ValidationResult& validation) {
  std::string out = "task_name,machine_name,exec_time_s,cost\n";
  for (TaskId t = 0; t < instance.task_count(); ++t) {
    const MachineId m = assignment[t];
    out += fmt::format("{},{},{},{}\n", instance.workflow().task(t).name, instance.machines()[m].name,
                       instance.time(t, m), instance.cost(t, m));
  }
  out += fmt::format("# total_cost={},max_path_time={},deadline={},feasible={}\n", validation.cost,
                     validation.max_path_time, instance.deadline(), validation.feasible ? "true" : "false");
  return out;
}

inline std::string merge_report_text(const MergeReport& r, const WspInstance& instance) {
  std::string out = fmt::format("cost: {}\nfeasible: {}\nmax path time: {}\ndeadline: {}\n", r.cost,
                                r.feasible() ? "yes" : "no", r.validation.max_path_time, instance.deadline());
  out += fmt::format("substitute resolutions: {}\ncollisions: {}\n", r.substitute_resolutions, r.collisions.size());
  for (const Collision& c : r.collisions) {
    out += fmt::format("  {}:", instance.workflow().task(c.task).name);
    for (MachineId m : c.candidates) out += " " + instance.machines()[m].name;
    out += " -> " + instance.machines()[c.chosen].name + "\n";
  }
  if (r.validation.enumerated) {
    double min_slack = std::numeric_limits<double>::infinity();
    for (const PathSlack& s : r.validation.paths) min_slack = std::min(min_slack, s.slack);
    out += fmt::format("paths checked: {}\n", r.validation.paths.size());
    if (!r.validation.paths.empty()) out += fmt::format("minimum slack: {}\n", min_slack);
  } else {
    out += "paths checked: longest path only\n";
  }
  for (const std::string& d : r.validation.diagnostics) out += "note: " + d + "\n";
  return out;
}

}  // namespace spwd
