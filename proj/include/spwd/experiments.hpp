#pragma once

// Size, path-inflation and cost sweeps over subgraph sizes, written as CSV.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "spwd/decompose.hpp"
#include "spwd/model.hpp"
#include "spwd/pipeline.hpp"
#include "spwd/ttsp_mapping.hpp"

namespace spwd {

struct SizeRow {
  SizeSpec s;
  int s_abs = 0;
  ProblemSize original;
  ProblemSize largest;  // independent maxima over subproblems
  double ratio_vars = 0.0;
  double ratio_cons = 0.0;
};

inline std::vector<SizeRow> analyze_size(const WspInstance& instance, const std::vector<SizeSpec>& sizes) {
  const ProblemSize original = instance_size(instance);
  std::vector<SizeRow> rows;
  for (const SizeSpec& s : sizes) {
    const DecompositionPlan p = plan(instance, s);
    SizeRow row{s, p.max_size, original, {}, 0.0, 0.0};
    for (const SubProblem& sp : p.subproblems) {
      const ProblemSize size = subproblem_size(p, sp, instance);
      row.largest.variables = std::max(row.largest.variables, size.variables);
      row.largest.constraints = std::max(row.largest.constraints, size.constraints);
    }
    row.ratio_vars = original.variables ? double(row.largest.variables) / double(original.variables) : 0.0;
    row.ratio_cons = original.constraints ? double(row.largest.constraints) / double(original.constraints) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

inline std::string size_csv(const std::vector<SizeRow>& rows) {
  std::string out = "s,orig_vars,orig_cons,max_sub_vars,max_sub_cons,ratio_vars,ratio_cons\n";
  for (const SizeRow& r : rows)
    out += fmt::format("{},{},{},{},{},{},{}\n", r.s.to_string(), r.original.variables, r.original.constraints,
                       r.largest.variables, r.largest.constraints, r.ratio_vars, r.ratio_cons);
  return out;
}

struct PathInflation {
  PathCount before;
  PathCount after;
  double ratio = 0.0;
};

/// Root-to-leaf paths of the workflow against source-to-sink paths of its mapped graph.
inline PathInflation path_inflation(const Workflow& wf) {
  PathInflation r;
  r.before = count_workflow_paths(wf);
  SpTree tree = recognize_and_build_tree(map_to_ttsp(normalize_two_terminal(wf)));
  r.after = count_paths(tree);
  r.ratio = r.before.value ? double(r.after.value) / double(r.before.value) : 0.0;
  return r;
}

inline std::string path_inflation_csv(const PathInflation& r) {
  return fmt::format("paths_before_mapping,paths_after_mapping,ratio,saturated\n{},{},{},{}\n", r.before.value,
                     r.after.value, r.ratio, r.before.saturated || r.after.saturated ? "true" : "false");
}

struct SweepRow {
  SizeSpec s;
  int s_abs = 0;
  double cost = 0.0;
  double cost_ratio = 0.0;
  int subproblems = 0;
  bool feasible = false;
  bool proven = true;  // every subproblem solved to proven optimality (exact solver)
};

struct SweepResult {
  double baseline_cost = 0.0;
  bool baseline_feasible = false;
  bool baseline_proven = true;
  std::vector<SweepRow> rows;
};

/// Full runs for every size against one undivided baseline solved with the same solver.
inline SweepResult sweep(const WspInstance& instance, const std::vector<SizeSpec>& sizes, RunOptions options) {
  if (options.solver == SolverKind::lp_export) throw Error(ErrorKind::config, "sweep needs the exact or greedy solver");
  SweepResult result;
  const Model whole = build_model(instance, options.path_cap);
  const Schedule base = solve_model(whole, options.solver, options.solver_options);
  result.baseline_feasible = base.feasible;
  result.baseline_cost = base.cost;
  result.baseline_proven = base.status == SolveStatus::optimal;
  for (const SizeSpec& s : sizes) {
    options.size = s;
    const RunResult r = run(instance, options);
    SweepRow row;
    row.s = s;
    row.s_abs = r.plan.max_size;
    row.subproblems = static_cast<int>(r.plan.subproblems.size());
    row.feasible = r.merged.has_value() && r.merged->feasible();
    row.cost = row.feasible ? r.merged->cost : 0.0;
    row.cost_ratio = row.feasible && result.baseline_feasible && base.cost > 0.0 ? row.cost / base.cost : 0.0;
    row.proven = options.solver == SolverKind::exact &&
                 std::all_of(r.subschedules.begin(), r.subschedules.end(),
                             [](const Schedule& x) { return x.status == SolveStatus::optimal; });
    result.rows.push_back(row);
  }
  return result;
}

inline std::string sweep_csv(const SweepResult& r) {
  std::string out = "s_pct,s_abs,cost,cost_ratio_vs_undivided,subproblem_count,feasible,baseline_proven\n";
  for (const SweepRow& row : r.rows)
    out += fmt::format("{},{},{},{},{},{},{}\n", row.s.percent ? fmt::format("{}", row.s.value) : std::string(),
                       row.s_abs, row.cost, row.cost_ratio, row.subproblems, row.feasible ? "true" : "false",
                       r.baseline_proven ? "true" : "false");
  return out;
}

/// Line chart of cost ratio against subgraph size.
inline std::string sweep_svg(const SweepResult& r) {
  const double width = 480, height = 320, margin = 48;
  double max_ratio = 1.0, min_ratio = 1.0, max_s = 1.0;
  for (const SweepRow& row : r.rows) {
    if (!row.feasible) continue;
    max_ratio = std::max(max_ratio, row.cost_ratio);
    min_ratio = std::min(min_ratio, row.cost_ratio);
    max_s = std::max(max_s, static_cast<double>(row.s_abs));
  }
  if (max_ratio - min_ratio < 1e-6) max_ratio = min_ratio + 0.01;
  auto x = [&](double s) { return margin + (width - 2 * margin) * s / max_s; };
  auto y = [&](double v) { return height - margin - (height - 2 * margin) * (v - min_ratio) / (max_ratio - min_ratio); };

  std::vector<const SweepRow*> points;
  for (const SweepRow& row : r.rows)
    if (row.feasible) points.push_back(&row);
  std::sort(points.begin(), points.end(), [](auto a, auto b) { return a->s_abs < b->s_abs; });

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
      "font-size=\"11\">\n",
      width, height);
  out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", margin, height - margin,
                     width - margin);
  out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", margin, margin,
                     height - margin);
  out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">max subgraph size</text>\n", width / 2,
                     height - 12);
  out += fmt::format("<text x=\"12\" y=\"{}\" transform=\"rotate(-90 12 {})\" text-anchor=\"middle\">cost ratio</text>\n",
                     height / 2, height / 2);
  out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.3f}</text>\n", margin - 4, y(max_ratio) + 4,
                     max_ratio);
  out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.3f}</text>\n", margin - 4, y(min_ratio) + 4,
                     min_ratio);
  std::string line;
  for (const SweepRow* p : points) line += fmt::format("{:.2f},{:.2f} ", x(p->s_abs), y(p->cost_ratio));
  out += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"" + line + "\"/>\n";
  for (const SweepRow* p : points)
    out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"steelblue\"><title>s={} ratio={}</title></circle>\n",
                       x(p->s_abs), y(p->cost_ratio), p->s_abs, p->cost_ratio);
  out += "</svg>\n";
  return out;
}

}  // namespace spwd
