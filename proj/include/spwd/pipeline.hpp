#pragma once

// End-to-end run: plan, solve every subproblem (optionally on several threads), merge.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "spwd/common.hpp"
#include "spwd/decompose.hpp"
#include "spwd/merge.hpp"
#include "spwd/model.hpp"
#include "spwd/solver.hpp"

namespace spwd {

enum class SolverKind { exact, greedy, lp_export };

inline SolverKind parse_solver_kind(std::string_view text) {
  if (text == "exact") return SolverKind::exact;
  if (text == "greedy") return SolverKind::greedy;
  if (text == "lp-export") return SolverKind::lp_export;
  throw Error(ErrorKind::config, "unknown solver '" + std::string(text) + "'");
}

struct RunOptions {
  SizeSpec size;
  SolverKind solver = SolverKind::exact;
  SolverOptions solver_options;
  int jobs = 1;
  std::size_t path_cap = kDefaultPathCap;
};

enum class RunStatus { ok, infeasible, budget_exhausted };

struct RunResult {
  DecompositionPlan plan;
  std::vector<Model> models;
  std::vector<Schedule> subschedules;  // empty for lp-export
  std::optional<MergeReport> merged;
  RunStatus status = RunStatus::ok;
  double seconds = 0.0;
};

inline Schedule solve_model(const Model& model, SolverKind kind, SolverOptions options) {
  return kind == SolverKind::greedy ? solve_greedy(model) : solve_exact(model, options);
}

/// Runs `task(i)` for i in [0, count) on up to `jobs` threads. The first exception is rethrown.
template <typename Fn>
void parallel_for(int count, int jobs, Fn&& task) {
  const int workers = std::clamp(jobs, 1, std::max(1, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < count && !failed; i = next++) {
        try {
          task(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Full decomposition run. When the plan does not divide the graph, the undivided model over the
/// original workflow is solved, so a single-subproblem run matches a direct solve.
inline RunResult run(const WspInstance& instance, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  result.plan = plan(instance, options.size);
  const auto& subs = result.plan.subproblems;
  const int count = static_cast<int>(subs.size());

  result.models.resize(count);
  if (result.plan.degenerate())
    result.models[0] = build_model(instance, options.path_cap);
  else
    parallel_for(count, options.jobs,
                 [&](int i) { result.models[i] = build_model(result.plan, subs[i], instance, options.path_cap); });

  if (options.solver != SolverKind::lp_export) {
    result.subschedules.resize(count);
    parallel_for(count, options.jobs, [&](int i) {
      result.subschedules[i] = solve_model(result.models[i], options.solver, options.solver_options);
    });
    const bool all_feasible = std::all_of(result.subschedules.begin(), result.subschedules.end(),
                                          [](const Schedule& s) { return s.feasible; });
    if (!all_feasible) {
      result.status = RunStatus::infeasible;
    } else {
      result.merged = merge(result.plan, result.subschedules, instance, options.path_cap);
      if (!result.merged->feasible())
        throw Error(ErrorKind::infeasible_merge, "merged schedule violates the deadline");
      const bool unproven = options.solver == SolverKind::exact &&
                            std::any_of(result.subschedules.begin(), result.subschedules.end(),
                                        [](const Schedule& s) { return s.status == SolveStatus::unproven; });
      if (unproven) result.status = RunStatus::budget_exhausted;
    }
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace spwd
