#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "spwd/common.hpp"
#include "spwd/model.hpp"

namespace spwd {

enum class SolveStatus {
  optimal,     // proven minimum (or exhaustive)
  unproven,    // feasible incumbent, budget exhausted or heuristic
  infeasible,  // no assignment meets every path deadline
};

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::unproven: return "unproven";
    case SolveStatus::infeasible: return "infeasible";
  }
  return "?";
}

/// Assignment of a model's tasks; `machines[i]` serves `tasks[i]`.
struct Schedule {
  std::vector<TaskId> tasks;
  std::vector<MachineId> machines;
  double cost = 0.0;
  double max_path_time = 0.0;
  bool feasible = false;
  SolveStatus status = SolveStatus::infeasible;
  std::uint64_t nodes = 0;
  double lower_bound = 0.0;  // proven bound on the optimum (exact solver only)
};

struct SolverOptions {
  std::uint64_t node_budget = 100'000'000;
  int node_iterations = 15;  // subgradient steps per search node
};

namespace detail {

inline std::vector<std::vector<int>> paths_by_task(const Model& model) {
  std::vector<std::vector<int>> out(model.task_count());
  for (int p = 0; p < static_cast<int>(model.paths.size()); ++p)
    for (int i : model.paths[p]) out[i].push_back(p);
  return out;
}

inline MachineId fastest_machine(const Model& model, int i) {
  MachineId best = 0;
  for (MachineId m = 1; m < model.machine_count; ++m) {
    const double dt = model.tau(i, m) - model.tau(i, best);
    if (dt < 0.0 || (dt == 0.0 && model.c(i, m) < model.c(i, best))) best = m;
  }
  return best;
}

inline bool fastest_is_feasible(const Model& model) {
  for (const auto& path : model.paths) {
    double sum = 0.0;
    for (int i : path) sum += model.tau(i, fastest_machine(model, i));
    if (sum > model.deadline + kTolerance) return false;
  }
  return true;
}

inline Schedule infeasible_schedule(const Model& model) {
  Schedule s;
  s.tasks = model.tasks;
  s.status = SolveStatus::infeasible;
  s.feasible = false;
  return s;
}

}  // namespace detail

/// Fills cost, max path time and feasibility of an assignment over the model.
inline Schedule evaluate(const Model& model, std::vector<MachineId> machines) {
  Schedule s;
  s.tasks = model.tasks;
  s.machines = std::move(machines);
  for (int i = 0; i < model.task_count(); ++i) s.cost += model.c(i, s.machines[i]);
  s.feasible = true;
  for (const auto& path : model.paths) {
    double sum = 0.0;
    for (int i : path) sum += model.tau(i, s.machines[i]);
    s.max_path_time = std::max(s.max_path_time, sum);
    if (sum > model.deadline + kTolerance) s.feasible = false;
  }
  s.status = s.feasible ? SolveStatus::unproven : SolveStatus::infeasible;
  return s;
}

namespace detail {

// Cost descent: repeatedly moves one task to a cheaper machine, preferring moves that free time,
// then the best cost saving per second of path time consumed, while every path stays within d.
inline void descend(const Model& model, const std::vector<std::vector<int>>& by_task, std::vector<MachineId>& cur,
                    std::vector<double>& path_time) {
  const int n = model.task_count();
  for (;;) {
    int best_i = -1;
    MachineId best_m = -1;
    bool best_free = false;
    double best_ratio = 0.0;
    for (int i = 0; i < n; ++i) {
      for (MachineId m = 0; m < model.machine_count; ++m) {
        const double saving = model.c(i, cur[i]) - model.c(i, m);
        if (!(saving > kTolerance)) continue;
        const double dt = model.tau(i, m) - model.tau(i, cur[i]);
        bool fits = true;
        for (int p : by_task[i])
          if (path_time[p] + dt > model.deadline + kTolerance) {
            fits = false;
            break;
          }
        if (!fits) continue;
        const bool is_free = dt <= 0.0;
        const double ratio = is_free ? saving : saving / dt;
        if (best_i < 0 || (is_free && !best_free) || (is_free == best_free && ratio > best_ratio)) {
          best_i = i;
          best_m = m;
          best_free = is_free;
          best_ratio = ratio;
        }
      }
    }
    if (best_i < 0) return;
    const double dt = model.tau(best_i, best_m) - model.tau(best_i, cur[best_i]);
    for (int p : by_task[best_i]) path_time[p] += dt;
    cur[best_i] = best_m;
  }
}

inline std::vector<double> path_times(const Model& model, const std::vector<MachineId>& cur) {
  std::vector<double> t(model.paths.size(), 0.0);
  for (std::size_t p = 0; p < model.paths.size(); ++p)
    for (int i : model.paths[p]) t[p] += model.tau(i, cur[i]);
  return t;
}

// Makes an assignment feasible by speeding up tasks on violated paths (largest drop in total
// overrun per unit of extra cost first), then runs the cost descent. False if repair gets stuck.
inline bool repair(const Model& model, const std::vector<std::vector<int>>& by_task, std::vector<MachineId>& cur) {
  std::vector<double> time = path_times(model, cur);
  auto over = [&](int p) { return std::max(0.0, time[p] - model.deadline - kTolerance); };
  for (;;) {
    std::vector<char> candidate(model.task_count(), 0);
    bool violated = false;
    for (std::size_t p = 0; p < model.paths.size(); ++p)
      if (over(static_cast<int>(p)) > 0.0) {
        violated = true;
        for (int i : model.paths[p]) candidate[i] = 1;
      }
    if (!violated) break;
    int best_i = -1;
    MachineId best_m = -1;
    double best_score = 0.0;
    for (int i = 0; i < model.task_count(); ++i) {
      if (!candidate[i]) continue;
      for (MachineId m = 0; m < model.machine_count; ++m) {
        const double dt = model.tau(i, m) - model.tau(i, cur[i]);
        if (!(dt < 0.0)) continue;
        double gain = 0.0;
        for (int p : by_task[i]) gain += over(p) - std::max(0.0, time[p] + dt - model.deadline - kTolerance);
        if (!(gain > 0.0)) continue;
        const double extra = std::max(model.c(i, m) - model.c(i, cur[i]), 1e-12);
        const double score = gain / extra;
        if (score > best_score) {
          best_score = score;
          best_i = i;
          best_m = m;
        }
      }
    }
    if (best_i < 0) return false;
    const double dt = model.tau(best_i, best_m) - model.tau(best_i, cur[best_i]);
    for (int p : by_task[best_i]) time[p] += dt;
    cur[best_i] = best_m;
  }
  descend(model, by_task, cur, time);
  return true;
}

}  // namespace detail

/// Starts from the fastest machines and keeps taking the move with the best cost saving per second
/// of path time consumed until no cheaper machine fits.
inline Schedule solve_greedy(const Model& model) {
  if (!detail::fastest_is_feasible(model)) return detail::infeasible_schedule(model);
  const int n = model.task_count();
  const auto by_task = detail::paths_by_task(model);
  std::vector<MachineId> cur(n);
  for (int i = 0; i < n; ++i) cur[i] = detail::fastest_machine(model, i);
  std::vector<double> time = detail::path_times(model, cur);
  detail::descend(model, by_task, cur, time);
  Schedule s = evaluate(model, std::move(cur));
  s.status = SolveStatus::unproven;
  return s;
}

/// Exhaustive minimum over all machine^task assignments; first minimum in lexicographic order.
inline Schedule brute_force(const Model& model, double max_space = 1e7) {
  const int n = model.task_count();
  if (std::pow(static_cast<double>(model.machine_count), n) > max_space)
    throw Error(ErrorKind::space_too_large, std::to_string(model.machine_count) + "^" + std::to_string(n) +
                                                " assignments");
  std::vector<MachineId> cur(n, 0);
  std::vector<MachineId> best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (;;) {
    double cost = 0.0;
    for (int i = 0; i < n; ++i) cost += model.c(i, cur[i]);
    if (cost < best_cost) {
      bool ok = true;
      for (const auto& path : model.paths) {
        double sum = 0.0;
        for (int i : path) sum += model.tau(i, cur[i]);
        if (sum > model.deadline + kTolerance) {
          ok = false;
          break;
        }
      }
      if (ok) {
        best_cost = cost;
        best = cur;
      }
    }
    int k = n - 1;
    while (k >= 0 && ++cur[k] == model.machine_count) cur[k--] = 0;
    if (k < 0) break;
  }
  if (best.empty() && n > 0) return detail::infeasible_schedule(model);
  Schedule s = evaluate(model, std::move(best));
  s.status = SolveStatus::optimal;
  return s;
}

namespace detail {

// Depth-first branch-and-bound. Tasks are fixed in descending mean-time order; each task tries its
// non-dominated machines by ascending cost. A branch is cut when
//  - its cost plus the cheapest completion reaches the incumbent,
//  - some path cannot meet the deadline even with the fastest machines for its open tasks, or
//  - a Lagrangian relaxation of the path rows reaches the incumbent. Multipliers come from
//    subgradient ascent at the root and are re-optimized, warm-started, at nodes the root
//    multipliers cannot cut. Open tasks only consider machines that still fit every path.
class BranchAndBound {
 public:
  BranchAndBound(const Model& model, SolverOptions options) : model_(model), options_(options) {}

  Schedule run() {
    const int n = model_.task_count();
    Schedule greedy = solve_greedy(model_);
    if (!greedy.feasible) return greedy;
    if (n == 0) {
      greedy.status = SolveStatus::optimal;
      return greedy;
    }
    incumbent_ = greedy.machines;
    incumbent_cost_ = greedy.cost;

    rows_ = model_.paths.size();
    by_task_ = paths_by_task(model_);
    prepare_order();
    committed_.assign(rows_, 0.0);
    open_min_.assign(rows_, 0.0);
    for (std::size_t p = 0; p < rows_; ++p)
      for (int i : model_.paths[p]) open_min_[p] += min_time_[i];
    current_.assign(n, -1);
    lambda_stack_.assign(n + 1, std::vector<double>(rows_, 0.0));
    load_.assign(n, 0.0);
    limit_.assign(n, 0.0);
    pick_.assign(n, 0);

    std::size_t work = static_cast<std::size_t>(n) * model_.machine_count;
    for (const auto& p : model_.paths) work += p.size();
    const int root_iterations =
        static_cast<int>(std::clamp<std::size_t>(400'000'000 / std::max<std::size_t>(work, 1), 20, 600));
    root_bound_ = std::max(0.0, improve_bound(lambda_stack_[0], root_iterations, /*repair_every=*/25));
    prepare_root_bounds();

    if (!beaten(root_bound_)) search(0, 0.0, 0.0);

    Schedule s = evaluate(model_, incumbent_);
    s.nodes = nodes_;
    s.status = exhausted_ ? SolveStatus::unproven : SolveStatus::optimal;
    s.lower_bound = exhausted_ ? std::min(root_bound_, s.cost) : s.cost;
    return s;
  }

 private:
  void prepare_order() {
    const int n = model_.task_count();
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    std::vector<double> mean(n, 0.0);
    for (int i = 0; i < n; ++i) {
      for (MachineId m = 0; m < model_.machine_count; ++m) mean[i] += model_.tau(i, m);
      mean[i] /= model_.machine_count;
    }
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) { return mean[a] > mean[b]; });

    min_time_.assign(n, 0.0);
    min_cost_.assign(n, 0.0);
    choices_.assign(n, {});
    for (int i = 0; i < n; ++i) {
      min_time_[i] = model_.tau(i, 0);
      min_cost_[i] = model_.c(i, 0);
      for (MachineId m = 0; m < model_.machine_count; ++m) {
        min_time_[i] = std::min(min_time_[i], model_.tau(i, m));
        min_cost_[i] = std::min(min_cost_[i], model_.c(i, m));
        bool dominated = false;
        for (MachineId k = 0; k < model_.machine_count && !dominated; ++k) {
          if (k == m) continue;
          const bool no_worse = model_.c(i, k) <= model_.c(i, m) && model_.tau(i, k) <= model_.tau(i, m);
          const bool better = model_.c(i, k) < model_.c(i, m) || model_.tau(i, k) < model_.tau(i, m);
          dominated = no_worse && (better || k < m);
        }
        if (!dominated) choices_[i].push_back(m);
      }
      std::stable_sort(choices_[i].begin(), choices_[i].end(),
                       [&](MachineId a, MachineId b) { return model_.c(i, a) < model_.c(i, b); });
    }
  }

  // Longest time each open task may still take without breaking a path, given the committed
  // times and the fastest machines for the other open tasks.
  void compute_limits() {
    for (int i = 0; i < model_.task_count(); ++i) {
      if (current_[i] >= 0) continue;
      double lim = std::numeric_limits<double>::infinity();
      for (int p : by_task_[i]) lim = std::min(lim, model_.deadline - committed_[p] - open_min_[p] + min_time_[i]);
      limit_[i] = lim + kTolerance;
    }
  }

  // Lagrangian value at `lambda` for the current node; fills pick_ with the minimizing machines.
  // Returns +infinity when some open task has no machine left.
  double lagrangian(const std::vector<double>& lambda) {
    const int n = model_.task_count();
    std::fill(load_.begin(), load_.end(), 0.0);
    double value = 0.0;
    for (std::size_t p = 0; p < rows_; ++p) {
      if (lambda[p] == 0.0) continue;
      value -= model_.deadline * lambda[p];
      for (int i : model_.paths[p]) load_[i] += lambda[p];
    }
    for (int i = 0; i < n; ++i) {
      if (current_[i] >= 0) {
        pick_[i] = current_[i];
        value += model_.c(i, pick_[i]) + load_[i] * model_.tau(i, pick_[i]);
        continue;
      }
      double best = std::numeric_limits<double>::infinity();
      for (MachineId m : choices_[i]) {
        if (model_.tau(i, m) > limit_[i]) continue;
        const double r = model_.c(i, m) + load_[i] * model_.tau(i, m);
        if (r < best) {
          best = r;
          pick_[i] = m;
        }
      }
      if (best == std::numeric_limits<double>::infinity()) return best;
      value += best;
    }
    return value;
  }

  // Subgradient ascent from `lambda` (updated in place to the best multipliers found).
  // Lagrangian solutions that happen to be feasible, or that repair into feasible ones, update
  // the incumbent. Returns the best bound.
  double improve_bound(std::vector<double>& lambda, int iterations, int repair_every) {
    compute_limits();
    std::vector<double> trial = lambda, g(rows_);
    double best = -std::numeric_limits<double>::infinity();
    double theta = 1.0;
    int stale = 0;
    for (int it = 0; it < iterations; ++it) {
      const double value = lagrangian(trial);
      if (value == std::numeric_limits<double>::infinity()) return value;
      if (value > best + 1e-12) {
        best = value;
        lambda = trial;
        stale = 0;
      } else if (++stale >= 10) {
        theta /= 2.0;
        stale = 0;
        if (theta < 1e-4) break;
      }
      if (beaten(best)) break;
      double norm = 0.0;
      bool feasible = true;
      for (std::size_t p = 0; p < rows_; ++p) {
        double sum = -model_.deadline;
        for (int i : model_.paths[p]) sum += model_.tau(i, pick_[i]);
        g[p] = sum;
        if (sum > kTolerance) feasible = false;
        if (sum > 0.0 || trial[p] > 0.0) norm += sum * sum;
      }
      if (feasible) offer(pick_);
      else if (repair_every > 0 && it % repair_every == 0) {
        std::vector<MachineId> cur = pick_;
        if (repair(model_, by_task_, cur)) offer(cur);
      }
      if (norm <= 0.0) break;
      const double step = theta * std::max(incumbent_cost_ - value, margin()) / norm;
      for (std::size_t p = 0; p < rows_; ++p) trial[p] = std::max(0.0, trial[p] + step * g[p]);
    }
    return best;
  }

  // Bounds are summed in a different order than assignment costs, so a branch is only cut when
  // its bound exceeds the incumbent by more than rounding noise. Ties are still searched, and the
  // result is the assignment with the smallest cost as summed in task order.
  double margin() const { return 1e-9 * std::max(1.0, std::abs(incumbent_cost_)); }
  bool beaten(double bound) const { return bound > incumbent_cost_ + margin(); }

  double task_order_cost(const std::vector<MachineId>& machines) const {
    double cost = 0.0;
    for (int i = 0; i < model_.task_count(); ++i) cost += model_.c(i, machines[i]);
    return cost;
  }

  void offer(const std::vector<MachineId>& machines) {
    const double cost = task_order_cost(machines);
    if (!(cost < incumbent_cost_)) return;
    for (const auto& path : model_.paths) {
      double sum = 0.0;
      for (int i : path) sum += model_.tau(i, machines[i]);
      if (sum > model_.deadline + kTolerance) return;
    }
    incumbent_cost_ = cost;
    incumbent_ = machines;
  }

  // Fixed-multiplier bound pieces, so most nodes are checked in constant time.
  void prepare_root_bounds() {
    const int n = model_.task_count();
    const auto& lambda = lambda_stack_[0];
    root_load_.assign(n, 0.0);
    root_lambda_term_ = 0.0;
    for (std::size_t p = 0; p < rows_; ++p) {
      root_lambda_term_ += model_.deadline * lambda[p];
      for (int i : model_.paths[p]) root_load_[i] += lambda[p];
    }
    suffix_cost_.assign(n + 1, 0.0);
    suffix_lagrange_.assign(n + 1, 0.0);
    for (int k = n - 1; k >= 0; --k) {
      const int i = order_[k];
      double best = std::numeric_limits<double>::infinity();
      for (MachineId m = 0; m < model_.machine_count; ++m) best = std::min(best, root_reduced(i, m));
      suffix_cost_[k] = suffix_cost_[k + 1] + min_cost_[i];
      suffix_lagrange_[k] = suffix_lagrange_[k + 1] + best;
    }
  }

  double root_reduced(int i, MachineId m) const { return model_.c(i, m) + root_load_[i] * model_.tau(i, m); }

  void search(int depth, double cost, double lagrange) {
    if (exhausted_) return;
    const int n = model_.task_count();
    if (depth == n) {
      const double exact = task_order_cost(current_);
      if (exact < incumbent_cost_) {
        incumbent_cost_ = exact;
        incumbent_ = current_;
      }
      return;
    }
    const int i = order_[depth];
    for (MachineId m : choices_[i]) {
      if (++nodes_ > options_.node_budget) {
        exhausted_ = true;
        return;
      }
      const double c = cost + model_.c(i, m);
      if (beaten(c + suffix_cost_[depth + 1])) break;  // choices ascend in cost
      const double l = lagrange + root_reduced(i, m);
      if (beaten(l + suffix_lagrange_[depth + 1] - root_lambda_term_)) continue;

      const double tau = model_.tau(i, m);
      bool fits = true;
      for (int p : by_task_[i])
        if (committed_[p] + tau + open_min_[p] - min_time_[i] > model_.deadline + kTolerance) {
          fits = false;
          break;
        }
      if (!fits) continue;

      for (int p : by_task_[i]) {
        committed_[p] += tau;
        open_min_[p] -= min_time_[i];
      }
      current_[i] = m;
      bool pruned = false;
      if (depth + 1 < n) {
        auto& lambda = lambda_stack_[depth + 1];
        lambda = lambda_stack_[depth];
        pruned = beaten(improve_bound(lambda, options_.node_iterations, 0));
      }
      if (!pruned) search(depth + 1, c, l);
      current_[i] = -1;
      for (int p : by_task_[i]) {
        committed_[p] -= tau;
        open_min_[p] += min_time_[i];
      }
      if (exhausted_) return;
    }
  }

  const Model& model_;
  SolverOptions options_;
  std::size_t rows_ = 0;
  std::vector<std::vector<int>> by_task_;
  std::vector<int> order_;
  std::vector<std::vector<MachineId>> choices_;
  std::vector<double> min_time_, min_cost_;
  std::vector<std::vector<double>> lambda_stack_;
  std::vector<double> load_, limit_;
  std::vector<MachineId> pick_;
  std::vector<double> root_load_;
  double root_lambda_term_ = 0.0;
  double root_bound_ = 0.0;
  std::vector<double> suffix_cost_, suffix_lagrange_;
  std::vector<double> committed_, open_min_;
  std::vector<MachineId> current_, incumbent_;
  double incumbent_cost_ = 0.0;
  std::uint64_t nodes_ = 0;
  bool exhausted_ = false;
};

}  // namespace detail

/// Minimum-cost feasible assignment. Status is `unproven` when the node budget ran out first.
inline Schedule solve_exact(const Model& model, SolverOptions options = {}) {
  return detail::BranchAndBound(model, options).run();
}

}  // namespace spwd
