#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "spwd/common.hpp"
#include "spwd/workflow.hpp"

namespace spwd {

/// Deadline set to the critical path value under mean execution times.
struct CpvDeadline {};

using DeadlineSpec = std::variant<double, CpvDeadline>;

inline constexpr double kDefaultReferenceSpeed = 1.0;

/// A scheduling problem: workflow, machine pool, time/cost matrices and deadline.
class WspInstance {
 public:
  const Workflow& workflow() const noexcept { return workflow_; }
  const std::vector<Machine>& machines() const noexcept { return machines_; }
  int task_count() const noexcept { return workflow_.size(); }
  int machine_count() const noexcept { return static_cast<int>(machines_.size()); }
  double deadline() const noexcept { return deadline_; }
  double reference_speed() const noexcept { return reference_speed_; }

  double time(TaskId t, MachineId m) const { return time_[index(t, m)]; }
  double cost(TaskId t, MachineId m) const { return cost_[index(t, m)]; }
  /// Mean execution time of a task over all machines.
  double mean_time(TaskId t) const { return mean_[t]; }

  std::span<const double> time_row(TaskId t) const {
    return {time_.data() + static_cast<std::size_t>(t) * machines_.size(), machines_.size()};
  }
  std::span<const double> cost_row(TaskId t) const {
    return {cost_.data() + static_cast<std::size_t>(t) * machines_.size(), machines_.size()};
  }

  /// Same instance with a different deadline.
  WspInstance with_deadline(double deadline) const {
    if (!(deadline > 0.0)) throw Error(ErrorKind::invalid_input, "deadline must be positive");
    WspInstance copy = *this;
    copy.deadline_ = deadline;
    return copy;
  }

  friend WspInstance make_instance(Workflow workflow, std::vector<Machine> machines, double reference_speed,
                                   DeadlineSpec deadline);

 private:
  std::size_t index(TaskId t, MachineId m) const {
    return static_cast<std::size_t>(t) * machines_.size() + static_cast<std::size_t>(m);
  }

  Workflow workflow_;
  std::vector<Machine> machines_;
  std::vector<double> time_;
  std::vector<double> cost_;
  std::vector<double> mean_;
  double deadline_ = 0.0;
  double reference_speed_ = kDefaultReferenceSpeed;
};

/// Longest root-to-leaf path where each task counts its mean execution time.
inline double critical_path_value(const Workflow& wf, std::span<const double> task_weight) {
  std::vector<double> finish(wf.size(), 0.0);
  double best = 0.0;
  for (TaskId v : wf.topological_order()) {
    double start = 0.0;
    for (TaskId p : wf.predecessors(v)) start = std::max(start, finish[p]);
    finish[v] = start + task_weight[v];
    best = std::max(best, finish[v]);
  }
  return best;
}

inline double default_deadline(const WspInstance& instance) {
  std::vector<double> weights(instance.task_count());
  for (TaskId t = 0; t < instance.task_count(); ++t) weights[t] = instance.mean_time(t);
  return critical_path_value(instance.workflow(), weights);
}

inline WspInstance make_instance(Workflow workflow, std::vector<Machine> machines, double reference_speed,
                                 DeadlineSpec deadline) {
  if (machines.empty()) throw Error(ErrorKind::invalid_input, "machine list is empty");
  if (!(reference_speed > 0.0)) throw Error(ErrorKind::invalid_input, "reference speed must be positive");
  for (std::size_t j = 0; j < machines.size(); ++j) {
    const Machine& m = machines[j];
    if (m.id != static_cast<MachineId>(j))
      throw Error(ErrorKind::invalid_input, "machine ids must be contiguous from 0");
    if (!(m.speed > 0.0)) throw Error(ErrorKind::invalid_input, "machine " + m.name + " has non-positive speed");
    if (!(m.price >= 0.0)) throw Error(ErrorKind::invalid_input, "machine " + m.name + " has negative price");
  }

  WspInstance inst;
  inst.workflow_ = std::move(workflow);
  inst.machines_ = std::move(machines);
  inst.reference_speed_ = reference_speed;
  const int t = inst.workflow_.size();
  const int m = static_cast<int>(inst.machines_.size());
  inst.time_.resize(static_cast<std::size_t>(t) * m);
  inst.cost_.resize(inst.time_.size());
  inst.mean_.resize(t);
  for (TaskId i = 0; i < t; ++i) {
    double sum = 0.0;
    for (MachineId j = 0; j < m; ++j) {
      const double tau = inst.workflow_.task(i).base_runtime * reference_speed / inst.machines_[j].speed;
      inst.time_[inst.index(i, j)] = tau;
      inst.cost_[inst.index(i, j)] = tau * inst.machines_[j].price;
      sum += tau;
    }
    inst.mean_[i] = sum / m;
  }

  if (const double* explicit_deadline = std::get_if<double>(&deadline)) {
    if (!(*explicit_deadline > 0.0)) throw Error(ErrorKind::invalid_input, "deadline must be positive");
    inst.deadline_ = *explicit_deadline;
  } else {
    inst.deadline_ = default_deadline(inst);
    if (!(inst.deadline_ > 0.0))
      throw Error(ErrorKind::invalid_input, "critical path value is zero; give an explicit deadline");
  }
  return inst;
}

/// The five-machine pool used in the reported experiments (price = speed squared).
inline std::vector<Machine> table1_machines() {
  const double speeds[] = {1.0, 1.25, 1.5, 1.75, 2.0};
  std::vector<Machine> pool;
  for (int i = 0; i < 5; ++i)
    pool.push_back(Machine{i, "Machine" + std::to_string(i + 1), speeds[i], speeds[i] * speeds[i], 5});
  return pool;
}

}  // namespace spwd
