#pragma once

#include <algorithm>
#include <vector>

#include "spwd/spwd.hpp"

namespace spwd::fixtures {

// The four-task diamond A -> {B, C} -> D on a slow cheap and a fast dear machine.
inline WspInstance diamond(DeadlineSpec deadline = CpvDeadline{}) {
  std::vector<Task> tasks{{0, "A", 2}, {1, "B", 4}, {2, "C", 4}, {3, "D", 2}};
  Workflow wf = Workflow::create(tasks, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  std::vector<Machine> ms{{0, "m1", 1.0, 1.0, 1}, {1, "m2", 2.0, 4.0, 1}};
  return make_instance(std::move(wf), std::move(ms), 1.0, deadline);
}

inline TtspGraph graph_from_edges(int n, VertexId source, VertexId sink,
                                  const std::vector<std::pair<int, int>>& edges) {
  TtspGraph g;
  for (int i = 0; i < n; ++i) g.add_vertex(VertexKind::original, i);
  g.source = source;
  g.sink = sink;
  for (auto [a, b] : edges) g.add_edge(a, b);
  return g;
}

// Largest sum of vertex weights over all source-to-sink paths, by enumeration.
inline double max_path_weight(const TtspGraph& g, const std::vector<double>& w) {
  double best = 0.0;
  for (const auto& path : enumerate_paths(g)) {
    double sum = 0.0;
    for (VertexId v : path) sum += w[v];
    best = std::max(best, sum);
  }
  return best;
}

// Random small model: a random DAG on up to `max_tasks` tasks over up to `max_machines` machines
// with a deadline between 0.9x and 1.6x the all-fastest makespan.
inline Model random_model(std::uint64_t seed, int max_tasks, int max_machines) {
  Rng rng(seed);
  const int n = rng.uniform_int(1, max_tasks);
  const int m = rng.uniform_int(1, max_machines);
  Workflow wf = generate_random_dag(n, rng.uniform_int(1, 3), seed);
  std::vector<Machine> machines;
  for (int k = 0; k < m; ++k) {
    const double speed = std::round(rng.uniform(1.0, 3.0) * 100.0) / 100.0;
    const double price = std::round(speed * speed * rng.uniform(0.7, 1.3) * 100.0) / 100.0;
    machines.push_back(Machine{k, "m" + std::to_string(k), speed, price, 1});
  }
  Model model = build_model(make_instance(std::move(wf), std::move(machines), 1.0, CpvDeadline{}));
  std::vector<MachineId> fastest(model.task_count());
  for (int i = 0; i < model.task_count(); ++i) fastest[i] = detail::fastest_machine(model, i);
  const double floor = evaluate(model, fastest).max_path_time;
  model.deadline = floor * rng.uniform(0.9, 1.6);
  if (rng.bernoulli(0.2)) model.deadline = floor;
  return model;
}

}  // namespace spwd::fixtures
