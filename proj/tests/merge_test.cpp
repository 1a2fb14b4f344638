#include <gtest/gtest.h>

#include "spwd/spwd.hpp"
#include "support.hpp"

using namespace spwd;

namespace {

WspInstance small_instance(std::uint64_t seed, int max_tasks) {
  Rng rng(seed);
  Workflow wf = generate_random_dag(rng.uniform_int(2, max_tasks), 3, seed);
  return make_instance(std::move(wf), table1_machines(), 1.0, CpvDeadline{});
}

}  // namespace

TEST(Merge, FastestCandidateWins) {
  const Workflow wf = Workflow::create({{0, "X", 4.0}}, {});
  const WspInstance inst = make_instance(wf, table1_machines(), 1.0, 10.0);
  EXPECT_EQ(pick_fastest(inst, 0, {0, 4}), 4);
  EXPECT_EQ(pick_fastest(inst, 0, {4, 0}), 4);
  // Equal times: cheaper, then lower id.
  const WspInstance twins = make_instance(wf, {{0, "a", 1, 2, 1}, {1, "b", 1, 1, 1}, {2, "c", 1, 1, 1}}, 1.0, 10.0);
  EXPECT_EQ(pick_fastest(twins, 0, {0, 1, 2}), 1);
}

TEST(Merge, DiamondHalvesAgree) {
  const WspInstance inst = fixtures::diamond();
  RunOptions options;
  options.size = SizeSpec::absolute(3);
  const RunResult r = run(inst, options);
  ASSERT_TRUE(r.merged);
  EXPECT_TRUE(r.merged->collisions.empty());
  EXPECT_TRUE(r.merged->feasible());
  EXPECT_DOUBLE_EQ(r.merged->cost, 20.0);
  for (std::size_t k = 0; k < r.subschedules.size(); ++k) {
    const Schedule& s = r.subschedules[k];
    for (std::size_t i = 0; i < s.tasks.size(); ++i) EXPECT_EQ(r.merged->assignment[s.tasks[i]], s.machines[i]);
  }
}

TEST(Merge, MissingSubschedule) {
  const WspInstance inst = fixtures::diamond();
  const DecompositionPlan p = plan(inst, SizeSpec::absolute(3));
  try {
    merge(p, {}, inst);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::missing_subschedule);
  }
}

TEST(Merge, CollisionTakesFastestAndCostsAddUp) {
  const WspInstance inst = fixtures::diamond();
  const DecompositionPlan p = plan(inst, SizeSpec::absolute(3));
  ASSERT_EQ(p.subproblems.size(), 2u);
  // Subproblem tasks ascend: {A, B, D} and {A, C, D}. They disagree on A.
  std::vector<Schedule> subs(2);
  subs[0].tasks = {0, 1, 3};
  subs[0].machines = {0, 1, 1};
  subs[1].tasks = {0, 2, 3};
  subs[1].machines = {1, 1, 1};
  for (Schedule& s : subs) s.feasible = true;
  const MergeReport r = merge(p, subs, inst);
  ASSERT_EQ(r.collisions.size(), 1u);
  EXPECT_EQ(r.collisions[0].task, 0);
  EXPECT_EQ(r.collisions[0].candidates, (std::vector<MachineId>{0, 1}));
  EXPECT_EQ(r.collisions[0].chosen, 1);
  EXPECT_EQ(r.assignment, (std::vector<MachineId>{1, 1, 1, 1}));
  EXPECT_DOUBLE_EQ(r.cost, 24.0);
}

TEST(Validate, DiamondSlacks) {
  const WspInstance inst = fixtures::diamond(6.0);
  const ValidationResult fast = validate_schedule({1, 1, 1, 1}, inst);
  EXPECT_TRUE(fast.feasible);
  ASSERT_EQ(fast.paths.size(), 2u);
  for (const PathSlack& s : fast.paths) {
    EXPECT_DOUBLE_EQ(s.time, 4.0);
    EXPECT_DOUBLE_EQ(s.slack, 2.0);
  }
  const ValidationResult slow = validate_schedule({0, 0, 0, 0}, inst);
  EXPECT_FALSE(slow.feasible);
  for (const PathSlack& s : slow.paths) EXPECT_DOUBLE_EQ(s.time, 8.0);

  const ValidationResult partial = validate_schedule({0, 0, 7, 0}, inst);
  EXPECT_FALSE(partial.complete);
  EXPECT_FALSE(validate_schedule({0, 0}, inst).complete);
}

TEST(Validate, EmptyWorkflowIsFeasible) {
  const WspInstance inst = make_instance(Workflow::create({}, {}), table1_machines(), 1.0, 1.0);
  const ValidationResult r = validate_schedule({}, inst);
  EXPECT_TRUE(r.feasible);
  EXPECT_DOUBLE_EQ(r.cost, 0.0);
}

TEST(Validate, LongestPathFallbackAgrees) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const WspInstance inst = small_instance(seed, 30);
    Rng rng(seed);
    std::vector<MachineId> a(inst.task_count());
    for (MachineId& m : a) m = rng.uniform_int(0, inst.machine_count() - 1);
    const ValidationResult full = validate_schedule(a, inst);
    const ValidationResult dp = validate_schedule(a, inst, 0);
    EXPECT_FALSE(dp.enumerated);
    EXPECT_EQ(full.feasible, dp.feasible);
    EXPECT_NEAR(full.max_path_time, dp.max_path_time, 1e-9);
  }
}

TEST(Pipeline, MergedSchedulesAreSoundAndNeverBeatTheOptimum) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const WspInstance inst = small_instance(seed, 8);
    const Schedule optimum = solve_exact(build_model(inst));
    for (int s : {2, 3, 4, 6}) {
      RunOptions options;
      options.size = SizeSpec::absolute(s);
      const RunResult r = run(inst, options);
      if (!r.merged) continue;
      const MergeReport& m = *r.merged;
      EXPECT_TRUE(m.feasible()) << seed;
      for (const PathSlack& p : m.validation.paths) EXPECT_GE(p.slack, -1e-9);
      double cost = 0.0;
      for (TaskId t = 0; t < inst.task_count(); ++t) cost += inst.cost(t, m.assignment[t]);
      EXPECT_NEAR(m.cost, cost, 1e-9);
      EXPECT_GE(m.cost, optimum.cost - 1e-9) << seed << " s=" << s;
      for (const Collision& c : m.collisions)
        for (MachineId k : c.candidates) EXPECT_LE(inst.time(c.task, c.chosen), inst.time(c.task, k));
    }
  }
}

TEST(Pipeline, UndividedRunEqualsDirectSolve) {
  const WspInstance inst = fixtures::diamond();
  const RunResult r = run(inst, RunOptions{});
  ASSERT_TRUE(r.merged);
  EXPECT_TRUE(r.plan.degenerate());
  EXPECT_DOUBLE_EQ(r.merged->cost, 16.0);
  EXPECT_EQ(r.merged->cost, solve_exact(build_model(inst)).cost);
}

TEST(Pipeline, ThreadsDoNotChangeResults) {
  const WspInstance inst =
      make_instance(generate_layered({6, 3, 8, 2}, 0.4, 11), table1_machines(), 1.0, CpvDeadline{});
  RunOptions one;
  one.size = SizeSpec::percentage(10);
  RunOptions many = one;
  many.jobs = 4;
  const RunResult a = run(inst, one);
  const RunResult b = run(inst, many);
  ASSERT_TRUE(a.merged && b.merged);
  EXPECT_EQ(a.merged->assignment, b.merged->assignment);
  for (std::size_t i = 0; i < a.models.size(); ++i) EXPECT_EQ(export_lp(a.models[i]), export_lp(b.models[i]));
}

TEST(Pipeline, InfeasibleSubproblemIsReported) {
  const WspInstance inst = fixtures::diamond(3.0);
  RunOptions options;
  options.size = SizeSpec::absolute(3);
  const RunResult r = run(inst, options);
  EXPECT_EQ(r.status, RunStatus::infeasible);
  EXPECT_FALSE(r.merged);
}

TEST(Pipeline, ScheduleCsv) {
  const WspInstance inst = fixtures::diamond();
  const RunResult r = run(inst, RunOptions{});
  const std::string csv = schedule_csv(r.merged->assignment, inst, r.merged->validation);
  EXPECT_EQ(csv.rfind("task_name,machine_name,exec_time_s,cost\n", 0), 0u);
  EXPECT_NE(csv.find("# total_cost=16,max_path_time=6,deadline=6,feasible=true"), std::string::npos) << csv;
}

TEST(Experiments, AnalyzeSizeMatchesBuiltModels) {
  const WspInstance inst =
      make_instance(generate_layered({3, 4, 3}, 0.6, 5), table1_machines(), 1.0, CpvDeadline{});
  const auto rows = analyze_size(inst, {SizeSpec::percentage(50), SizeSpec::percentage(10)});
  EXPECT_EQ(rows[0].original, problem_size(build_model(inst)));
  for (const SizeRow& row : rows) {
    const DecompositionPlan p = plan(inst, row.s);
    ProblemSize largest;
    for (const SubProblem& sp : p.subproblems) {
      const ProblemSize size = problem_size(build_model(p, sp, inst));
      largest.variables = std::max(largest.variables, size.variables);
      largest.constraints = std::max(largest.constraints, size.constraints);
    }
    EXPECT_EQ(row.largest, largest);
  }
  EXPECT_EQ(size_csv(rows).rfind("s,orig_vars,orig_cons,max_sub_vars,max_sub_cons,ratio_vars,ratio_cons\n", 0), 0u);
}

TEST(Experiments, FanOutShrinksConstraints) {
  const WspInstance inst =
      make_instance(generate_layered({1, 20, 20, 1}, 0.3, 8), table1_machines(), 1.0, CpvDeadline{});
  const auto rows = analyze_size(inst, {SizeSpec::percentage(10)});
  EXPECT_LT(rows[0].ratio_cons, 1.0);
  EXPECT_LT(rows[0].ratio_vars, 1.0);
}

TEST(Experiments, PathInflation) {
  const PathInflation diamond = path_inflation(fixtures::diamond().workflow());
  EXPECT_EQ(diamond.before.value, 2u);
  EXPECT_EQ(diamond.after.value, 2u);
  EXPECT_DOUBLE_EQ(diamond.ratio, 1.0);

  const PathInflation chain = path_inflation(generate_chain(6, 2));
  EXPECT_EQ(chain.before.value, 1u);
  EXPECT_EQ(chain.after.value, 1u);
  EXPECT_EQ(path_inflation_csv(chain), "paths_before_mapping,paths_after_mapping,ratio,saturated\n1,1,1,false\n");

  // a -> c, a -> d, b -> d
  const Workflow n = Workflow::create({{0, "a", 1}, {1, "b", 1}, {2, "c", 1}, {3, "d", 1}}, {{0, 2}, {0, 3}, {1, 3}});
  EXPECT_GE(path_inflation(n).ratio, 1.0);
}

TEST(Experiments, SweepNeverBeatsBaseline) {
  const WspInstance inst = fixtures::diamond();
  const SweepResult r =
      sweep(inst, {SizeSpec::percentage(100), SizeSpec::percentage(75), SizeSpec::percentage(50)}, RunOptions{});
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_EQ(r.rows[0].cost_ratio, 1.0);
  for (const SweepRow& row : r.rows) EXPECT_GE(row.cost_ratio, 1.0);
  EXPECT_NE(sweep_svg(r).find("<polyline"), std::string::npos);
}

TEST(Experiments, WideFanOutStaysFlat) {
  // One task fanning out to many independent tasks that join again.
  const WspInstance inst =
      make_instance(generate_layered({1, 40, 1}, 1.0, 21), table1_machines(), 1.0, CpvDeadline{});
  std::vector<SizeSpec> sizes;
  for (double pct : {75.0, 50.0, 25.0, 15.0, 10.0, 5.0, 2.0, 1.0}) sizes.push_back(SizeSpec::percentage(pct));
  const SweepResult r = sweep(inst, sizes, RunOptions{});
  ASSERT_TRUE(r.baseline_proven);
  for (const SweepRow& row : r.rows) {
    EXPECT_TRUE(row.feasible);
    EXPECT_LE(row.cost_ratio, 1.15) << row.s.to_string();
  }
}
