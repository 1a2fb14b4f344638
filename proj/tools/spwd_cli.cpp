// spwd: decompose, schedule and analyze workflow scheduling instances.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "spwd/spwd.hpp"

namespace fs = std::filesystem;
using namespace spwd;

namespace {

enum Exit { kOk = 0, kInternal = 1, kConfig = 2, kParse = 3, kInfeasible = 4, kTimeout = 5, kPathExplosion = 6 };

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config:
    case ErrorKind::space_too_large: return kConfig;
    case ErrorKind::parse:
    case ErrorKind::invalid_input:
    case ErrorKind::cycle: return kParse;
    case ErrorKind::path_explosion: return kPathExplosion;
    default: return kInternal;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::config, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::config, "cannot write '" + path.string() + "'");
  out << content;
  spdlog::info("wrote {}", path.string());
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

struct InstanceFlags {
  std::string workflow;
  std::string machines;
  double reference_speed = kDefaultReferenceSpeed;
  std::vector<std::string> deadline;

  void attach(CLI::App* cmd, bool workflow_required = true) {
    auto* w = cmd->add_option("--workflow", workflow, "WfCommons instance file");
    if (workflow_required) w->required();
    cmd->add_option("--machines", machines, "machine pool file (default: the five-machine reference pool)");
    cmd->add_option("--reference-speed", reference_speed, "speed in GHz at which runtimes were measured")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--deadline", deadline, "deadline in seconds, or 'cpv' (default)")->expected(1)->take_all();
  }

  DeadlineSpec deadline_spec() const {
    if (deadline.size() > 1) throw Error(ErrorKind::config, "give exactly one deadline");
    if (deadline.empty() || deadline.front() == "cpv") return CpvDeadline{};
    try {
      std::size_t used = 0;
      const double d = std::stod(deadline.front(), &used);
      if (used != deadline.front().size() || !(d > 0.0)) throw std::invalid_argument("bad");
      return d;
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::config, "deadline must be a positive number of seconds or 'cpv'");
    }
  }

  WspInstance load() const {
    const DeadlineSpec spec = deadline_spec();
    Workflow wf = parse_wfcommons(read_file(workflow));
    std::vector<Machine> pool = machines.empty() ? table1_machines() : parse_machines(read_file(machines));
    WspInstance inst = make_instance(std::move(wf), std::move(pool), reference_speed, spec);
    spdlog::info("{} tasks, {} edges, {} machines, deadline {}", inst.task_count(), inst.workflow().edges().size(),
                 inst.machine_count(), inst.deadline());
    return inst;
  }
};

struct SolveFlags {
  std::string solver = "exact";
  std::uint64_t budget = SolverOptions{}.node_budget;
  int jobs = 1;

  void attach(CLI::App* cmd, bool allow_lp) {
    auto* s = cmd->add_option("--solver", solver, "exact | greedy" + std::string(allow_lp ? " | lp-export" : ""));
    s->check(allow_lp ? CLI::IsMember({"exact", "greedy", "lp-export"}) : CLI::IsMember({"exact", "greedy"}));
    cmd->add_option("--budget", budget, "branch-and-bound node budget")->check(CLI::PositiveNumber);
    cmd->add_option("--jobs", jobs, "subproblems solved concurrently")->check(CLI::Range(1, 256));
  }

  RunOptions options() const {
    RunOptions o;
    o.solver = parse_solver_kind(solver);
    o.solver_options.node_budget = budget;
    o.jobs = jobs;
    return o;
  }
};

std::vector<SizeSpec> parse_sizes(const std::vector<std::string>& items) {
  std::vector<SizeSpec> sizes;
  for (const std::string& item : items)
    for (const std::string& part : split(item, ',')) sizes.push_back(SizeSpec::parse(part));
  if (sizes.empty()) throw Error(ErrorKind::config, "no subgraph size given");
  return sizes;
}

// CSV goes to <out>/<name> when --out is set, else to stdout.
void emit(const std::string& out_dir, const std::string& name, const std::string& content) {
  if (out_dir.empty())
    std::cout << content;
  else
    write_file(fs::path(out_dir) / name, content);
}

int cmd_schedule(const InstanceFlags& inst_flags, const SolveFlags& solve_flags, const std::string& size,
                 const std::string& out_dir, bool write_lp) {
  const WspInstance instance = inst_flags.load();
  RunOptions options = solve_flags.options();
  options.size = SizeSpec::parse(size);
  const RunResult result = run(instance, options);
  const DecompositionPlan& p = result.plan;
  spdlog::info("mapped graph {} vertices ({} sync), {} subproblems of at most {} vertices", p.graph.vertex_count(),
               p.mapping.sync_vertices, p.subproblems.size(), p.max_size);

  const fs::path out = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  write_file(out / "plan.txt", dump_plan(p));
  write_file(out / "plan.csv", plan_csv(p));
  if (write_lp || options.solver == SolverKind::lp_export)
    for (std::size_t i = 0; i < result.models.size(); ++i)
      write_file(out / fmt::format("subproblem_{:04}.lp", i), export_lp(result.models[i]));

  std::string summary = fmt::format("subproblems: {}\nmax subgraph size: {}\ndeadline: {}\n", p.subproblems.size(),
                                    p.max_size, instance.deadline());
  int code = kOk;
  if (options.solver == SolverKind::lp_export) {
    summary += "solver: lp-export\n";
  } else if (result.status == RunStatus::infeasible) {
    int count = 0;
    for (const Schedule& s : result.subschedules) count += s.feasible ? 0 : 1;
    summary += fmt::format("status: infeasible\ninfeasible subproblems: {}\n", count);
    std::cerr << "infeasible: " << count << " subproblem(s) cannot meet their deadline\n";
    code = kInfeasible;
  } else {
    const MergeReport& m = *result.merged;
    write_file(out / "schedule.csv", schedule_csv(m.assignment, instance, m.validation));
    write_file(out / "merge_report.txt", merge_report_text(m, instance));
    summary += fmt::format("cost: {}\nfeasible: {}\nmax path time: {}\ncollisions: {}\n", m.cost,
                           m.feasible() ? "yes" : "no", m.validation.max_path_time, m.collisions.size());
    if (result.status == RunStatus::budget_exhausted) {
      summary += "status: budget exhausted (schedule not proven optimal)\n";
      std::cerr << "warning: node budget exhausted; schedule is feasible but not proven optimal\n";
      code = kTimeout;
    } else {
      summary += "status: ok\n";
    }
    std::cout << fmt::format("cost {} feasible {} subproblems {}\n", m.cost, m.feasible() ? "yes" : "no",
                             p.subproblems.size());
  }
  summary += fmt::format("wall time: {:.3f} s\n", result.seconds);
  write_file(out / "summary.txt", summary);
  return code;
}

// Reads task_name,machine_name rows (header and '#' lines skipped) into an assignment.
std::vector<MachineId> read_schedule(const std::string& path, const WspInstance& instance) {
  std::map<std::string, TaskId> tasks;
  for (const Task& t : instance.workflow().tasks()) tasks[t.name] = t.id;
  std::map<std::string, MachineId> machines;
  for (const Machine& m : instance.machines()) machines[m.name] = m.id;
  std::vector<MachineId> assignment(instance.task_count(), -1);
  std::istringstream in(read_file(path));
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() < 2) throw Error(ErrorKind::parse, "bad schedule row '" + line + "'");
    auto t = tasks.find(cells[0]);
    auto m = machines.find(cells[1]);
    if (t == tasks.end()) throw Error(ErrorKind::parse, "unknown task '" + cells[0] + "'");
    if (m == machines.end()) throw Error(ErrorKind::parse, "unknown machine '" + cells[1] + "'");
    if (assignment[t->second] != -1) throw Error(ErrorKind::parse, "task '" + cells[0] + "' assigned twice");
    assignment[t->second] = m->second;
  }
  return assignment;
}

int cmd_validate(const InstanceFlags& flags, const std::string& schedule_path) {
  const Workflow wf = parse_wfcommons(read_file(flags.workflow));
  const ValidationReport report = validate(wf);
  const PathCount paths = count_workflow_paths(wf);
  std::cout << fmt::format("tasks: {}\nedges: {}\nroots: {}\nleaves: {}\npaths: {}{}\nvalid: {}\n", wf.size(),
                           wf.edges().size(), report.roots.size(), report.leaves.size(), paths.value,
                           paths.saturated ? " (saturated)" : "", report.valid ? "yes" : "no");
  for (const std::string& d : report.diagnostics) std::cout << "note: " << d << "\n";
  if (!report.valid) return kParse;
  if (schedule_path.empty()) return kOk;

  const WspInstance instance = flags.load();
  const std::vector<MachineId> assignment = read_schedule(schedule_path, instance);
  const ValidationResult r = validate_schedule(assignment, instance);
  std::cout << fmt::format("schedule complete: {}\ncost: {}\nmax path time: {}\ndeadline: {}\nfeasible: {}\n",
                           r.complete ? "yes" : "no", r.cost, r.max_path_time, instance.deadline(),
                           r.feasible ? "yes" : "no");
  for (const std::string& d : r.diagnostics) std::cout << "note: " << d << "\n";
  if (!r.complete) return kParse;
  return r.feasible ? kOk : kInfeasible;
}

int cmd_generate(const std::string& shape, const std::string& sizes, double density, std::uint64_t seed,
                 RuntimeRange range, const std::string& out) {
  std::vector<int> n;
  for (const std::string& part : split(sizes, ',')) {
    try {
      n.push_back(std::stoi(part));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::config, "bad size '" + part + "'");
    }
  }
  auto need = [&](std::size_t count, const char* what) {
    if (n.size() != count) throw Error(ErrorKind::config, fmt::format("{} expects --sizes {}", shape, what));
  };
  if (!(range.min >= 0.0 && range.max >= range.min)) throw Error(ErrorKind::config, "bad runtime range");
  Workflow wf;
  try {
    if (shape == "chain") {
      need(1, "N");
      wf = generate_chain(n[0], seed, range);
    } else if (shape == "layered") {
      if (n.empty()) throw Error(ErrorKind::config, "layered expects --sizes W1,W2,...");
      wf = generate_layered(n, density, seed, range);
    } else if (shape == "fork-join") {
      need(3, "BRANCHES,DEPTH,STAGES");
      wf = generate_fork_join(n[0], n[1], n[2], seed, range);
    } else {
      need(1, "EDGES");
      wf = generate_random_sp_workflow(n[0], seed, range);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::invalid_input) throw Error(ErrorKind::config, e.what());
    throw;
  }
  const std::string doc = serialize_wfcommons(wf, fmt::format("{}-{}", shape, seed));
  if (out.empty())
    std::cout << doc;
  else
    write_file(out, doc);
  return kOk;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("spwd");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* level = std::getenv("SPWD_LOG");
  const std::string v = level ? level : "off";
  if (v == "debug")
    spdlog::set_level(spdlog::level::debug);
  else if (v == "info")
    spdlog::set_level(spdlog::level::info);
  else
    spdlog::set_level(spdlog::level::off);
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Series-parallel workflow decomposition scheduler"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  InstanceFlags inst;
  SolveFlags solve;
  std::string out;
  std::vector<std::string> sizes;
  std::string size = "100%";
  bool write_lp = false;
  bool svg = false;
  std::uint64_t seed = 1;

  auto* schedule = app.add_subcommand("schedule", "decompose, solve and merge");
  inst.attach(schedule);
  solve.attach(schedule, true);
  schedule->add_option("--max-subgraph-size", size, "N vertices or P% of the mapped graph");
  schedule->add_option("--out", out, "output directory (default: current directory)");
  schedule->add_option("--seed", seed, "random seed (unused by scheduling; accepted for uniformity)");
  schedule->add_flag("--write-lp", write_lp, "also export every subproblem model in LP format");

  auto* analyze = app.add_subcommand("analyze-size", "largest subproblem size against the undivided model");
  inst.attach(analyze);
  analyze->add_option("--max-subgraph-size", sizes, "sizes, comma separated")
      ->default_str("75%,50%,25%,15%,10%,5%,2%,1%");
  analyze->add_option("--out", out, "output directory (default: stdout)");

  auto* inflation = app.add_subcommand("path-inflation", "path counts before and after mapping");
  inst.attach(inflation);
  inflation->add_option("--out", out, "output directory (default: stdout)");

  auto* sweep_cmd = app.add_subcommand("sweep", "cost against subgraph size");
  inst.attach(sweep_cmd);
  solve.attach(sweep_cmd, false);
  sweep_cmd->add_option("--max-subgraph-size", sizes, "percentages, comma separated")
      ->default_str("75%,50%,25%,15%,10%,5%,2%,1%");
  sweep_cmd->add_option("--out", out, "output directory (default: stdout)");
  sweep_cmd->add_flag("--svg", svg, "also write sweep.svg (needs --out)");

  std::string shape;
  std::string gen_sizes;
  double density = 0.5;
  RuntimeRange range;
  auto* generate = app.add_subcommand("generate", "write a synthetic workflow");
  generate->add_option("--shape", shape, "layered | fork-join | chain | random-sp")
      ->required()
      ->check(CLI::IsMember({"layered", "fork-join", "chain", "random-sp"}));
  generate->add_option("--sizes", gen_sizes,
                       "layered: W1,W2,...; fork-join: BRANCHES,DEPTH,STAGES; chain: N; random-sp: EDGES")
      ->required();
  generate->add_option("--density", density, "layered edge probability")->check(CLI::Range(0.0, 1.0));
  generate->add_option("--min-runtime", range.min, "smallest task runtime (s)");
  generate->add_option("--max-runtime", range.max, "largest task runtime (s)");
  generate->add_option("--seed", seed, "random seed");
  generate->add_option("--out", out, "output file (default: stdout)");

  std::string schedule_path;
  auto* validate_cmd = app.add_subcommand("validate", "check a workflow and optionally a schedule CSV");
  inst.attach(validate_cmd);
  validate_cmd->add_option("--schedule", schedule_path, "schedule CSV (task_name,machine_name,...)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*schedule) return cmd_schedule(inst, solve, size, out, write_lp);
    if (*analyze) {
      const WspInstance instance = inst.load();
      if (sizes.empty()) sizes = {"75%,50%,25%,15%,10%,5%,2%,1%"};
      emit(out, "analyze_size.csv", size_csv(analyze_size(instance, parse_sizes(sizes))));
      return kOk;
    }
    if (*inflation) {
      inst.deadline_spec();
      emit(out, "path_inflation.csv", path_inflation_csv(path_inflation(parse_wfcommons(read_file(inst.workflow)))));
      return kOk;
    }
    if (*sweep_cmd) {
      const WspInstance instance = inst.load();
      if (sizes.empty()) sizes = {"75%,50%,25%,15%,10%,5%,2%,1%"};
      std::vector<SizeSpec> specs = parse_sizes(sizes);
      for (const SizeSpec& s : specs)
        if (!s.percent) throw Error(ErrorKind::config, "sweep takes percentages");
      const SweepResult r = sweep(instance, specs, solve.options());
      emit(out, "sweep.csv", sweep_csv(r));
      if (svg) {
        if (out.empty()) throw Error(ErrorKind::config, "--svg needs --out");
        write_file(fs::path(out) / "sweep.svg", sweep_svg(r));
      }
      if (!r.baseline_feasible) {
        std::cerr << "infeasible: the undivided instance cannot meet the deadline\n";
        return kInfeasible;
      }
      if (!r.baseline_proven && solve.solver == "exact") {
        std::cerr << "warning: baseline not proven optimal; ratios are against the best schedule found\n";
        return kTimeout;
      }
      return kOk;
    }
    if (*generate) return cmd_generate(shape, gen_sizes, density, seed, range, out);
    if (*validate_cmd) return cmd_validate(inst, schedule_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}
