// SPDX-License-Identifier: Apache-2.0
//
// zfpa: generate instances, run solvers, sweep experiments, compare users.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>

#include "CLI11.hpp"
#include "zfpa/instance_io.hpp"
#include "zfpa_tools/harness.hpp"

namespace fs = std::filesystem;
using namespace zfpa;
using namespace zfpa::tools;

namespace {

struct Common {
  std::optional<double> epsilon;
  bool refine = false;
  std::optional<double> alpha;
  std::optional<std::uint64_t> seed;
  std::string solvers;
  bool serial_timing = false;
  std::string out;
};

void add_solver_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--epsilon", c.epsilon, "Heuristic step exponent")->check(CLI::NonNegativeNumber);
  cmd->add_flag("--refine", c.refine, "Heuristic: re-solve theta exactly at the final deltas");
}

void apply(SweepConfig& cfg, const Common& c) {
  if (c.epsilon) cfg.options.epsilon = *c.epsilon;
  if (c.refine) cfg.options.refine = true;
  if (c.alpha) cfg.scenario.alpha = *c.alpha;
  if (c.seed) cfg.scenario.seed = *c.seed;
  if (!c.solvers.empty()) cfg.solvers = parse_solver_list(c.solvers);
  if (c.serial_timing) cfg.serial_timing = true;
  if (!c.out.empty()) cfg.output_path = c.out;
}

SolverOptions options_from(const Common& c) {
  SolverOptions o;
  if (c.epsilon) o.epsilon = *c.epsilon;
  o.refine = c.refine;
  return o;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text << '\n';
}

int cmd_gen(const std::string& config_path, const Common& c) {
  SweepConfig cfg = load_sweep_config(config_path);
  apply(cfg, c);
  if (const auto errors = validate(cfg); !errors.empty()) throw std::invalid_argument(errors.front());
  const fs::path dir = cfg.output_path.empty() ? fs::path(".") : fs::path(cfg.output_path);
  fs::create_directories(dir);
  std::size_t count = 0;
  for (const SweepPoint& p : expand(cfg)) {
    const Scenario sc = generate(p.spec);
    write_text(dir / (p.id + ".json"), instance_to_json(sc.instance, 2));
    write_text(dir / (p.id + ".meta.json"), sidecar_json(p.spec, sc));
    ++count;
  }
  std::cerr << "wrote " << count << " instances to " << dir.string() << '\n';
  return 0;
}

int cmd_solve(const std::string& instance_path, const std::string& solver, const Common& c) {
  const ProblemInstance inst = load_instance(instance_path);
  const auto kinds = parse_solver_list(c.solvers.empty() ? solver : c.solvers);
  for (SolverKind kind : kinds) {
    RunRecord rec = make_record(inst, run_solver(kind, inst, options_from(c)), kind);
    rec.instance = fs::path(instance_path).stem().string();
    std::cout << record_json(rec) << '\n';
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const Common& c) {
  SweepConfig cfg = load_sweep_config(config_path);
  apply(cfg, c);
  const auto records = run_sweep(cfg);
  if (cfg.output_path.empty()) {
    write_csv(std::cout, records);
  } else {
    std::ofstream f(cfg.output_path);
    if (!f) throw std::runtime_error("cannot write " + cfg.output_path);
    write_csv(f, records);
  }
  write_timing_summary(std::cerr, summarize_timing(records));
  return 0;
}

int cmd_diff(const std::string& instance_path, const std::string& a, const std::string& b, const Common& c) {
  const ProblemInstance inst = load_instance(instance_path);
  const SolverOptions opts = options_from(c);
  const SolveReport ra = run_solver(solver_from_string(a), inst, opts);
  const SolveReport rb = run_solver(solver_from_string(b), inst, opts);
  const auto rows = diff_table(inst, ra, rb);
  if (c.out.empty()) {
    write_diff_csv(std::cout, rows);
  } else {
    std::ofstream f(c.out);
    if (!f) throw std::runtime_error("cannot write " + c.out);
    write_diff_csv(f, rows);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Power allocation with minimum-rate floors: solvers and experiment harness"};
  app.require_subcommand(1);
  Common common;
  std::string path;
  std::string solver = "heuristic";
  std::string solver_a;
  std::string solver_b;

  auto* gen = app.add_subcommand("gen", "Write one instance per (axis value, repetition) of a sweep config");
  gen->add_option("config", path, "Sweep config (JSON)")->required();
  gen->add_option("--out", common.out, "Output directory");
  gen->add_option("--alpha", common.alpha, "Selection correlation threshold");
  gen->add_option("--seed", common.seed, "Base seed");

  auto* solve = app.add_subcommand("solve", "Solve one instance and print a JSON record per solver");
  solve->add_option("instance", path, "Instance (JSON)")->required();
  solve->add_option("--solver", solver, "exact, bounds, heuristic or unconstrained");
  solve->add_option("--solvers", common.solvers, "Comma-separated solvers; overrides --solver");
  add_solver_flags(solve, common);

  auto* sweep = app.add_subcommand("sweep", "Run a sweep config and write CSV");
  sweep->add_option("config", path, "Sweep config (JSON)")->required();
  sweep->add_option("--out", common.out, "CSV path (default: standard output)");
  sweep->add_option("--alpha", common.alpha, "Selection correlation threshold");
  sweep->add_option("--seed", common.seed, "Base seed");
  sweep->add_option("--solvers", common.solvers, "Comma-separated solvers");
  sweep->add_flag("--serial-timing", common.serial_timing, "Run on a single worker");
  add_solver_flags(sweep, common);

  auto* diff = app.add_subcommand("diff", "Per-user rate minus floor for two solvers");
  diff->add_option("instance", path, "Instance (JSON)")->required();
  diff->add_option("solver_a", solver_a, "First solver")->required();
  diff->add_option("solver_b", solver_b, "Second solver")->required();
  diff->add_option("--out", common.out, "CSV path (default: standard output)");
  add_solver_flags(diff, common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(path, common);
    if (solve->parsed()) return cmd_solve(path, solver, common);
    if (sweep->parsed()) return cmd_sweep(path, common);
    if (diff->parsed()) return cmd_diff(path, solver_a, solver_b, common);
  } catch (const std::exception& e) {
    std::cerr << "zfpa: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
