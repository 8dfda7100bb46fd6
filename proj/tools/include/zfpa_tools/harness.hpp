// SPDX-License-Identifier: Apache-2.0
//
// Experiment plumbing shared by the zfpa command line and the acceptance
// runner: solver dispatch, sweep expansion, the worker pool, and CSV output.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "zfpa/exact_oracle.hpp"
#include "zfpa/model.hpp"
#include "zfpa/scenario.hpp"

namespace zfpa::tools {

enum class SolverKind { exact, bounds, heuristic, unconstrained };

std::string to_string(SolverKind kind);
SolverKind solver_from_string(std::string_view name);
/// Comma-separated list, e.g. "exact,bounds".
std::vector<SolverKind> parse_solver_list(std::string_view list);

struct SolverOptions {
  double epsilon = 0.2;
  bool refine = false;
  OracleSettings oracle;
};

/// Runs one solver; wall_time_ns covers the solve call only.
SolveReport run_solver(SolverKind kind, const ProblemInstance& inst, const SolverOptions& options);

struct RunRecord {
  std::string instance;
  double axis = 0.0;
  std::string solver;
  std::string status;
  double objective = 0.0;
  double power = 0.0;
  double max_deficit = 0.0;
  int iterations = 0;
  std::int64_t time_ns = 0;
  std::uint64_t seed = 0;
};

RunRecord make_record(const ProblemInstance& inst, const SolveReport& report, SolverKind kind);
std::string record_json(const RunRecord& record);

enum class SweepAxis { scale, rt_count, epsilon };

std::string to_string(SweepAxis axis);
SweepAxis axis_from_string(std::string_view name);

struct SweepConfig {
  ScenarioSpec scenario;
  SweepAxis axis = SweepAxis::scale;
  std::vector<double> axis_values;
  std::vector<SolverKind> solvers;
  int repetitions = 1;
  SolverOptions options;
  int timing_repeats = 1;  // timed solves per record after one discarded warm-up
  bool serial_timing = false;
  unsigned workers = 0;  // 0: one per hardware thread
  std::string output_path;
};

/// Empty when the config is usable.
std::vector<std::string> validate(const SweepConfig& config);

/// Parses the JSON config format documented in the README. Throws
/// std::invalid_argument on malformed input.
SweepConfig sweep_config_from_json(std::string_view text);
SweepConfig load_sweep_config(const std::string& path);

/// seed xor a hash of (axis index, repetition).
std::uint64_t child_seed(std::uint64_t seed, std::size_t axis_index, std::size_t repetition);

struct SweepPoint {
  std::string id;
  double axis_value = 0.0;
  ScenarioSpec spec;
  SolverOptions options;
};

/// One point per (axis value, repetition), axis-major. On the epsilon axis the
/// instance does not depend on the axis value, so every value reuses the
/// seeds of axis index 0 and the points differ only in their options.
std::vector<SweepPoint> expand(const SweepConfig& config);

/// Generates every instance and runs every solver on it, in parallel unless
/// serial_timing is set. Records come back ordered by (point, solver).
std::vector<RunRecord> run_sweep(const SweepConfig& config);

inline constexpr std::string_view kCsvHeader =
    "instance,axis,solver,status,objective,power,max_deficit,iters,time_ns,seed";

void write_csv(std::ostream& out, const std::vector<RunRecord>& records);

struct TimingSummary {
  std::string solver;
  double axis = 0.0;
  std::size_t count = 0;
  double mean_ns = 0.0;
  double median_ns = 0.0;
  double min_ns = 0.0;
  double max_ns = 0.0;
};

/// Per (solver, axis value) statistics of time_ns.
std::vector<TimingSummary> summarize_timing(const std::vector<RunRecord>& records);
/// Per solver over all records.
std::vector<TimingSummary> summarize_timing_by_solver(const std::vector<RunRecord>& records);
void write_timing_summary(std::ostream& out, const std::vector<TimingSummary>& rows);

inline constexpr std::string_view kDiffHeader = "user,floor,rate_a,rate_b,diff_a,diff_b";

struct DiffRow {
  std::size_t user = 0;
  double floor = 0.0;
  double rate_a = 0.0;
  double rate_b = 0.0;
  double diff_a = 0.0;
  double diff_b = 0.0;
};

/// Rate minus floor for every RT user, or for every user when the instance
/// has no RT users.
std::vector<DiffRow> diff_table(const ProblemInstance& inst, const SolveReport& a, const SolveReport& b);
void write_diff_csv(std::ostream& out, const std::vector<DiffRow>& rows);

}  // namespace zfpa::tools
