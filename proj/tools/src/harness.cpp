// SPDX-License-Identifier: Apache-2.0

#include "zfpa_tools/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "zfpa/fast_heuristic.hpp"
#include "zfpa/rate_boundary.hpp"
#include "zfpa/unconstrained.hpp"

namespace zfpa::tools {

using nlohmann::json;

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::exact: return "exact";
    case SolverKind::bounds: return "bounds";
    case SolverKind::heuristic: return "heuristic";
    case SolverKind::unconstrained: return "unconstrained";
  }
  return "unknown";
}

SolverKind solver_from_string(std::string_view name) {
  if (name == "exact") return SolverKind::exact;
  if (name == "bounds") return SolverKind::bounds;
  if (name == "heuristic") return SolverKind::heuristic;
  if (name == "unconstrained") return SolverKind::unconstrained;
  throw std::invalid_argument("unknown solver: " + std::string(name));
}

std::vector<SolverKind> parse_solver_list(std::string_view list) {
  std::vector<SolverKind> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const std::size_t comma = std::min(list.find(',', pos), list.size());
    const std::string_view item = list.substr(pos, comma - pos);
    if (!item.empty()) out.push_back(solver_from_string(item));
    pos = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty solver list");
  return out;
}

SolveReport run_solver(SolverKind kind, const ProblemInstance& inst, const SolverOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SolveReport rep;
  switch (kind) {
    case SolverKind::exact: rep = solve_exact(inst, options.oracle); break;
    case SolverKind::bounds: rep = solve_with_bounds(inst); break;
    case SolverKind::unconstrained: rep = solve_unconstrained_report(inst); break;
    case SolverKind::heuristic: {
      HeuristicParams params;
      params.epsilon = options.epsilon;
      params.refine = options.refine;
      rep = run_heuristic(inst, params).report;
      break;
    }
  }
  rep.wall_time_ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

RunRecord make_record(const ProblemInstance& inst, const SolveReport& report, SolverKind kind) {
  RunRecord r;
  r.solver = to_string(kind);
  r.status = to_string(report.status);
  r.objective = objective(inst, report.allocation);
  r.power = report.feasibility.power_used;
  r.max_deficit = report.feasibility.max_rate_deficit();
  r.iterations = report.iterations;
  r.time_ns = report.wall_time_ns;
  return r;
}

std::string record_json(const RunRecord& r) {
  json j;
  j["instance"] = r.instance;
  j["axis"] = r.axis;
  j["solver"] = r.solver;
  j["status"] = r.status;
  j["objective"] = r.objective;
  j["power"] = r.power;
  j["max_deficit"] = r.max_deficit;
  j["iters"] = r.iterations;
  j["time_ns"] = r.time_ns;
  j["seed"] = r.seed;
  return j.dump();
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::scale: return "scale";
    case SweepAxis::rt_count: return "rt_count";
    case SweepAxis::epsilon: return "epsilon";
  }
  return "unknown";
}

SweepAxis axis_from_string(std::string_view name) {
  if (name == "scale") return SweepAxis::scale;
  if (name == "rt_count") return SweepAxis::rt_count;
  if (name == "epsilon") return SweepAxis::epsilon;
  throw std::invalid_argument("unknown sweep axis: " + std::string(name));
}

std::vector<std::string> validate(const SweepConfig& c) {
  std::vector<std::string> out;
  if (c.axis_values.empty()) out.emplace_back("axis values empty");
  if (c.solvers.empty()) out.emplace_back("solver list empty");
  if (c.repetitions < 1) out.emplace_back("repetitions must be at least 1");
  if (c.timing_repeats < 1) out.emplace_back("timing_repeats must be at least 1");
  if (c.options.epsilon < 0.0) out.emplace_back("epsilon must be nonnegative");
  for (double v : c.axis_values) {
    if (c.axis == SweepAxis::scale && !(v >= 0.0 && v <= 1.0)) out.emplace_back("scale value outside [0, 1]");
    if (c.axis == SweepAxis::rt_count &&
        !(v >= 0.0 && v == std::floor(v) && v <= static_cast<double>(c.scenario.num_users)))
      out.emplace_back("rt_count value must be an integer in [0, K]");
    if (c.axis == SweepAxis::epsilon && !(v >= 0.0)) out.emplace_back("epsilon value must be nonnegative");
  }
  for (auto& e : zfpa::validate(c.scenario)) out.push_back("scenario: " + e);
  return out;
}

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

SweepConfig sweep_config_from_json(std::string_view text) {
  SweepConfig c;
  try {
    const json j = json::parse(text);
    const json sc = j.value("scenario", json::object());
    ScenarioSpec& s = c.scenario;
    s.num_users = get_or<std::size_t>(sc, "K", s.num_users);
    s.num_subcarriers = get_or<std::size_t>(sc, "N", s.num_subcarriers);
    s.num_antennas = get_or<std::size_t>(sc, "M", s.num_antennas);
    s.power_budget = get_or<double>(sc, "P", s.power_budget);
    s.num_rt = get_or<std::size_t>(sc, "R", s.num_rt);
    s.mode = bound_mode_from_string(get_or<std::string>(sc, "mode", to_string(s.mode)));
    s.scale = get_or<double>(sc, "scale", s.scale);
    s.ratios = get_or<std::vector<double>>(sc, "ratios", s.ratios);
    s.alpha = get_or<double>(sc, "alpha", s.alpha);
    s.seed = get_or<std::uint64_t>(sc, "seed", s.seed);

    c.axis = axis_from_string(get_or<std::string>(j, "axis", "scale"));
    c.axis_values = get_or<std::vector<double>>(j, "values", {});
    if (j.contains("solvers")) {
      for (const auto& name : j.at("solvers")) c.solvers.push_back(solver_from_string(name.get<std::string>()));
    } else {
      c.solvers = {SolverKind::exact, SolverKind::bounds, SolverKind::heuristic, SolverKind::unconstrained};
    }
    c.repetitions = get_or<int>(j, "repetitions", 1);
    c.options.epsilon = get_or<double>(j, "epsilon", c.options.epsilon);
    c.options.refine = get_or<bool>(j, "refine", false);
    // The timing replica repeats each solve; accuracy sweeps only need one.
    c.timing_repeats = get_or<int>(j, "timing_repeats", c.axis == SweepAxis::rt_count ? 100 : 1);
    c.serial_timing = get_or<bool>(j, "serial_timing", false);
    c.workers = get_or<unsigned>(j, "workers", 0);
    c.output_path = get_or<std::string>(j, "output", "");
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("sweep config: ") + e.what());
  }
  return c;
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return sweep_config_from_json(buf.str());
}

std::uint64_t child_seed(std::uint64_t seed, std::size_t axis_index, std::size_t repetition) {
  std::uint64_t x = (static_cast<std::uint64_t>(axis_index) << 32) ^ static_cast<std::uint64_t>(repetition);
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return seed ^ (x ^ (x >> 31));
}

std::vector<SweepPoint> expand(const SweepConfig& config) {
  std::vector<SweepPoint> out;
  for (std::size_t a = 0; a < config.axis_values.size(); ++a) {
    const double v = config.axis_values[a];
    for (int rep = 0; rep < config.repetitions; ++rep) {
      SweepPoint p;
      p.axis_value = v;
      p.spec = config.scenario;
      p.options = config.options;
      std::size_t seed_axis = a;
      switch (config.axis) {
        case SweepAxis::scale: p.spec.scale = v; break;
        case SweepAxis::rt_count: p.spec.num_rt = static_cast<std::size_t>(v); break;
        case SweepAxis::epsilon:
          p.options.epsilon = v;
          seed_axis = 0;
          break;
      }
      p.spec.seed = child_seed(config.scenario.seed, seed_axis, static_cast<std::size_t>(rep));
      std::ostringstream id;
      id << to_string(config.axis) << '-' << a << "-r" << rep;
      p.id = id.str();
      out.push_back(std::move(p));
    }
  }
  return out;
}

namespace {

template <class Task>
void parallel_for(std::size_t count, unsigned workers, Task&& task) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<RunRecord> run_sweep(const SweepConfig& config) {
  if (const auto errors = validate(config); !errors.empty()) throw std::invalid_argument(errors.front());
  const std::vector<SweepPoint> points = expand(config);
  const unsigned workers = config.serial_timing ? 1u : config.workers;

  std::vector<ProblemInstance> instances(points.size());
  parallel_for(points.size(), workers, [&](std::size_t i) { instances[i] = generate(points[i].spec).instance; });

  const std::size_t S = config.solvers.size();
  std::vector<RunRecord> records(points.size() * S);
  parallel_for(records.size(), workers, [&](std::size_t t) {
    const std::size_t i = t / S;
    const SolverKind kind = config.solvers[t % S];
    const SweepPoint& p = points[i];
    // Warm-up solve, discarded.
    SolveReport rep = run_solver(kind, instances[i], p.options);
    std::int64_t total = 0;
    for (int r = 0; r < config.timing_repeats; ++r) {
      rep = run_solver(kind, instances[i], p.options);
      total += rep.wall_time_ns;
    }
    rep.wall_time_ns = total / config.timing_repeats;
    RunRecord rec = make_record(instances[i], rep, kind);
    rec.instance = p.id;
    rec.axis = p.axis_value;
    rec.seed = p.spec.seed;
    records[t] = std::move(rec);
  });
  return records;
}

namespace {

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records)
    out << r.instance << ',' << num(r.axis) << ',' << r.solver << ',' << r.status << ',' << num(r.objective) << ','
        << num(r.power) << ',' << num(r.max_deficit) << ',' << r.iterations << ',' << r.time_ns << ',' << r.seed
        << '\n';
}

namespace {

TimingSummary summarize(std::string solver, double axis, std::vector<double> times) {
  TimingSummary s;
  s.solver = std::move(solver);
  s.axis = axis;
  s.count = times.size();
  if (times.empty()) return s;
  std::sort(times.begin(), times.end());
  double sum = 0.0;
  for (double t : times) sum += t;
  s.mean_ns = sum / static_cast<double>(times.size());
  const std::size_t m = times.size() / 2;
  s.median_ns = times.size() % 2 ? times[m] : 0.5 * (times[m - 1] + times[m]);
  s.min_ns = times.front();
  s.max_ns = times.back();
  return s;
}

}  // namespace

std::vector<TimingSummary> summarize_timing(const std::vector<RunRecord>& records) {
  std::map<std::pair<std::string, double>, std::vector<double>> groups;
  std::vector<std::pair<std::string, double>> order;
  for (const auto& r : records) {
    const auto key = std::make_pair(r.solver, r.axis);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(static_cast<double>(r.time_ns));
  }
  std::vector<TimingSummary> out;
  for (const auto& key : order) out.push_back(summarize(key.first, key.second, groups[key]));
  return out;
}

std::vector<TimingSummary> summarize_timing_by_solver(const std::vector<RunRecord>& records) {
  std::map<std::string, std::vector<double>> groups;
  std::vector<std::string> order;
  for (const auto& r : records) {
    if (!groups.count(r.solver)) order.push_back(r.solver);
    groups[r.solver].push_back(static_cast<double>(r.time_ns));
  }
  std::vector<TimingSummary> out;
  for (const auto& name : order) out.push_back(summarize(name, NAN, groups[name]));
  return out;
}

void write_timing_summary(std::ostream& out, const std::vector<TimingSummary>& rows) {
  out << "solver,axis,count,mean_ns,median_ns,min_ns,max_ns\n";
  for (const auto& s : rows)
    out << s.solver << ',' << (std::isnan(s.axis) ? std::string("all") : num(s.axis)) << ',' << s.count << ','
        << num(s.mean_ns) << ',' << num(s.median_ns) << ',' << num(s.min_ns) << ',' << num(s.max_ns) << '\n';
}

std::vector<DiffRow> diff_table(const ProblemInstance& inst, const SolveReport& a, const SolveReport& b) {
  const std::vector<double> ra = user_rates(inst, a.allocation);
  const std::vector<double> rb = user_rates(inst, b.allocation);
  std::vector<std::size_t> users = inst.rt_users;
  if (users.empty())
    for (std::size_t k = 0; k < inst.num_users; ++k) users.push_back(k);
  std::vector<DiffRow> out;
  for (std::size_t k : users) {
    DiffRow row;
    row.user = k;
    row.floor = inst.rate_floors[k];
    row.rate_a = ra[k];
    row.rate_b = rb[k];
    row.diff_a = ra[k] - row.floor;
    row.diff_b = rb[k] - row.floor;
    out.push_back(row);
  }
  return out;
}

void write_diff_csv(std::ostream& out, const std::vector<DiffRow>& rows) {
  out << kDiffHeader << '\n';
  for (const auto& r : rows)
    out << r.user << ',' << num(r.floor) << ',' << num(r.rate_a) << ',' << num(r.rate_b) << ',' << num(r.diff_a) << ','
        << num(r.diff_b) << '\n';
}

}  // namespace zfpa::tools
