// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "zfpa_tools/harness.hpp"

using namespace zfpa;
using namespace zfpa::tools;

namespace {

SweepConfig tiny_config() {
  SweepConfig c;
  c.scenario.num_users = 8;
  c.scenario.num_subcarriers = 6;
  c.scenario.num_rt = 2;
  c.scenario.seed = 4;
  c.axis = SweepAxis::scale;
  c.axis_values = {0.2, 0.8};
  c.repetitions = 2;
  c.solvers = {SolverKind::exact, SolverKind::bounds, SolverKind::heuristic, SolverKind::unconstrained};
  c.workers = 2;
  return c;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  return out;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("solver names") {
    CHECK(parse_solver_list("exact,heuristic") == std::vector<SolverKind>{SolverKind::exact, SolverKind::heuristic});
    CHECK(to_string(SolverKind::bounds) == "bounds");
    CHECK_THROWS(solver_from_string("simplex"));
    CHECK(axis_from_string("rt_count") == SweepAxis::rt_count);
    CHECK_THROWS(axis_from_string("budget"));
  }

  TEST_CASE("child seeds") {
    CHECK(child_seed(1, 0, 0) == child_seed(1, 0, 0));
    std::set<std::uint64_t> seen;
    for (std::size_t a = 0; a < 10; ++a)
      for (std::size_t r = 0; r < 10; ++r) seen.insert(child_seed(42, a, r));
    CHECK(seen.size() == 100);
    CHECK((child_seed(1, 3, 4) ^ child_seed(2, 3, 4)) == 3u);
  }

  TEST_CASE("expansion") {
    SweepConfig c = tiny_config();
    auto pts = expand(c);
    REQUIRE(pts.size() == 4);
    CHECK(pts[0].id == "scale-0-r0");
    CHECK(pts[3].id == "scale-1-r1");
    CHECK(pts[2].spec.scale == 0.8);
    CHECK(pts[0].spec.seed != pts[2].spec.seed);

    c.axis = SweepAxis::epsilon;
    c.axis_values = {0.1, 0.5, 1.0};
    pts = expand(c);
    REQUIRE(pts.size() == 6);
    // Same instance for every epsilon, paired by repetition.
    CHECK(pts[0].spec.seed == pts[2].spec.seed);
    CHECK(pts[1].spec.seed == pts[5].spec.seed);
    CHECK(pts[4].options.epsilon == 1.0);

    c.axis = SweepAxis::rt_count;
    c.axis_values = {0, 3};
    pts = expand(c);
    CHECK(pts[2].spec.num_rt == 3);
  }

  TEST_CASE("config parsing and validation") {
    const auto c = sweep_config_from_json(
        R"({"scenario":{"K":12,"R":4,"mode":"fixed_ratio"},"axis":"rt_count","values":[0,4],"solvers":["exact"]})");
    CHECK(c.scenario.num_users == 12);
    CHECK(c.scenario.mode == BoundMode::fixed_ratio);
    CHECK(c.timing_repeats == 100);
    CHECK(c.solvers == std::vector<SolverKind>{SolverKind::exact});
    CHECK(validate(c).empty());
    CHECK(sweep_config_from_json(R"({"values":[0.5]})").timing_repeats == 1);

    CHECK_THROWS_AS(sweep_config_from_json("{not json"), std::invalid_argument);
    CHECK_THROWS_AS(sweep_config_from_json(R"({"values":"x"})"), std::invalid_argument);
    CHECK_FALSE(validate(sweep_config_from_json(R"({"values":[]})")).empty());
    CHECK_FALSE(validate(sweep_config_from_json(R"({"values":[1.5]})")).empty());
    CHECK_FALSE(validate(sweep_config_from_json(R"({"axis":"rt_count","values":[2.5]})")).empty());
    CHECK_FALSE(validate(sweep_config_from_json(R"({"values":[0.5],"solvers":[]})")).empty());
    CHECK_THROWS(load_sweep_config("/nonexistent/sweep.json"));
  }

  TEST_CASE("sweep CSV") {
    const SweepConfig c = tiny_config();
    const auto records = run_sweep(c);
    REQUIRE(records.size() == 16);
    std::ostringstream out;
    write_csv(out, records);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == kCsvHeader);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
      const auto cells = split(line, ',');
      REQUIRE(cells.size() == 10);
      for (int i : {1, 4, 5, 6}) CHECK(std::isfinite(std::stod(cells[i])));
      CHECK(std::stoll(cells[8]) >= 0);
      ++rows;
    }
    CHECK(rows == 16);
    // Ordered by point, then by solver in config order.
    CHECK(records[0].instance == "scale-0-r0");
    CHECK(records[0].solver == "exact");
    CHECK(records[3].solver == "unconstrained");
    CHECK(records[4].instance == "scale-0-r1");
  }

  TEST_CASE("sweeps are reproducible and exact dominates") {
    SweepConfig c = tiny_config();
    const auto a = run_sweep(c);
    c.serial_timing = true;
    const auto b = run_sweep(c);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].instance == b[i].instance);
      CHECK(a[i].objective == b[i].objective);
      CHECK(a[i].status == b[i].status);
      CHECK(a[i].seed == b[i].seed);
    }
    for (std::size_t i = 0; i < a.size(); i += 4) {
      REQUIRE(a[i].solver == "exact");
      if (a[i].status != "optimal") continue;
      for (std::size_t j = i + 1; j < i + 3; ++j)
        if (a[j].max_deficit <= 1e-6) CHECK(a[j].objective <= a[i].objective * (1.0 + 1e-8));
    }
  }

  TEST_CASE("timing summary") {
    std::vector<RunRecord> recs(4);
    const std::int64_t times[] = {10, 30, 20, 100};
    for (int i = 0; i < 4; ++i) {
      recs[i].solver = i < 3 ? "exact" : "bounds";
      recs[i].axis = 1.0;
      recs[i].time_ns = times[i];
    }
    const auto rows = summarize_timing(recs);
    REQUIRE(rows.size() == 2);
    const auto& ex = rows[0].solver == "exact" ? rows[0] : rows[1];
    CHECK(ex.count == 3);
    CHECK(ex.mean_ns == doctest::Approx(20.0));
    CHECK(ex.median_ns == doctest::Approx(20.0));
    CHECK(ex.min_ns == 10.0);
    CHECK(ex.max_ns == 30.0);
    CHECK(summarize_timing_by_solver(recs).size() == 2);
    std::ostringstream out;
    write_timing_summary(out, rows);
    CHECK(out.str().find("exact") != std::string::npos);
  }

  TEST_CASE("diff table") {
    const auto inst = zfpa::testing::two_user_instance();
    SolverOptions opts;
    const auto a = run_solver(SolverKind::exact, inst, opts);
    const auto b = run_solver(SolverKind::unconstrained, inst, opts);
    const auto rows = diff_table(inst, a, b);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].user == 0);
    CHECK(rows[0].floor == 1.5);
    CHECK(rows[0].diff_a == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(rows[0].diff_b == doctest::Approx(std::log2(2.5) - 1.5));
    std::ostringstream out;
    write_diff_csv(out, rows);
    CHECK(out.str().rfind(std::string(kDiffHeader), 0) == 0);

    auto be_only = inst;
    be_only.rt_users.clear();
    be_only.rate_floors = {0.0, 0.0};
    CHECK(diff_table(be_only, b, b).size() == 2);
  }

  TEST_CASE("record JSON carries every CSV column") {
    RunRecord r;
    r.instance = "x";
    r.solver = "exact";
    const std::string j = record_json(r);
    for (const auto& col : split(std::string(kCsvHeader), ','))
      CHECK(j.find("\"" + col + "\"") != std::string::npos);
  }
}
