// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fixtures.hpp"
#include "reference.hpp"
#include "zfpa/fast_heuristic.hpp"
#include "zfpa/scenario.hpp"

using namespace zfpa;

namespace {

// On the two-user instance the step succeeds exactly when theta_bar reaches
// the boundary root 1 / ((P + 2 - 2^1.5) ln2). With theta1 = 1 / ((1 + P/2) ln2)
// and a single deficit 1.5 - log2(1 + P/2), that is a threshold on epsilon.
double two_user_epsilon_threshold(double budget) {
  const double ratio = (1.0 + budget / 2.0) / (budget + 2.0 - std::pow(2.0, 1.5));
  const double deficit = 1.5 - std::log2(1.0 + budget / 2.0);
  return std::log2(ratio) / deficit;
}

bool contains(const std::vector<std::size_t>& v, std::size_t k) { return std::find(v.begin(), v.end(), k) != v.end(); }

}  // namespace

TEST_SUITE("fast_heuristic") {
  TEST_CASE("step factor") {
    auto inst = zfpa::testing::make_instance(3, 1, 1.0, {1.0, 1.0, 1.0}, {2.0, 1.0, 0.0}, {0, 1});
    inst.num_antennas = 3;
    HeuristicParams p;
    p.epsilon = 0.2;
    // user 0: deficit 1; user 1 meets its floor with room to spare.
    StepFactor sf = step_factor(inst, {1.0, 2.0, 0.0}, p);
    CHECK(sf.unsatisfied == std::vector<std::size_t>{0});
    CHECK(sf.W == doctest::Approx(std::pow(2.0, 0.2)));
    // Within the guard margin above the floor: in T, but W is not pulled below 1.
    sf = step_factor(inst, {2.5, 1.02, 0.0}, p);
    CHECK(sf.unsatisfied == std::vector<std::size_t>{1});
    CHECK(sf.W == 1.0);
    sf = step_factor(inst, {3.0, 3.0, 0.0}, p);
    CHECK(sf.unsatisfied.empty());
    CHECK(sf.W == 1.0);
    p.epsilon = 0.0;
    CHECK(step_factor(inst, {0.0, 0.0, 0.0}, p).W == 1.0);
  }

  TEST_CASE("floors met by the unconstrained solution") {
    const auto inst = zfpa::testing::make_instance(2, 1, 3.0, {1.0, 1.0}, {0.5, 0.0}, {0});
    const auto r = run_heuristic(inst);
    CHECK(r.report.status == SolveStatus::optimal);
    CHECK(r.trace.theta2 == r.trace.theta1);
    CHECK(r.trace.deltas2 == std::vector<double>{0.0, 0.0});
    CHECK(classify_failure(inst, r.trace, r.report) == HeuristicFailure::none);
  }

  TEST_CASE("two-user instance: success flips at the derived epsilon") {
    const double budget = 3.0;
    const auto inst = zfpa::testing::two_user_instance(budget);
    const double eps_star = two_user_epsilon_threshold(budget);
    CHECK(eps_star == doctest::Approx(1.1410).epsilon(1e-3));

    HeuristicParams p;
    p.epsilon = eps_star * 1.05;
    auto r = run_heuristic(inst, p);
    CHECK(r.trace.succeeded);
    CHECK(r.report.status == SolveStatus::heuristic_feasible);
    CHECK(r.report.feasibility.feasible);
    CHECK(r.trace.theta2 <= r.trace.theta_bar);
    CHECK(r.trace.theta_bar == doctest::Approx(r.trace.W * r.trace.theta1));
    CHECK(r.trace.deltas2[1] == 0.0);
    const double best = zfpa::testing::reference_optimum(inst).objective;
    const double got = objective(inst, r.report.allocation);
    CHECK(got <= best * (1.0 + 1e-9));
    CHECK(got >= best * 0.97);
    CHECK(classify_failure(inst, r.trace, r.report) == HeuristicFailure::none);

    p.epsilon = eps_star * 0.95;
    r = run_heuristic(inst, p);
    CHECK_FALSE(r.trace.succeeded);
    CHECK(r.report.feasibility.max_rate_deficit() > 0.0);
    CHECK(classify_failure(inst, r.trace, r.report) == HeuristicFailure::undershoot_theta_bar);
  }

  TEST_CASE("epsilon 0 undershoots on a tight instance") {
    HeuristicParams p;
    p.epsilon = 0.0;
    const auto inst = zfpa::testing::two_user_instance();
    const auto r = run_heuristic(inst, p);
    CHECK_FALSE(r.trace.succeeded);
    CHECK(r.report.status == SolveStatus::heuristic_infeasible);
    CHECK(r.trace.W == 1.0);
    CHECK(classify_failure(inst, r.trace, r.report) == HeuristicFailure::undershoot_theta_bar);
  }

  TEST_CASE("stale sets leave the power off the budget; refine lands on it") {
    int stale = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      ScenarioSpec spec;
      spec.num_rt = 3;
      spec.scale = 0.6;
      spec.seed = seed;
      const auto inst = generate(spec).instance;
      HeuristicParams p;
      p.epsilon = 1.0;
      const auto loose = run_heuristic(inst, p);
      if (classify_failure(inst, loose.trace, loose.report) == HeuristicFailure::stale_active_sets) {
        ++stale;
        CHECK(loose.report.feasibility.violated_users.empty());
      }
      p.refine = true;
      const auto refined = run_heuristic(inst, p);
      CHECK(std::abs(refined.report.feasibility.power_slack) <= 1e-9 * inst.power_budget);
      CHECK(classify_failure(inst, refined.trace, refined.report) != HeuristicFailure::stale_active_sets);
    }
    CHECK(stale > 0);
  }

  TEST_CASE("collateral RT user is repaired") {
    // Three users on their own unit-gain subcarriers: theta1 gives each 1 bit.
    auto inst = zfpa::testing::make_instance(3, 3, 3.0, {1, 0, 0, 0, 1, 0, 0, 0, 1}, {1.5, 0.99, 0.0}, {0, 1});
    HeuristicParams p;
    p.epsilon = 2.0;
    p.guard_margin = 0.0;
    const auto r = run_heuristic(inst, p);
    CHECK(r.trace.initial_unsatisfied == std::vector<std::size_t>{0});
    CHECK(r.trace.repair_rounds >= 1);
    CHECK(contains(r.trace.unsatisfied, 1));
    CHECK(r.report.feasibility.rate_deficits[1] == 0.0);

    // The same instance with the guard on catches user 1 up front.
    p.guard_margin = 0.05;
    const auto guarded = run_heuristic(inst, p);
    CHECK(contains(guarded.trace.initial_unsatisfied, 1));
    CHECK(guarded.trace.repair_rounds == 0);
  }

  TEST_CASE("exit point above the boundary whenever theta2 <= theta_bar") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
      ScenarioSpec spec;
      spec.num_rt = 1 + seed % 6;
      spec.scale = 0.1 * static_cast<double>(1 + seed % 10);
      spec.seed = 100 + seed;
      const auto inst = generate(spec).instance;
      for (double eps : {0.1, 0.5, 1.0}) {
        HeuristicParams p;
        p.epsilon = eps;
        const auto r = run_heuristic(inst, p);
        if (r.report.status == SolveStatus::optimal || r.trace.theta2 > r.trace.theta_bar) continue;
        const auto rates = user_rates(inst, r.report.allocation);
        for (std::size_t k : r.trace.unsatisfied) CHECK(rates[k] >= inst.rate_floors[k] * (1.0 - 1e-12));
      }
    }
  }

  TEST_CASE("success implies feasibility, and runs are deterministic") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
      ScenarioSpec spec;
      spec.num_rt = 3;
      spec.scale = 0.1 * static_cast<double>(1 + seed % 10);
      spec.seed = 500 + seed;
      const auto inst = generate(spec).instance;
      for (bool refine : {false, true}) {
        HeuristicParams p;
        p.refine = refine;
        const auto a = run_heuristic(inst, p);
        const auto b = run_heuristic(inst, p);
        if (a.trace.succeeded) CHECK(check_feasibility(inst, a.report.allocation, {1e-6, 1e-6}).feasible);
        CHECK(a.trace.theta2 == b.trace.theta2);
        CHECK(a.trace.deltas2 == b.trace.deltas2);
        CHECK(a.trace.unsatisfied == b.trace.unsatisfied);
        CHECK(a.report.allocation.powers == b.report.allocation.powers);
        for (std::size_t k = 0; k < inst.num_users; ++k)
          if (!contains(a.trace.unsatisfied, k)) CHECK(a.trace.deltas2[k] == 0.0);
      }
    }
  }

  TEST_CASE("failure names") {
    CHECK(to_string(HeuristicFailure::stale_active_sets) == "stale_active_sets");
    CHECK(to_string(HeuristicFailure::none) == "none");
  }
}
