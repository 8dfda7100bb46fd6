// SPDX-License-Identifier: Apache-2.0

#include "zfpa/fast_heuristic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "zfpa/unconstrained.hpp"
#include "zfpa/waterfill.hpp"

namespace zfpa {

namespace {

double step_for(const ProblemInstance& inst, const std::vector<double>& rates, const std::vector<std::size_t>& users,
                double epsilon) {
  double W = 1.0;
  for (std::size_t k : users) W = std::max(W, std::exp2(epsilon * (inst.rate_floors[k] - rates[k])));
  return W;
}

// delta_k that puts user k on its floor at theta, with the set grown from
// B_k(theta, 0) one subcarrier at a time until it is consistent with the
// delta it produces. Entries join in ascending gain order, so the set stays a
// prefix and at most N steps are taken.
double delta_on_boundary(const ProblemInstance& inst, std::size_t k, double theta) {
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t n = 0; n < inst.num_subcarriers; ++n)
    if (inst.gains(n, k) > 0.0) order.emplace_back(inst.gains(n, k), n);
  if (order.empty()) throw std::domain_error("rate floor unreachable: user has no scheduled subcarrier");
  std::sort(order.begin(), order.end());

  ActiveSets set(inst.num_users);
  std::size_t next = 0;
  while (next < order.size() && waterfill_power(corner_value(inst, order[next].second, k, 0.0), theta) > 0.0) {
    set.add(k, order[next].second, order[next].first);
    ++next;
  }
  if (next == 0) {
    set.add(k, order[0].second, order[0].first);
    next = 1;
  }

  double delta = delta_from_rate_floor(inst, k, theta, set);
  while (next < order.size() &&
         waterfill_power(corner_value(inst, order[next].second, k, delta), theta) > 0.0) {
    set.add(k, order[next].second, order[next].first);
    ++next;
    delta = delta_from_rate_floor(inst, k, theta, set);
  }
  return delta;
}

void insert_sorted(std::vector<std::size_t>& users, std::size_t k) {
  auto it = std::lower_bound(users.begin(), users.end(), k);
  if (it == users.end() || *it != k) users.insert(it, k);
}

}  // namespace

StepFactor step_factor(const ProblemInstance& inst, const std::vector<double>& rates, const HeuristicParams& params) {
  StepFactor out;
  for (std::size_t k : inst.rt_users) {
    const double floor = inst.rate_floors[k];
    if (floor > 0.0 && rates[k] < floor * (1.0 + params.guard_margin)) out.unsatisfied.push_back(k);
  }
  out.W = step_for(inst, rates, out.unsatisfied, params.epsilon);
  return out;
}

HeuristicResult run_heuristic(const ProblemInstance& inst, const HeuristicParams& params) {
  const auto start = std::chrono::steady_clock::now();
  HeuristicResult res;
  SolveReport& rep = res.report;
  HeuristicTrace& tr = res.trace;
  const std::size_t K = inst.num_users;

  auto finish = [&](SolveStatus status) {
    rep.status = status;
    rep.wall_time_ns =
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
    return res;
  };
  auto evaluate = [&](double theta, std::vector<double> deltas) {
    rep.dual = DualPoint{theta, std::move(deltas)};
    rep.allocation = primal_from_dual(inst, rep.dual);
    rep.feasibility = check_feasibility(inst, rep.allocation, params.tol);
  };

  const std::vector<double> zeros(K, 0.0);
  const UnconstrainedResult first = solve_unconstrained(inst, zeros);
  rep.iterations = first.iterations;
  tr.theta1 = first.theta_star;
  evaluate(tr.theta1, zeros);
  if (rep.feasibility.violated_users.empty()) {
    tr.theta_bar = tr.theta1;
    tr.theta2 = tr.theta1;
    tr.deltas2 = zeros;
    tr.succeeded = rep.feasibility.feasible;
    rep.detail = "unconstrained solution meets every floor";
    return finish(SolveStatus::optimal);
  }

  const std::vector<double> rates1 = user_rates(inst, rep.allocation);
  StepFactor sf = step_factor(inst, rates1, params);
  tr.unsatisfied = std::move(sf.unsatisfied);
  tr.initial_unsatisfied = tr.unsatisfied;

  try {
    for (;;) {
      tr.W = step_for(inst, rates1, tr.unsatisfied, params.epsilon);
      tr.theta_bar = tr.W * tr.theta1;
      tr.deltas2.assign(K, 0.0);
      for (std::size_t k : tr.unsatisfied) tr.deltas2[k] = delta_on_boundary(inst, k, tr.theta_bar);

      const ActiveSets sets = active_sets(inst, DualPoint{tr.theta_bar, tr.deltas2});
      tr.theta2 = theta_closed_form(inst, tr.deltas2, sets);
      ++rep.iterations;
      if (params.refine) {
        const UnconstrainedResult exact = solve_unconstrained(inst, tr.deltas2);
        tr.theta2 = exact.theta_star;
        rep.iterations += exact.iterations;
      }
      evaluate(tr.theta2, tr.deltas2);
      if (rep.feasibility.feasible) break;

      std::vector<std::size_t> collateral;
      for (std::size_t k : rep.feasibility.violated_users)
        if (!std::binary_search(tr.unsatisfied.begin(), tr.unsatisfied.end(), k)) collateral.push_back(k);
      if (collateral.empty() || tr.repair_rounds >= static_cast<int>(inst.rt_users.size())) break;
      for (std::size_t k : collateral) insert_sorted(tr.unsatisfied, k);
      ++tr.repair_rounds;
    }
  } catch (const std::exception& e) {
    // A floored user without subcarriers, or nothing left active at theta_bar.
    rep.detail = e.what();
    tr.succeeded = false;
    if (rep.dual.deltas.size() != K) evaluate(tr.theta1, zeros);
    return finish(SolveStatus::heuristic_infeasible);
  }

  tr.succeeded = rep.feasibility.feasible;
  return finish(tr.succeeded ? SolveStatus::heuristic_feasible : SolveStatus::heuristic_infeasible);
}

std::string to_string(HeuristicFailure failure) {
  switch (failure) {
    case HeuristicFailure::none: return "none";
    case HeuristicFailure::undershoot_theta_bar: return "undershoot_theta_bar";
    case HeuristicFailure::stale_active_sets: return "stale_active_sets";
    case HeuristicFailure::collateral_rt_user: return "collateral_rt_user";
  }
  return "unknown";
}

HeuristicFailure classify_failure(const ProblemInstance& inst, const HeuristicTrace& trace, const SolveReport& report,
                                  Tolerances tol) {
  const FeasibilityReport& fe = report.feasibility;
  if (!fe.violated_users.empty()) {
    for (std::size_t k : fe.violated_users)
      if (std::binary_search(trace.initial_unsatisfied.begin(), trace.initial_unsatisfied.end(), k))
        return HeuristicFailure::undershoot_theta_bar;
    return HeuristicFailure::collateral_rt_user;
  }
  if (std::abs(fe.power_slack) > tol.power * inst.power_budget) return HeuristicFailure::stale_active_sets;
  return HeuristicFailure::none;
}

}  // namespace zfpa
