// SPDX-License-Identifier: Apache-2.0

#include "zfpa/rate_boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "zfpa/unconstrained.hpp"
#include "zfpa/waterfill.hpp"

namespace zfpa {

std::vector<double> BoundaryModel::deltas_at(const ProblemInstance& inst, double theta) const {
  std::vector<double> deltas(inst.num_users, 0.0);
  for (std::size_t k = 0; k < inst.num_users; ++k)
    if (slopes[k] > 0.0) deltas[k] = slopes[k] * theta - inst.weights[k];
  return deltas;
}

BoundaryModel build_boundary(const ProblemInstance& inst, double theta_ref) {
  if (!(theta_ref > 0.0)) throw std::invalid_argument("build_boundary: theta_ref must be positive");
  const std::size_t K = inst.num_users;
  BoundaryModel model;
  model.slopes.assign(K, 0.0);
  model.thresholds.assign(K, std::numeric_limits<double>::infinity());
  model.frozen_sets.assign(K, {});

  for (std::size_t k = 0; k < K; ++k) {
    const double floor = inst.rate_floors[k];
    if (floor <= 0.0) continue;
    // The set at (theta_ref, 0) is a prefix of the user's gains in ascending
    // order; the boundary set is the prefix on which the floor is met exactly.
    FloorLevel fl = floor_water_level(inst, k, floor);
    model.slopes[k] = kLn2 * fl.level;
    model.thresholds[k] = inst.weights[k] / model.slopes[k];
    model.frozen_sets[k] = std::move(fl.set);
    model.rt_power += fl.min_power;
  }
  return model;
}

namespace {

Allocation boundary_allocation(const ProblemInstance& inst, const BoundaryModel& model, double theta) {
  return primal_from_dual(inst, DualPoint{theta, model.deltas_at(inst, theta)});
}

}  // namespace

double power_on_boundary(const ProblemInstance& inst, const BoundaryModel& model, double theta) {
  return total_power(inst, boundary_allocation(inst, model, theta));
}

std::vector<double> rate_on_boundary(const ProblemInstance& inst, const BoundaryModel& model, double theta) {
  return user_rates(inst, boundary_allocation(inst, model, theta));
}

SolveReport solve_bounds(const ProblemInstance& inst, BoundsSettings settings) {
  const std::vector<double> zeros(inst.num_users, 0.0);
  return solve_bounds(inst, solve_unconstrained(inst, zeros).theta_star, settings);
}

SolveReport solve_bounds(const ProblemInstance& inst, double theta_unconstrained, BoundsSettings settings) {
  SolveReport rep;
  const double budget = inst.power_budget;

  BoundaryModel model;
  try {
    model = build_boundary(inst, theta_unconstrained);
  } catch (const std::domain_error& e) {
    rep.status = SolveStatus::infeasible;
    rep.detail = e.what();
    rep.dual = DualPoint::with_zero_deltas(theta_unconstrained, inst.num_users);
    rep.allocation = primal_from_dual(inst, rep.dual);
    rep.feasibility = check_feasibility(inst, rep.allocation, settings.tol);
    return rep;
  }

  // Past the largest corner of the unfloored users only floored power remains.
  double theta_sat = theta_unconstrained;
  for (std::size_t n = 0; n < inst.num_subcarriers; ++n)
    for (std::size_t k = 0; k < inst.num_users; ++k)
      if (inst.gains(n, k) > 0.0 && model.slopes[k] == 0.0)
        theta_sat = std::max(theta_sat, corner_value(inst, n, k, 0.0));

  auto power_at = [&](double theta) { return power_on_boundary(inst, model, theta); };
  auto finish = [&](double theta, SolveStatus status) {
    rep.status = status;
    rep.dual = DualPoint{theta, model.deltas_at(inst, theta)};
    rep.allocation = primal_from_dual(inst, rep.dual);
    rep.feasibility = check_feasibility(inst, rep.allocation, settings.tol);
    return rep;
  };

  if (model.rt_power > budget * (1.0 + settings.tol.power)) {
    rep.detail = "infeasible: rate floors exceed budget";
    return finish(theta_sat, SolveStatus::infeasible);
  }

  // Pinning users to their floors can free power, so the root may sit left of
  // the unconstrained theta: widen in both directions until bracketed.
  double hi = theta_unconstrained;
  while (power_at(hi) > budget && hi < theta_sat) {
    hi = std::min(2.0 * hi, theta_sat);
    ++rep.iterations;
  }
  double lo = hi;
  while (power_at(lo) <= budget) {
    if (lo < hi * 1e-300 || rep.iterations > settings.max_iter) {
      // Flat below the budget: only floored users hold power.
      rep.detail = "floors leave budget unused";
      return finish(hi, SolveStatus::feasible_on_bounds);
    }
    hi = lo;
    lo *= 0.5;
    ++rep.iterations;
  }

  for (int it = 0; it < settings.max_iter; ++it) {
    if (power_at(hi) >= budget * (1.0 - settings.tol.power)) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    ++rep.iterations;
    if (power_at(mid) > budget)
      lo = mid;
    else
      hi = mid;
  }
  return finish(hi, SolveStatus::feasible_on_bounds);
}

SolveReport solve_with_bounds(const ProblemInstance& inst, BoundsSettings settings) {
  SolveReport first = solve_unconstrained_report(inst, {}, settings.tol);
  if (first.status == SolveStatus::optimal_unconstrained) {
    first.status = SolveStatus::optimal;
    return first;
  }
  SolveReport rep = solve_bounds(inst, first.dual.theta, settings);
  rep.iterations += first.iterations;
  return rep;
}

}  // namespace zfpa
