// SPDX-License-Identifier: Apache-2.0

#include "zfpa/exact_oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "zfpa/unconstrained.hpp"
#include "zfpa/waterfill.hpp"

namespace zfpa {

double KktResiduals::max() const {
  return std::max({stationarity, dual_feasibility, power_gap, rate_gap, power_complementarity, rate_complementarity,
                   negative_delta});
}

KktResiduals kkt_residuals(const ProblemInstance& inst, const DualPoint& dual, const Allocation& alloc) {
  KktResiduals r;
  const double theta = dual.theta;
  for (std::size_t n = 0; n < inst.num_subcarriers; ++n)
    for (std::size_t k = 0; k < inst.num_users; ++k) {
      const double b = inst.gains(n, k);
      if (b <= 0.0) continue;
      const double p = alloc.powers(n, k);
      const double marginal = (inst.weights[k] + dual.deltas[k]) / ((1.0 + p) * kLn2);
      const double price = theta * b;
      if (p > 0.0)
        r.stationarity = std::max(r.stationarity, std::abs(marginal - price) / price);
      else
        r.dual_feasibility = std::max(r.dual_feasibility, std::max(0.0, marginal - price) / price);
    }

  const double used = total_power(inst, alloc);
  r.power_gap = std::max(0.0, used - inst.power_budget) / inst.power_budget;
  r.power_complementarity = std::abs(inst.power_budget - used) / inst.power_budget;

  const std::vector<double> rates = user_rates(inst, alloc);
  for (std::size_t k = 0; k < inst.num_users; ++k) {
    const double floor = inst.rate_floors[k];
    const double scale = std::max(floor, 1.0);
    const double delta = dual.deltas[k];
    r.rate_gap = std::max(r.rate_gap, std::max(0.0, floor - rates[k]) / scale);
    r.negative_delta = std::max(r.negative_delta, std::max(0.0, -delta) / inst.weights[k]);
    if (delta > 0.0)
      r.rate_complementarity = std::max(
          r.rate_complementarity, delta * std::max(0.0, rates[k] - floor) / ((inst.weights[k] + delta) * scale));
  }
  return r;
}

double min_floor_power(const ProblemInstance& inst) {
  double total = 0.0;
  for (std::size_t k : inst.rt_users) total += floor_water_level(inst, k, inst.rate_floors[k]).min_power;
  return total;
}

namespace {

double user_rate(const ProblemInstance& inst, std::size_t k, double theta, double delta) {
  double rate = 0.0;
  for (std::size_t n = 0; n < inst.num_subcarriers; ++n)
    if (inst.gains(n, k) > 0.0) rate += std::log2(1.0 + waterfill_power(corner_value(inst, n, k, delta), theta));
  return rate;
}

class CoordinateState {
 public:
  explicit CoordinateState(const ProblemInstance& inst)
      : inst_(&inst), deltas_(inst.num_users, 0.0), theta_(resolve()) {}

  double theta() const { return theta_; }
  const std::vector<double>& deltas() const { return deltas_; }

  void set(std::vector<double> deltas) {
    deltas_ = std::move(deltas);
    theta_ = resolve();
  }

  // Moves delta_k to the complementary point of user k with every other
  // delta fixed and theta re-solved for each trial value.
  void update(std::size_t k) {
    const ProblemInstance& inst = *inst_;
    const double floor = inst.rate_floors[k];
    auto excess = [&](double d) {
      deltas_[k] = d;
      theta_ = resolve();
      return user_rate(inst, k, theta_, d) - floor;
    };
    if (excess(0.0) >= 0.0) return;

    // Rate grows with delta_k; bracket the crossing, starting from the value
    // that would meet the floor if theta did not move.
    const FloorLevel fl = floor_water_level(inst, k, floor);
    double lo = 0.0;
    double hi = std::max(theta_ * kLn2 * fl.level - inst.weights[k], inst.weights[k] * 1e-12);
    while (excess(hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (excess(mid) < 0.0)
        lo = mid;
      else
        hi = mid;
    }
    excess(hi);
  }

 private:
  double resolve() const { return solve_unconstrained(*inst_, deltas_).theta_star; }

  const ProblemInstance* inst_;
  std::vector<double> deltas_;
  double theta_;
};

// Jump along the coupling direction: with the users that currently hold a
// positive delta pinned to their floor levels, the power balance is a
// one-dimensional root in theta. Returns the deltas at that root.
std::vector<double> pinned_deltas(const ProblemInstance& inst, const std::vector<double>& deltas, double theta) {
  const std::size_t K = inst.num_users;
  std::vector<double> slope(K, 0.0);
  for (std::size_t k = 0; k < K; ++k)
    if (deltas[k] > 0.0) slope[k] = kLn2 * floor_water_level(inst, k, inst.rate_floors[k]).level;

  auto at = [&](double t) {
    std::vector<double> d(K, 0.0);
    for (std::size_t k = 0; k < K; ++k)
      if (slope[k] > 0.0) d[k] = std::max(0.0, slope[k] * t - inst.weights[k]);
    return d;
  };
  auto excess = [&](double t) { return power_residual(inst, DualPoint{t, at(t)}); };

  double lo = theta;
  double hi = theta;
  while (lo > 1e-300 && excess(lo) <= 0.0) lo *= 0.5;
  // Floors that use up the budget leave no crossing; keep hi finite.
  while (hi < 1e300 && excess(hi) > 0.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (!(mid > lo && mid < hi)) break;
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return at(hi);
}

}  // namespace

SolveReport solve_exact(const ProblemInstance& inst, const OracleSettings& settings) {
  if (!(settings.tol_kkt > 0.0)) throw std::invalid_argument("tol_kkt must be positive");
  const auto start = std::chrono::steady_clock::now();
  SolveReport rep;
  const std::size_t K = inst.num_users;

  auto finish = [&](const DualPoint& dual, SolveStatus status, const char* detail) {
    rep.status = status;
    rep.detail = detail;
    rep.dual = dual;
    rep.allocation = primal_from_dual(inst, dual);
    rep.feasibility = check_feasibility(inst, rep.allocation, Tolerances{settings.tol_kkt, settings.tol_kkt});
    rep.wall_time_ns =
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
    return rep;
  };

  double floor_power = 0.0;
  try {
    floor_power = min_floor_power(inst);
  } catch (const std::domain_error&) {
    floor_power = INFINITY;
  }
  if (floor_power > inst.power_budget * (1.0 + settings.tol_kkt)) {
    const std::vector<double> zeros(K, 0.0);
    return finish(DualPoint{solve_unconstrained(inst, zeros).theta_star, zeros}, SolveStatus::infeasible,
                  "minimum floor power exceeds budget");
  }

  std::vector<std::size_t> floored;
  for (std::size_t k : inst.rt_users)
    if (inst.rate_floors[k] > 0.0) floored.push_back(k);

  auto residual_at = [&](const DualPoint& dual) { return kkt_residuals(inst, dual, primal_from_dual(inst, dual)).max(); };

  CoordinateState state(inst);
  double best = residual_at(DualPoint{state.theta(), state.deltas()});
  int since_best = 0;
  const int stall_sweeps = 25;
  for (int sweep = 0; sweep < settings.max_outer; ++sweep) {
    if (best <= settings.tol_kkt) break;
    for (std::size_t k : floored) state.update(k);
    ++rep.iterations;
    double res = residual_at(DualPoint{state.theta(), state.deltas()});
    if (res > settings.tol_kkt) {
      CoordinateState jumped = state;
      jumped.set(pinned_deltas(inst, state.deltas(), state.theta()));
      const double jumped_res = residual_at(DualPoint{jumped.theta(), jumped.deltas()});
      if (jumped_res < res) {
        state = jumped;
        res = jumped_res;
      }
    }
    if (res <= settings.tol_kkt) return finish(DualPoint{state.theta(), state.deltas()}, SolveStatus::optimal, "coordinate");
    if (res < 0.5 * best) {
      best = res;
      since_best = 0;
    } else if (++since_best >= stall_sweeps) {
      break;
    }
  }
  if (best <= settings.tol_kkt) return finish(DualPoint{state.theta(), state.deltas()}, SolveStatus::optimal, "coordinate");

  // Projected subgradient on the multipliers, warm-started where the
  // coordinate pass stalled. theta follows the power subgradient, and the
  // iterate is audited with theta re-solved exactly for its deltas.
  double theta = state.theta();
  std::vector<double> deltas = state.deltas();
  for (int t = 1; t <= settings.step_rule.max_steps; ++t) {
    const double a = settings.step_rule.initial / std::ceil(t / 10.0);
    const Allocation alloc = primal_from_dual(inst, DualPoint{theta, deltas});
    const std::vector<double> rates = user_rates(inst, alloc);
    const double used = total_power(inst, alloc);
    theta = std::max(theta * 1e-3, theta + a * theta * (used - inst.power_budget) / inst.power_budget);
    for (std::size_t k : floored) {
      const double scale = std::max(inst.rate_floors[k], 1.0);
      deltas[k] = std::max(0.0, deltas[k] + a * (inst.weights[k] + deltas[k]) * (inst.rate_floors[k] - rates[k]) / scale);
    }
    ++rep.iterations;
    if (t % 10 == 0) {
      state.set(deltas);
      theta = state.theta();
      if (residual_at(DualPoint{theta, deltas}) <= settings.tol_kkt)
        return finish(DualPoint{theta, deltas}, SolveStatus::optimal, "subgradient");
    }
  }
  state.set(deltas);
  return finish(DualPoint{state.theta(), deltas}, SolveStatus::oracle_unconverged, "iteration cap");
}

}  // namespace zfpa
