// SPDX-License-Identifier: Apache-2.0

#include "zfpa/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace zfpa {

bool ProblemInstance::is_rt(std::size_t k) const {
  return std::binary_search(rt_users.begin(), rt_users.end(), k);
}

std::size_t ProblemInstance::selected_count(std::size_t n) const {
  const auto row = gains.row(n);
  return static_cast<std::size_t>(std::count_if(row.begin(), row.end(), [](double b) { return b > 0.0; }));
}

bool ProblemInstance::has_any_gain() const {
  const auto all = gains.data();
  return std::any_of(all.begin(), all.end(), [](double b) { return b > 0.0; });
}

Allocation make_allocation(Grid powers) {
  Grid rates(powers.rows(), powers.cols());
  const auto p = powers.data();
  auto r = rates.data();
  for (std::size_t i = 0; i < p.size(); ++i) r[i] = std::log2(1.0 + p[i]);
  return {std::move(powers), std::move(rates)};
}

std::vector<Violation> validate(const ProblemInstance& inst) {
  std::vector<Violation> out;
  auto add = [&out](std::string code, std::string msg, std::vector<std::size_t> idx = {}) {
    out.push_back({std::move(code), std::move(msg), std::move(idx)});
  };

  const std::size_t K = inst.num_users;
  const std::size_t N = inst.num_subcarriers;
  if (K == 0) add("num_users", "K must be positive");
  if (N == 0) add("num_subcarriers", "N must be positive");
  if (inst.num_antennas == 0) add("num_antennas", "M must be positive");
  if (!(std::isfinite(inst.power_budget) && inst.power_budget > 0.0))
    add("power_budget", "power budget must be finite and positive");

  if (inst.weights.size() != K) {
    add("dimension", "weights must have length K");
  } else {
    for (std::size_t k = 0; k < K; ++k)
      if (!(std::isfinite(inst.weights[k]) && inst.weights[k] > 0.0))
        add("weight", "weights must be finite and strictly positive", {k});
  }

  if (inst.rate_floors.size() != K) add("dimension", "rate floors must have length K");
  if (inst.gains.rows() != N || inst.gains.cols() != K) {
    add("dimension", "gains must be N x K");
    return out;
  }

  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t k = 0; k < K; ++k) {
      const double b = inst.gains(n, k);
      if (!std::isfinite(b) || b < 0.0) add("gain", "gains must be finite and nonnegative", {n, k});
    }
    if (inst.selected_count(n) > inst.num_antennas)
      add("g_n exceeds M", "more users selected than antennas on a subcarrier", {n});
  }

  for (std::size_t i = 0; i < inst.rt_users.size(); ++i) {
    if (inst.rt_users[i] >= K) add("rt_index", "real-time user index out of range", {inst.rt_users[i]});
    if (i > 0 && inst.rt_users[i] <= inst.rt_users[i - 1])
      add("rt_order", "real-time users must be sorted and distinct", {inst.rt_users[i]});
  }

  if (inst.rate_floors.size() == K) {
    for (std::size_t k = 0; k < K; ++k) {
      const double d = inst.rate_floors[k];
      if (!std::isfinite(d) || d < 0.0) add("floor", "rate floors must be finite and nonnegative", {k});
      else if (d > 0.0 && !inst.is_rt(k)) add("floor on non-RT user", "positive floor on a best-effort user", {k});
    }
  }
  return out;
}

namespace {

void require_dims(const ProblemInstance& inst, const Allocation& alloc) {
  if (alloc.powers.rows() != inst.num_subcarriers || alloc.powers.cols() != inst.num_users ||
      alloc.rates.rows() != inst.num_subcarriers || alloc.rates.cols() != inst.num_users)
    throw std::invalid_argument("allocation dimensions do not match the instance");
}

}  // namespace

double total_power(const ProblemInstance& inst, const Allocation& alloc) {
  require_dims(inst, alloc);
  double sum = 0.0;
  for (std::size_t n = 0; n < inst.num_subcarriers; ++n)
    for (std::size_t k = 0; k < inst.num_users; ++k) sum += inst.gains(n, k) * alloc.powers(n, k);
  return sum;
}

std::vector<double> user_rates(const ProblemInstance& inst, const Allocation& alloc) {
  require_dims(inst, alloc);
  std::vector<double> rates(inst.num_users, 0.0);
  for (std::size_t n = 0; n < inst.num_subcarriers; ++n)
    for (std::size_t k = 0; k < inst.num_users; ++k) rates[k] += alloc.rates(n, k);
  return rates;
}

double objective(const ProblemInstance& inst, const Allocation& alloc) {
  const auto rates = user_rates(inst, alloc);
  double sum = 0.0;
  for (std::size_t k = 0; k < inst.num_users; ++k) sum += inst.weights[k] * rates[k];
  return sum;
}

double FeasibilityReport::max_rate_deficit() const {
  return rate_deficits.empty() ? 0.0 : *std::max_element(rate_deficits.begin(), rate_deficits.end());
}

FeasibilityReport check_feasibility(const ProblemInstance& inst, const Allocation& alloc, Tolerances tol) {
  FeasibilityReport rep;
  rep.power_used = total_power(inst, alloc);
  rep.power_slack = inst.power_budget - rep.power_used;
  rep.power_ok = rep.power_slack >= -tol.power * inst.power_budget;

  const auto rates = user_rates(inst, alloc);
  rep.rate_deficits.resize(inst.num_users, 0.0);
  for (std::size_t k = 0; k < inst.num_users; ++k) {
    const double floor = inst.rate_floors[k];
    rep.rate_deficits[k] = std::max(0.0, floor - rates[k]);
    if (rep.rate_deficits[k] > tol.rate * std::max(floor, 1.0)) rep.violated_users.push_back(k);
  }
  rep.feasible = rep.power_ok && rep.violated_users.empty();
  return rep;
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::optimal_unconstrained: return "optimal_unconstrained";
    case SolveStatus::unconstrained_violates_floors: return "unconstrained_violates_floors";
    case SolveStatus::feasible_on_bounds: return "feasible_on_bounds";
    case SolveStatus::heuristic_feasible: return "heuristic_feasible";
    case SolveStatus::heuristic_infeasible: return "heuristic_infeasible";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::oracle_unconverged: return "oracle_unconverged";
  }
  return "unknown";
}

}  // namespace zfpa
