// SPDX-License-Identifier: Apache-2.0

#include "zfpa/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace zfpa {

namespace {

void require_theta(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw std::invalid_argument("theta must be finite and positive");
}

void require_deltas(const ProblemInstance& inst, std::span<const double> deltas) {
  if (deltas.size() != inst.num_users) throw std::invalid_argument("deltas must have length K");
}

}  // namespace

void ActiveSets::add(std::size_t k, std::size_t n, double beta) {
  sets[k].push_back(n);
  ++sizes[k];
  gain_sums[k] += beta;
  log_gain_sums[k] += std::log2(beta);
}

std::size_t ActiveSets::total() const { return std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}); }

Allocation primal_from_dual(const ProblemInstance& inst, const DualPoint& dual) {
  require_theta(dual.theta);
  require_deltas(inst, dual.deltas);
  Grid powers(inst.num_subcarriers, inst.num_users);
  for (std::size_t n = 0; n < inst.num_subcarriers; ++n)
    for (std::size_t k = 0; k < inst.num_users; ++k)
      if (inst.gains(n, k) > 0.0)
        powers(n, k) = waterfill_power(corner_value(inst, n, k, dual.deltas[k]), dual.theta);
  return make_allocation(std::move(powers));
}

ActiveSets active_sets(const ProblemInstance& inst, const DualPoint& dual) {
  require_theta(dual.theta);
  require_deltas(inst, dual.deltas);
  return collect_active(inst, [&](std::size_t n, std::size_t k) {
    return waterfill_power(corner_value(inst, n, k, dual.deltas[k]), dual.theta) > 0.0;
  });
}

CornerList corner_points(const ProblemInstance& inst, std::span<const double> deltas) {
  require_deltas(inst, deltas);
  CornerList out;
  for (std::size_t k = 0; k < inst.num_users; ++k)
    for (std::size_t n = 0; n < inst.num_subcarriers; ++n)
      if (inst.gains(n, k) > 0.0) out.corners.push_back({corner_value(inst, n, k, deltas[k]), k, n});
  std::sort(out.corners.begin(), out.corners.end(), [](const Corner& a, const Corner& b) {
    if (a.theta != b.theta) return a.theta < b.theta;
    if (a.user != b.user) return a.user < b.user;
    return a.subcarrier < b.subcarrier;
  });
  return out;
}

double power_residual(const ProblemInstance& inst, const DualPoint& dual) {
  require_theta(dual.theta);
  require_deltas(inst, dual.deltas);
  double used = 0.0;
  for (std::size_t n = 0; n < inst.num_subcarriers; ++n)
    for (std::size_t k = 0; k < inst.num_users; ++k) {
      const double b = inst.gains(n, k);
      if (b > 0.0) used += b * waterfill_power(corner_value(inst, n, k, dual.deltas[k]), dual.theta);
    }
  return used - inst.power_budget;
}

double theta_closed_form(const ProblemInstance& inst, std::span<const double> deltas, const ActiveSets& active) {
  require_deltas(inst, deltas);
  double numerator = 0.0;
  double active_gain = 0.0;
  for (std::size_t k = 0; k < inst.num_users; ++k) {
    if (active.sizes[k] == 0) continue;
    numerator += static_cast<double>(active.sizes[k]) * (inst.weights[k] + deltas[k]);
    active_gain += active.gain_sums[k];
  }
  if (numerator <= 0.0) throw std::invalid_argument("theta_closed_form: active sets are empty");
  return numerator / ((inst.power_budget + active_gain) * kLn2);
}

double delta_from_rate_floor(const ProblemInstance& inst, std::size_t k, double theta, const ActiveSets& active,
                             double floor) {
  require_theta(theta);
  const std::size_t sigma = active.sizes.at(k);
  if (sigma == 0) {
    if (floor > 0.0) throw std::domain_error("rate floor unreachable: user has no active subcarrier");
    return 0.0;
  }
  // (c_k + delta_k) / (theta ln 2) must equal (2^floor * prod beta)^(1/sigma).
  const double level = std::exp2((floor + active.log_gain_sums[k]) / static_cast<double>(sigma));
  return std::max(0.0, theta * kLn2 * level - inst.weights[k]);
}

double delta_from_rate_floor(const ProblemInstance& inst, std::size_t k, double theta, const ActiveSets& active) {
  return delta_from_rate_floor(inst, k, theta, active, inst.rate_floors.at(k));
}

FloorLevel floor_water_level(const ProblemInstance& inst, std::size_t k, double floor) {
  FloorLevel out;
  if (floor <= 0.0) return out;

  std::vector<std::pair<double, std::size_t>> entries;
  for (std::size_t n = 0; n < inst.num_subcarriers; ++n)
    if (inst.gains(n, k) > 0.0) entries.emplace_back(inst.gains(n, k), n);
  if (entries.empty()) throw std::domain_error("rate floor unreachable: user has no scheduled subcarrier");
  std::sort(entries.begin(), entries.end());

  // The optimal set is a prefix of the gains in ascending order: grow it
  // until the level no longer exceeds the next gain.
  double log_sum = 0.0;
  std::size_t sigma = 0;
  double level = 0.0;
  while (sigma < entries.size()) {
    log_sum += std::log2(entries[sigma].first);
    ++sigma;
    level = std::exp2((floor + log_sum) / static_cast<double>(sigma));
    if (sigma == entries.size() || level <= entries[sigma].first) break;
  }

  out.level = level;
  for (std::size_t i = 0; i < sigma; ++i) {
    out.set.push_back(entries[i].second);
    out.min_power += level - entries[i].first;
  }
  std::sort(out.set.begin(), out.set.end());
  return out;
}

}  // namespace zfpa
