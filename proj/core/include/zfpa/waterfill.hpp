// SPDX-License-Identifier: Apache-2.0
//
// Primal recovery from dual variables. For a dual point (theta, delta) the
// optimal power on every scheduled entry is the multi-level water-filling
//
//   p(n, k) = [ (c_k + delta_k) / (theta * beta(n, k) * ln 2) - 1 ]^+
//
// and the helpers below expose the pieces every solver is built from: the
// corner points where an entry switches on, the active sets, the power
// residual, and the closed forms for theta and delta_k under fixed sets.

#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "zfpa/model.hpp"

namespace zfpa {

inline constexpr double kLn2 = std::numbers::ln2;

/// theta at which entry (n, k) switches on: (c_k + delta) / (beta(n, k) ln 2).
/// Requires beta(n, k) > 0.
inline double corner_value(const ProblemInstance& inst, std::size_t n, std::size_t k, double delta) {
  return (inst.weights[k] + delta) / (inst.gains(n, k) * kLn2);
}

/// Water-filling power for an entry whose corner is `corner`. Exactly zero
/// when theta >= corner.
inline double waterfill_power(double corner, double theta) {
  const double p = corner / theta - 1.0;
  return p > 0.0 ? p : 0.0;
}

/// Closed-form primal allocation at a dual point. Throws on theta <= 0.
Allocation primal_from_dual(const ProblemInstance& inst, const DualPoint& dual);

/// Per-user sets of subcarriers that carry strictly positive power.
struct ActiveSets {
  std::vector<std::vector<std::size_t>> sets;
  std::vector<std::size_t> sizes;
  std::vector<double> gain_sums;      // sum of beta over the set
  std::vector<double> log_gain_sums;  // sum of log2(beta) over the set

  explicit ActiveSets(std::size_t num_users = 0)
      : sets(num_users), sizes(num_users, 0), gain_sums(num_users, 0.0), log_gain_sums(num_users, 0.0) {}

  void add(std::size_t k, std::size_t n, double beta);
  std::size_t total() const;
  bool empty() const { return total() == 0; }
  bool operator==(const ActiveSets&) const = default;
};

/// Builds active sets from a membership predicate `member(n, k)` evaluated on
/// scheduled entries in (k, n) order, so every construction route accumulates
/// the sums in the same order.
template <class Member>
ActiveSets collect_active(const ProblemInstance& inst, Member&& member) {
  ActiveSets out(inst.num_users);
  for (std::size_t k = 0; k < inst.num_users; ++k)
    for (std::size_t n = 0; n < inst.num_subcarriers; ++n) {
      const double b = inst.gains(n, k);
      if (b > 0.0 && member(n, k)) out.add(k, n, b);
    }
  return out;
}

/// Entries with positive water-filling power at the dual point. An entry whose
/// corner equals theta has zero power and is excluded.
ActiveSets active_sets(const ProblemInstance& inst, const DualPoint& dual);

struct Corner {
  double theta;
  std::size_t user;
  std::size_t subcarrier;
};

struct CornerList {
  std::vector<Corner> corners;  // ascending in theta, ties by (user, subcarrier)
};

CornerList corner_points(const ProblemInstance& inst, std::span<const double> deltas);

/// sum_{n,k} beta(n,k) p(n,k) - budget. Continuous and nonincreasing in theta.
double power_residual(const ProblemInstance& inst, const DualPoint& dual);

/// The theta that spends exactly the budget when the active sets are held
/// fixed:  sum_k sigma_k (c_k + delta_k) / ((budget + sum of active beta) ln 2).
/// Throws when the sets are empty.
double theta_closed_form(const ProblemInstance& inst, std::span<const double> deltas, const ActiveSets& active);

/// Smallest delta_k giving user k exactly `floor` bits over its set in
/// `active` at the given theta. Computed in log space. Returns 0 for a zero
/// floor with an empty set; throws std::domain_error for a positive floor
/// with an empty set.
double delta_from_rate_floor(const ProblemInstance& inst, std::size_t k, double theta, const ActiveSets& active,
                             double floor);
double delta_from_rate_floor(const ProblemInstance& inst, std::size_t k, double theta, const ActiveSets& active);

/// Single-user water-filling that meets `floor` with the least power:
/// p(n) = [level / beta(n, k) - 1]^+ with sum_n log2(1 + p(n)) = floor.
/// The level (c_k + delta_k) / (theta ln 2) is what a rate boundary pins.
struct FloorLevel {
  std::vector<std::size_t> set;  // subcarriers with positive power, ascending
  double level = 0.0;
  double min_power = 0.0;
};

/// Throws std::domain_error when the floor is positive and the user has no
/// scheduled subcarrier.
FloorLevel floor_water_level(const ProblemInstance& inst, std::size_t k, double floor);

}  // namespace zfpa
