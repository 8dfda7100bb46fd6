// SPDX-License-Identifier: Apache-2.0
//
// Hand-built instances and a small random instance generator for property
// tests. The generator draws gains directly, independent of the scenario code.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "zfpa/model.hpp"

namespace zfpa::testing {

inline ProblemInstance make_instance(std::size_t K, std::size_t N, double budget, std::vector<double> gains,
                                     std::vector<double> floors = {}, std::vector<std::size_t> rt = {}) {
  ProblemInstance inst;
  inst.num_users = K;
  inst.num_subcarriers = N;
  inst.num_antennas = K;
  inst.power_budget = budget;
  inst.weights.assign(K, 1.0);
  inst.gains = Grid(N, K);
  std::copy(gains.begin(), gains.end(), inst.gains.data().begin());
  inst.rate_floors = floors.empty() ? std::vector<double>(K, 0.0) : std::move(floors);
  inst.rt_users = std::move(rt);
  return inst;
}

// Two users sharing one subcarrier, unit gains and weights; user 0 needs 1.5
// bits. Used across modules because every quantity has a closed form.
inline ProblemInstance two_user_instance(double budget = 3.0) {
  return make_instance(2, 1, budget, {1.0, 1.0}, {1.5, 0.0}, {0});
}

struct RandomSpec {
  std::size_t K = 6;
  std::size_t N = 8;
  std::size_t M = 2;
  double budget = 5.0;
  std::size_t rt = 0;
  double floor_scale = 0.0;  // floors drawn uniform in [0, floor_scale]
  bool random_weights = false;
};

// Each subcarrier schedules a random subset of at most M users with
// log-uniform gains in [0.05, 20].
inline ProblemInstance random_instance(std::uint64_t seed, const RandomSpec& s) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ProblemInstance inst;
  inst.num_users = s.K;
  inst.num_subcarriers = s.N;
  inst.num_antennas = s.M;
  inst.power_budget = s.budget;
  inst.weights.assign(s.K, 1.0);
  if (s.random_weights)
    for (auto& c : inst.weights) c = 0.5 + 1.5 * unit(rng);
  inst.gains = Grid(s.N, s.K);
  std::vector<std::size_t> users(s.K);
  for (std::size_t k = 0; k < s.K; ++k) users[k] = k;
  for (std::size_t n = 0; n < s.N; ++n) {
    std::shuffle(users.begin(), users.end(), rng);
    const std::size_t g = 1 + static_cast<std::size_t>(unit(rng) * static_cast<double>(std::min(s.M, s.K)));
    for (std::size_t j = 0; j < std::min(g, s.K); ++j)
      inst.gains(n, users[j]) = 0.05 * std::pow(400.0, unit(rng));
  }
  inst.rate_floors.assign(s.K, 0.0);
  for (std::size_t k = 0; k < s.rt; ++k) {
    inst.rt_users.push_back(k);
    bool scheduled = false;
    for (std::size_t n = 0; n < s.N; ++n) scheduled = scheduled || inst.gains(n, k) > 0.0;
    if (scheduled) inst.rate_floors[k] = s.floor_scale * unit(rng);
  }
  return inst;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace zfpa::testing
