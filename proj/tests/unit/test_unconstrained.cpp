// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fixtures.hpp"
#include "reference.hpp"
#include "zfpa/unconstrained.hpp"
#include "zfpa/waterfill.hpp"

using namespace zfpa;
using zfpa::testing::random_instance;

namespace {

// Independent root of the power balance: geometric bisection on theta.
double bisect_theta(const ProblemInstance& inst, const std::vector<double>& deltas) {
  auto spent = [&](double theta) {
    double p = 0.0;
    for (std::size_t n = 0; n < inst.num_subcarriers; ++n)
      for (std::size_t k = 0; k < inst.num_users; ++k) {
        const double b = inst.gains(n, k);
        if (b > 0.0) p += std::max(0.0, (inst.weights[k] + deltas[k]) / (theta * std::numbers::ln2) - b);
      }
    return p;
  };
  double lo = 1e-9;
  double hi = 1e9;
  for (int i = 0; i < 400; ++i) {
    const double mid = std::sqrt(lo * hi);
    (spent(mid) > inst.power_budget ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

TEST_SUITE("unconstrained") {
  TEST_CASE("single variable") {
    const auto inst = zfpa::testing::make_instance(1, 1, 3.0, {1.0});
    const std::vector<double> zeros{0.0};
    const auto r = solve_binary(inst, zeros);
    // p = 1 / (theta ln2) - 1 = 3.
    CHECK(r.theta_star == doctest::Approx(1.0 / (4.0 * std::numbers::ln2)));
    const auto fp = solve_fixed_point(inst, zeros, 10);
    CHECK(fp.converged);
    CHECK(fp.theta_star == r.theta_star);
  }

  TEST_CASE("two users on one subcarrier split the budget") {
    const auto inst = zfpa::testing::two_user_instance(3.0);
    const auto rep = solve_unconstrained_report(inst);
    CHECK(rep.allocation.powers(0, 0) == doctest::Approx(1.5));
    CHECK(rep.allocation.powers(0, 1) == doctest::Approx(1.5));
    // log2(2.5) < 1.5, so the floor of user 0 is missed.
    CHECK(rep.status == SolveStatus::unconstrained_violates_floors);
  }

  TEST_CASE("binary and fixed point agree with an independent bisection") {
    int converged = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      const auto inst = random_instance(seed, {.K = 8, .N = 10, .M = 3, .budget = 0.5 + static_cast<double>(seed % 7),
                                               .random_weights = seed % 2 == 0});
      std::vector<double> deltas(inst.num_users, 0.0);
      if (seed % 3 == 0) deltas[1] = 0.7;
      const auto bin = solve_binary(inst, deltas);
      CHECK(bin.theta_star == doctest::Approx(bisect_theta(inst, deltas)).epsilon(1e-12));
      const double slack = -power_residual(inst, DualPoint{bin.theta_star, deltas});
      CHECK(std::abs(slack) <= 1e-10 * inst.power_budget);
      const auto fp = solve_fixed_point(inst, deltas, 50);
      if (fp.converged) {
        ++converged;
        CHECK(fp.theta_star == bin.theta_star);
      }
    }
    CHECK(converged >= 90);
  }

  TEST_CASE("binary search needs at most ceil(log2(#corners)) evaluations") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      const auto inst = random_instance(seed, {.K = 10, .N = 16, .M = 4});
      const std::vector<double> zeros(inst.num_users, 0.0);
      const auto count = corner_points(inst, zeros).corners.size();
      CHECK(solve_binary(inst, zeros).iterations <= static_cast<int>(std::ceil(std::log2(static_cast<double>(count))) + 1));
    }
  }

  TEST_CASE("fallback engages when the cap is too small") {
    const auto inst = random_instance(4, {.K = 10, .N = 16, .M = 4});
    const std::vector<double> zeros(inst.num_users, 0.0);
    const auto r = solve_unconstrained(inst, zeros, FallbackPolicy{1});
    CHECK(r.method == UnconstrainedMethod::fixed_point_fallback);
    CHECK(r.theta_star == solve_binary(inst, zeros).theta_star);
    const auto ok = solve_unconstrained(inst, zeros);
    CHECK(ok.theta_star == r.theta_star);
  }

  TEST_CASE("optimal at zero deltas against the reference optimum") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      const auto inst = random_instance(seed, {.K = 6, .N = 8, .M = 2, .random_weights = true});
      const auto rep = solve_unconstrained_report(inst);
      const auto ref = zfpa::testing::reference_optimum(inst);
      CHECK(objective(inst, rep.allocation) >= ref.objective * (1.0 - 1e-9));
      CHECK(rep.status == SolveStatus::optimal_unconstrained);
    }
  }

  TEST_CASE("errors") {
    auto inst = zfpa::testing::make_instance(2, 1, 1.0, {0.0, 0.0});
    const std::vector<double> zeros{0.0, 0.0};
    CHECK_THROWS_AS(solve_binary(inst, zeros), std::invalid_argument);
    const auto ok = zfpa::testing::two_user_instance();
    CHECK_THROWS_AS(solve_binary(ok, std::vector<double>{0.0}), std::invalid_argument);
  }
}
