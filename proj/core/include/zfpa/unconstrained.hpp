// SPDX-License-Identifier: Apache-2.0
//
// Exact solvers for the power-only problem at a fixed delta: find the theta
// whose water-filling allocation spends exactly the budget.

#pragma once

#include <span>
#include <string>

#include "zfpa/model.hpp"

namespace zfpa {

enum class UnconstrainedMethod { binary, fixed_point, fixed_point_fallback };

std::string to_string(UnconstrainedMethod method);

struct UnconstrainedResult {
  double theta_star = 0.0;
  UnconstrainedMethod method = UnconstrainedMethod::binary;
  int iterations = 0;
  bool converged = false;
};

/// Binary search over the sorted corner points for the interval holding the
/// root, then the closed form for theta on that interval. Exact, and needs at
/// most ceil(log2(#corners)) residual evaluations. Throws std::invalid_argument
/// when no gain is positive.
UnconstrainedResult solve_binary(const ProblemInstance& inst, std::span<const double> deltas);

/// Repeated substitution theta <- theta_closed_form(active sets at theta),
/// started from the averaged-constants guess. Stops when theta repeats
/// exactly; a 2-cycle or hitting max_iter reports converged = false.
UnconstrainedResult solve_fixed_point(const ProblemInstance& inst, std::span<const double> deltas, int max_iter);

struct FallbackPolicy {
  int fp_iter_cap = 10;
};

/// Fixed point first, binary search when it has not converged within the cap.
UnconstrainedResult solve_unconstrained(const ProblemInstance& inst, std::span<const double> deltas,
                                        FallbackPolicy policy = {});

/// Solve with delta = 0 and package the recovered allocation. Status is
/// optimal_unconstrained when every floor is met, otherwise
/// unconstrained_violates_floors.
SolveReport solve_unconstrained_report(const ProblemInstance& inst, FallbackPolicy policy = {},
                                       Tolerances tol = {});

}  // namespace zfpa
