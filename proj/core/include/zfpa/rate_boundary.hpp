// SPDX-License-Identifier: Apache-2.0
//
// Feasible solutions on the rate boundaries. With the active set of a
// real-time user held fixed, the locus where its rate equals the floor is a
// line in the (theta, delta_k) plane,
//
//   delta_k(theta) = m_k theta - c_k,   m_k = ln 2 (2^floor prod beta)^(1/sigma),
//
// and the user's powers along it do not depend on theta. Placing every
// floored user on its line leaves a one-dimensional root find P(theta) = budget.

#pragma once

#include <cstddef>
#include <vector>

#include "zfpa/model.hpp"

namespace zfpa {

struct BoundaryModel {
  std::vector<double> slopes;                         // m_k; zero for users without a floor
  std::vector<double> thresholds;                     // c_k / m_k; +inf when the slope is zero
  std::vector<std::vector<std::size_t>> frozen_sets;  // active set on the boundary
  double rt_power = 0.0;                              // floored users' power, theta-invariant

  /// delta_k = m_k theta - c_k for floored users, 0 otherwise. Below a user's
  /// threshold the value is negative: the user is pinned at its floor rather
  /// than left at the larger rate it would otherwise take.
  std::vector<double> deltas_at(const ProblemInstance& inst, double theta) const;
};

/// Slopes and frozen sets for every user with a positive floor. The set of a
/// user at (theta_ref, 0) is grown or trimmed to the one on which its floor is
/// met exactly; that set depends only on the user's gains, so theta_ref only
/// has to be a valid multiplier. Throws std::domain_error when a floored user
/// has no scheduled subcarrier.
BoundaryModel build_boundary(const ProblemInstance& inst, double theta_ref);

/// Total power of the allocation recovered at (theta, deltas_at(theta)).
double power_on_boundary(const ProblemInstance& inst, const BoundaryModel& model, double theta);

/// Per-user rates of the allocation recovered at (theta, deltas_at(theta)).
std::vector<double> rate_on_boundary(const ProblemInstance& inst, const BoundaryModel& model, double theta);

struct BoundsSettings {
  Tolerances tol;
  int max_iter = 200;
};

/// Root of P(theta) = budget with every positive floor met with equality.
/// Status feasible_on_bounds, or infeasible when the floors alone need more
/// than the budget.
SolveReport solve_bounds(const ProblemInstance& inst, BoundsSettings settings = {});
SolveReport solve_bounds(const ProblemInstance& inst, double theta_unconstrained, BoundsSettings settings = {});

/// The two-step procedure: the unconstrained optimum when it already meets
/// every floor (status optimal), solve_bounds otherwise.
SolveReport solve_with_bounds(const ProblemInstance& inst, BoundsSettings settings = {});

}  // namespace zfpa
