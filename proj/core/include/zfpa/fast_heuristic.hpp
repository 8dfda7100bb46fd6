// SPDX-License-Identifier: Apache-2.0
//
// Non-iterative heuristic: step right from the unconstrained theta by a
// factor W, put the unsatisfied real-time users on their rate boundaries
// there, and recompute theta once from the closed form.

#pragma once

#include <cstddef>
#include <vector>

#include "zfpa/model.hpp"

namespace zfpa {

struct HeuristicParams {
  double epsilon = 0.2;
  double guard_margin = 0.05;  // users less than this far above their floor join T
  bool refine = false;         // replace theta2 by the exact power-balancing theta
  Tolerances tol;
};

struct HeuristicTrace {
  double theta1 = 0.0;
  std::vector<std::size_t> unsatisfied;  // T, sorted
  double W = 1.0;
  double theta_bar = 0.0;
  std::vector<double> deltas2;
  double theta2 = 0.0;
  bool succeeded = false;
  int repair_rounds = 0;
  std::vector<std::size_t> initial_unsatisfied;  // T before any repair
};

struct StepFactor {
  double W = 1.0;
  std::vector<std::size_t> unsatisfied;
};

/// T = RT users with rate below floor * (1 + guard_margin), and W the largest
/// 2^(epsilon (floor - rate)) over T. W is never below 1: a guarded user that
/// already meets its floor must not pull theta left.
StepFactor step_factor(const ProblemInstance& inst, const std::vector<double>& rates, const HeuristicParams& params);

struct HeuristicResult {
  SolveReport report;
  HeuristicTrace trace;
};

/// Status optimal when the unconstrained solution meets every floor,
/// heuristic_feasible or heuristic_infeasible otherwise.
HeuristicResult run_heuristic(const ProblemInstance& inst, const HeuristicParams& params = {});

enum class HeuristicFailure { none, undershoot_theta_bar, stale_active_sets, collateral_rt_user };

std::string to_string(HeuristicFailure failure);

/// Deficits among the users originally in T mean theta_bar was not far enough
/// right; deficits elsewhere are collateral. With every floor met, a power
/// total off the budget by more than the tolerance (either side) comes from
/// using the sets at theta_bar in place of those at theta2.
HeuristicFailure classify_failure(const ProblemInstance& inst, const HeuristicTrace& trace, const SolveReport& report,
                                  Tolerances tol = {});

}  // namespace zfpa
