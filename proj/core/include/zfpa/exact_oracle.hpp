// SPDX-License-Identifier: Apache-2.0
//
// Reference solver for the full problem with rate floors. Slow by design and
// audited through its own KKT residuals.

#pragma once

#include "zfpa/model.hpp"

namespace zfpa {

struct StepRule {
  double initial = 0.5;  // a in a / ceil(t / 10), relative to the iterate
  int max_steps = 20000;
};

struct OracleSettings {
  double tol_kkt = 1e-8;
  int max_outer = 10000;
  StepRule step_rule;
};

struct KktResiduals {
  double stationarity = 0.0;       // relative, over entries with positive power
  double dual_feasibility = 0.0;   // entries at zero power that would want more
  double power_gap = 0.0;          // (used - budget)^+ / budget
  double rate_gap = 0.0;           // max_k (floor - rate)^+ / max(floor, 1)
  double power_complementarity = 0.0;  // |budget - used| / budget, theta > 0 always
  double rate_complementarity = 0.0;   // max_k delta_k (rate - floor)^+ / ((c_k + delta_k) max(floor, 1))
  double negative_delta = 0.0;

  double max() const;
};

KktResiduals kkt_residuals(const ProblemInstance& inst, const DualPoint& dual, const Allocation& alloc);

/// Sum over RT users of the least power meeting each floor on its own
/// subcarriers. The floors are jointly feasible exactly when this is within
/// the budget. Throws std::domain_error for a floored user with no subcarrier.
double min_floor_power(const ProblemInstance& inst);

/// Status optimal, infeasible, or oracle_unconverged; detail names the method
/// that finished ("coordinate", "subgradient").
SolveReport solve_exact(const ProblemInstance& inst, const OracleSettings& settings = {});

}  // namespace zfpa
