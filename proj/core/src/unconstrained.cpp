// SPDX-License-Identifier: Apache-2.0

#include "zfpa/unconstrained.hpp"

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "zfpa/waterfill.hpp"

namespace zfpa {

std::string to_string(UnconstrainedMethod method) {
  switch (method) {
    case UnconstrainedMethod::binary: return "binary";
    case UnconstrainedMethod::fixed_point: return "fixed_point";
    case UnconstrainedMethod::fixed_point_fallback: return "fixed_point_fallback";
  }
  return "unknown";
}

namespace {

void require_solvable(const ProblemInstance& inst, std::span<const double> deltas) {
  if (deltas.size() != inst.num_users) throw std::invalid_argument("deltas must have length K");
  if (!inst.has_any_gain()) throw std::invalid_argument("instance has no positive gain");
}

}  // namespace

UnconstrainedResult solve_binary(const ProblemInstance& inst, std::span<const double> deltas) {
  require_solvable(inst, deltas);
  const CornerList list = corner_points(inst, deltas);
  const auto& corners = list.corners;
  const auto count = static_cast<std::ptrdiff_t>(corners.size());

  UnconstrainedResult out;
  out.method = UnconstrainedMethod::binary;
  out.converged = true;
  if (inst.power_budget <= 0.0) {
    out.theta_star = corners.back().theta;
    return out;
  }

  // Invariant: residual(lo) > 0 >= residual(hi). Index -1 stands for theta -> 0+
  // (infinite power); the largest corner has every allocation at zero.
  DualPoint probe{0.0, std::vector<double>(deltas.begin(), deltas.end())};
  std::ptrdiff_t lo = -1;
  std::ptrdiff_t hi = count - 1;
  while (hi - lo > 1) {
    const std::ptrdiff_t mid = lo + (hi - lo) / 2;
    probe.theta = corners[static_cast<std::size_t>(mid)].theta;
    ++out.iterations;
    if (power_residual(inst, probe) > 0.0)
      lo = mid;
    else
      hi = mid;
  }

  // On (theta_lo, theta_hi) the active entries are exactly the corners from hi on.
  std::vector<char> member(inst.num_subcarriers * inst.num_users, 0);
  for (std::ptrdiff_t i = hi; i < count; ++i) {
    const Corner& c = corners[static_cast<std::size_t>(i)];
    member[c.subcarrier * inst.num_users + c.user] = 1;
  }
  const ActiveSets active =
      collect_active(inst, [&](std::size_t n, std::size_t k) { return member[n * inst.num_users + k] != 0; });
  out.theta_star = theta_closed_form(inst, deltas, active);
  return out;
}

UnconstrainedResult solve_fixed_point(const ProblemInstance& inst, std::span<const double> deltas, int max_iter) {
  require_solvable(inst, deltas);

  double weight_sum = 0.0;
  double gain_sum = 0.0;
  double max_corner = 0.0;
  std::size_t selected = 0;
  for (std::size_t n = 0; n < inst.num_subcarriers; ++n)
    for (std::size_t k = 0; k < inst.num_users; ++k) {
      const double b = inst.gains(n, k);
      if (b <= 0.0) continue;
      weight_sum += inst.weights[k] + deltas[k];
      gain_sum += b;
      max_corner = std::max(max_corner, corner_value(inst, n, k, deltas[k]));
      ++selected;
    }
  const double count = static_cast<double>(selected);
  // Zero power with averaged weights and gains.
  double theta = (weight_sum / count) / ((gain_sum / count) * kLn2);

  UnconstrainedResult out;
  out.method = UnconstrainedMethod::fixed_point;
  double previous = -1.0;
  for (int it = 0; it < max_iter; ++it) {
    // Compact membership theta <= corner keeps the first set nonempty when
    // the guess lands on a corner.
    ActiveSets active = collect_active(
        inst, [&](std::size_t n, std::size_t k) { return theta <= corner_value(inst, n, k, deltas[k]); });
    if (active.empty()) {
      theta = max_corner;
      active = collect_active(
          inst, [&](std::size_t n, std::size_t k) { return theta <= corner_value(inst, n, k, deltas[k]); });
    }
    const double next = theta_closed_form(inst, deltas, active);
    ++out.iterations;
    if (next == theta) {
      out.converged = true;
      break;
    }
    if (next == previous) break;  // 2-cycle
    previous = theta;
    theta = next;
  }
  out.theta_star = theta;
  return out;
}

UnconstrainedResult solve_unconstrained(const ProblemInstance& inst, std::span<const double> deltas,
                                        FallbackPolicy policy) {
  UnconstrainedResult fp = solve_fixed_point(inst, deltas, policy.fp_iter_cap);
  if (fp.converged) return fp;
  UnconstrainedResult bin = solve_binary(inst, deltas);
  bin.method = UnconstrainedMethod::fixed_point_fallback;
  bin.iterations += fp.iterations;
  return bin;
}

SolveReport solve_unconstrained_report(const ProblemInstance& inst, FallbackPolicy policy, Tolerances tol) {
  SolveReport rep;
  const std::vector<double> zeros(inst.num_users, 0.0);
  const UnconstrainedResult res = solve_unconstrained(inst, zeros, policy);
  rep.dual = DualPoint::with_zero_deltas(res.theta_star, inst.num_users);
  rep.allocation = primal_from_dual(inst, rep.dual);
  rep.feasibility = check_feasibility(inst, rep.allocation, tol);
  rep.iterations = res.iterations;
  rep.status = rep.feasibility.violated_users.empty() ? SolveStatus::optimal_unconstrained
                                                      : SolveStatus::unconstrained_violates_floors;
  rep.detail = to_string(res.method);
  return rep;
}

}  // namespace zfpa
