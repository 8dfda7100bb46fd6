// SPDX-License-Identifier: Apache-2.0
//
// Problem data for downlink power allocation over a zero-forcing OFDMA-SDMA
// link: per-(subcarrier, user) effective gains, scheduling weights, a total
// power budget and minimum-rate floors for the real-time users.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace zfpa {

/// Dense row-major N x K table indexed by (subcarrier, user).
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  double operator()(std::size_t n, std::size_t k) const { return data_[n * cols_ + k]; }
  double& operator()(std::size_t n, std::size_t k) { return data_[n * cols_ + k]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  std::span<const double> row(std::size_t n) const {
    return std::span<const double>(data_).subspan(n * cols_, cols_);
  }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// All fixed data of one power allocation problem.
///
/// A zero gain encodes "user k is not scheduled on subcarrier n"; there is no
/// separate selection mask. Rates are in bits per OFDM symbol.
struct ProblemInstance {
  std::size_t num_users = 0;
  std::size_t num_subcarriers = 0;
  std::size_t num_antennas = 0;
  double power_budget = 0.0;
  std::vector<double> weights;      // c_k, length K
  Grid gains;                       // beta(n, k), N x K
  std::vector<double> rate_floors;  // length K, zero outside rt_users
  std::vector<std::size_t> rt_users;  // sorted, 0-based

  bool is_rt(std::size_t k) const;
  /// Number of users with a positive gain on subcarrier n.
  std::size_t selected_count(std::size_t n) const;
  /// True when at least one gain is positive.
  bool has_any_gain() const;
};

/// Multipliers (theta, delta_k) that parameterize every candidate solution.
struct DualPoint {
  double theta = 0.0;
  std::vector<double> deltas;

  static DualPoint with_zero_deltas(double theta, std::size_t num_users) {
    return {theta, std::vector<double>(num_users, 0.0)};
  }
};

/// Primal powers and the per-entry rates log2(1 + p) they imply.
struct Allocation {
  Grid powers;
  Grid rates;
};

/// Builds an allocation from powers, filling rates from the capacity formula.
Allocation make_allocation(Grid powers);

struct Violation {
  std::string code;
  std::string message;
  std::vector<std::size_t> indices;
};

/// Every invariant violation of the instance; empty means well-formed.
std::vector<Violation> validate(const ProblemInstance& instance);

/// Sum over (n, k) of beta(n, k) * p(n, k).
double total_power(const ProblemInstance& instance, const Allocation& alloc);

/// Per-user rate: sum over subcarriers of log2(1 + p(n, k)).
std::vector<double> user_rates(const ProblemInstance& instance, const Allocation& alloc);

/// Weighted sum rate sum_k c_k * rate_k.
double objective(const ProblemInstance& instance, const Allocation& alloc);

struct Tolerances {
  double power = 1e-8;  // relative to the power budget
  double rate = 1e-8;   // relative to max(floor, 1)
};

struct FeasibilityReport {
  double power_used = 0.0;
  double power_slack = 0.0;          // budget - power_used
  std::vector<double> rate_deficits;  // floor - rate, clamped at zero
  std::vector<std::size_t> violated_users;
  bool power_ok = true;
  bool feasible = true;

  double max_rate_deficit() const;
};

FeasibilityReport check_feasibility(const ProblemInstance& instance, const Allocation& alloc,
                                    Tolerances tol = {});

enum class SolveStatus {
  optimal,
  optimal_unconstrained,
  unconstrained_violates_floors,
  feasible_on_bounds,
  heuristic_feasible,
  heuristic_infeasible,
  infeasible,
  oracle_unconverged,
};

std::string to_string(SolveStatus status);

/// Outcome of any solver: the dual point, the allocation it recovers, and
/// bookkeeping. Infeasibility is reported through `status`, never thrown.
struct SolveReport {
  SolveStatus status = SolveStatus::optimal;
  DualPoint dual;
  Allocation allocation;
  FeasibilityReport feasibility;
  int iterations = 0;
  std::int64_t wall_time_ns = 0;
  std::string detail;
};

}  // namespace zfpa
