// SPDX-License-Identifier: Apache-2.0
//
// Random test cases: Rayleigh channels, greedy semi-orthogonal user selection
// per subcarrier, zero-forcing effective gains, and the two ways of drawing
// rate floors (a fraction of the real-time optimum, or fixed ratios scaled to
// the feasibility limit).

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "zfpa/model.hpp"

namespace zfpa {

using Complex = std::complex<double>;

struct ChannelSet {
  std::size_t num_users = 0;
  std::size_t num_subcarriers = 0;
  std::size_t num_antennas = 0;
  std::vector<Complex> entries;  // (n, k, m) at (n * K + k) * M + m
  std::vector<std::vector<std::size_t>> selections;  // per subcarrier, in pick order
  std::uint64_t seed = 0;

  std::span<const Complex> channel(std::size_t n, std::size_t k) const {
    return std::span<const Complex>(entries).subspan((n * num_users + k) * num_antennas, num_antennas);
  }
  std::span<Complex> channel(std::size_t n, std::size_t k) {
    return std::span<Complex>(entries).subspan((n * num_users + k) * num_antennas, num_antennas);
  }
};

enum class BoundMode { scaled, fixed_ratio };

std::string to_string(BoundMode mode);
BoundMode bound_mode_from_string(const std::string& name);

struct ScenarioSpec {
  std::size_t num_users = 20;
  std::size_t num_subcarriers = 25;
  std::size_t num_antennas = 2;
  double power_budget = 5.0;
  std::size_t num_rt = 3;
  BoundMode mode = BoundMode::scaled;
  double scale = 0.5;
  std::vector<double> ratios{1.0, 4.0, 16.0};
  double alpha = 0.3;
  std::uint64_t seed = 1;
};

/// Empty when the spec is usable.
std::vector<std::string> validate(const ScenarioSpec& spec);

/// The M channel entries of user k on subcarrier n, CN(0, 1) each, from a
/// stream keyed by (seed, n, k, attempt) only.
std::vector<Complex> draw_channel(std::uint64_t seed, std::size_t n, std::size_t k, std::size_t attempt,
                                  std::size_t num_antennas);

/// Channels for every (n, k) at attempt 0; selections left empty.
ChannelSet gen_channels(const ScenarioSpec& spec);

/// |a^H b| / (|a| |b|); zero when either vector is zero.
double normalized_correlation(std::span<const Complex> a, std::span<const Complex> b);

/// Greedy selection on subcarrier n: strongest user first, then repeatedly
/// drop candidates whose correlation with the span of the chosen channels
/// exceeds alpha and take the largest remaining projection. Ties go to the
/// lower user index.
std::vector<std::size_t> sus_select_subcarrier(const ChannelSet& channels, std::size_t n, std::size_t max_users,
                                               double alpha);
std::vector<std::vector<std::size_t>> sus_select(const ChannelSet& channels, std::size_t max_users, double alpha);

/// diag((H H^H)^-1) for the g x M matrix whose rows are the given channels.
/// `ill_conditioned` is set when cond(H H^H) exceeds 1e12.
struct SubcarrierGains {
  std::vector<double> gains;
  bool ill_conditioned = false;
};
SubcarrierGains zf_gains(const std::vector<std::span<const Complex>>& rows);

struct GainTable {
  Grid gains;                             // N x K, zero for unselected users
  std::vector<std::size_t> resample;      // ill-conditioned subcarriers
};
GainTable gains_from_selection(const ChannelSet& channels);

/// s times the rates each RT user gets when only RT users are served and no
/// floors apply. Users without a scheduled subcarrier get 0.
std::vector<double> gen_bounds_scaled(const ProblemInstance& inst, const std::vector<std::size_t>& rt_users,
                                      double scale);

struct FixedRatioBounds {
  std::vector<double> floors;      // length K
  double gamma = 0.0;              // largest feasible multiplier of the base floors
  std::vector<std::size_t> groups;  // group of each RT user, in rt_users order
};

/// RT users split by index into |ratios| groups (remainder to the last) with
/// base floors ratios[group]; gamma from 40 bisection steps on "least power
/// meeting gamma * base fits the budget". Users without a scheduled
/// subcarrier get base 0. Throws std::invalid_argument when every base is 0.
FixedRatioBounds gen_bounds_fixed_ratio(const ProblemInstance& inst, const std::vector<std::size_t>& rt_users,
                                        const std::vector<double>& ratios, double scale);

struct Scenario {
  ProblemInstance instance;
  ChannelSet channels;
  double gamma = 0.0;
  std::vector<std::size_t> groups;
  std::size_t redraws = 0;
};

/// Full pipeline. Deterministic in the spec.
Scenario generate(const ScenarioSpec& spec);

/// {"seed","alpha","mode","scale","gamma","groups"} plus the selection rule.
std::string sidecar_json(const ScenarioSpec& spec, const Scenario& scenario);

}  // namespace zfpa
