// SPDX-License-Identifier: Apache-2.0

#include "zfpa/scenario.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "zfpa/exact_oracle.hpp"
#include "zfpa/unconstrained.hpp"
#include "zfpa/waterfill.hpp"

namespace zfpa {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr double kMaxCondition = 1e12;
constexpr std::size_t kMaxRedraws = 100;

}  // namespace

std::string to_string(BoundMode mode) { return mode == BoundMode::scaled ? "scaled" : "fixed_ratio"; }

BoundMode bound_mode_from_string(const std::string& name) {
  if (name == "scaled") return BoundMode::scaled;
  if (name == "fixed_ratio") return BoundMode::fixed_ratio;
  throw std::invalid_argument("unknown bound mode: " + name);
}

std::vector<std::string> validate(const ScenarioSpec& spec) {
  std::vector<std::string> out;
  if (spec.num_users == 0 || spec.num_subcarriers == 0 || spec.num_antennas == 0)
    out.emplace_back("K, N and M must be positive");
  if (!(spec.power_budget > 0.0)) out.emplace_back("power budget must be positive");
  if (spec.num_rt > spec.num_users) out.emplace_back("R exceeds K");
  if (!(spec.scale >= 0.0 && spec.scale <= 1.0)) out.emplace_back("scale outside [0, 1]");
  if (!(spec.alpha > 0.0 && spec.alpha <= 1.0)) out.emplace_back("alpha outside (0, 1]");
  if (spec.ratios.empty()) out.emplace_back("ratios empty");
  for (double r : spec.ratios)
    if (!(r >= 0.0)) out.emplace_back("ratios must be nonnegative");
  return out;
}

std::vector<Complex> draw_channel(std::uint64_t seed, std::size_t n, std::size_t k, std::size_t attempt,
                                  std::size_t num_antennas) {
  std::uint64_t key = splitmix64(seed);
  key = splitmix64(key ^ static_cast<std::uint64_t>(n));
  key = splitmix64(key ^ static_cast<std::uint64_t>(k));
  key = splitmix64(key ^ static_cast<std::uint64_t>(attempt));
  std::mt19937_64 rng(key);
  std::normal_distribution<double> half(0.0, std::sqrt(0.5));
  std::vector<Complex> h(num_antennas);
  for (auto& z : h) {
    const double re = half(rng);
    const double im = half(rng);
    z = Complex(re, im);
  }
  return h;
}

ChannelSet gen_channels(const ScenarioSpec& spec) {
  ChannelSet ch;
  ch.num_users = spec.num_users;
  ch.num_subcarriers = spec.num_subcarriers;
  ch.num_antennas = spec.num_antennas;
  ch.seed = spec.seed;
  ch.entries.resize(spec.num_users * spec.num_subcarriers * spec.num_antennas);
  for (std::size_t n = 0; n < spec.num_subcarriers; ++n)
    for (std::size_t k = 0; k < spec.num_users; ++k) {
      const auto h = draw_channel(spec.seed, n, k, 0, spec.num_antennas);
      std::copy(h.begin(), h.end(), ch.channel(n, k).begin());
    }
  ch.selections.assign(spec.num_subcarriers, {});
  return ch;
}

double normalized_correlation(std::span<const Complex> a, std::span<const Complex> b) {
  Complex inner = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inner += std::conj(a[i]) * b[i];
    na += std::norm(a[i]);
    nb += std::norm(b[i]);
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::abs(inner) / std::sqrt(na * nb);
}

std::vector<std::size_t> sus_select_subcarrier(const ChannelSet& channels, std::size_t n, std::size_t max_users,
                                               double alpha) {
  const std::size_t K = channels.num_users;
  const std::size_t M = channels.num_antennas;
  std::vector<Eigen::VectorXcd> h(K);
  std::vector<double> norm2(K);
  for (std::size_t k = 0; k < K; ++k) {
    const auto c = channels.channel(n, k);
    h[k] = Eigen::Map<const Eigen::VectorXcd>(c.data(), static_cast<Eigen::Index>(M));
    norm2[k] = h[k].squaredNorm();
  }

  std::vector<std::size_t> picked;
  std::vector<char> alive(K, 1);
  std::vector<Eigen::VectorXcd> residual = h;
  const std::size_t limit = std::min(max_users, M);

  while (picked.size() < limit) {
    std::size_t best = K;
    double best_norm = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      if (!alive[k]) continue;
      if (norm2[k] == 0.0) {
        alive[k] = 0;
        continue;
      }
      const double r2 = residual[k].squaredNorm();
      // Correlation of h_k with the chosen span: sqrt(1 - |h_perp|^2 / |h|^2).
      const double corr = std::sqrt(std::max(0.0, 1.0 - r2 / norm2[k]));
      if (!picked.empty() && corr > alpha) {
        alive[k] = 0;
        continue;
      }
      if (r2 > best_norm) {
        best_norm = r2;
        best = k;
      }
    }
    if (best == K) break;
    picked.push_back(best);
    alive[best] = 0;
    const Eigen::VectorXcd q = residual[best] / std::sqrt(best_norm);
    for (std::size_t k = 0; k < K; ++k)
      if (alive[k]) residual[k] -= q * q.dot(residual[k]);
  }
  return picked;
}

std::vector<std::vector<std::size_t>> sus_select(const ChannelSet& channels, std::size_t max_users, double alpha) {
  std::vector<std::vector<std::size_t>> out(channels.num_subcarriers);
  for (std::size_t n = 0; n < channels.num_subcarriers; ++n)
    out[n] = sus_select_subcarrier(channels, n, max_users, alpha);
  return out;
}

SubcarrierGains zf_gains(const std::vector<std::span<const Complex>>& rows) {
  SubcarrierGains out;
  const auto g = static_cast<Eigen::Index>(rows.size());
  if (g == 0) return out;
  const auto M = static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXcd H(g, M);
  for (Eigen::Index j = 0; j < g; ++j)
    for (Eigen::Index m = 0; m < M; ++m) H(j, m) = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)];

  const Eigen::MatrixXcd gram = H * H.adjoint();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  if (!(lmin > 0.0) || lmax / lmin > kMaxCondition) {
    out.ill_conditioned = true;
    out.gains.assign(rows.size(), 0.0);
    return out;
  }
  const Eigen::MatrixXcd inv = gram.llt().solve(Eigen::MatrixXcd::Identity(g, g));
  out.gains.resize(rows.size());
  for (Eigen::Index j = 0; j < g; ++j) out.gains[static_cast<std::size_t>(j)] = inv(j, j).real();
  return out;
}

GainTable gains_from_selection(const ChannelSet& channels) {
  GainTable out;
  out.gains = Grid(channels.num_subcarriers, channels.num_users);
  for (std::size_t n = 0; n < channels.num_subcarriers; ++n) {
    const auto& sel = channels.selections.at(n);
    std::vector<std::span<const Complex>> rows;
    for (std::size_t k : sel) rows.push_back(channels.channel(n, k));
    const SubcarrierGains sg = zf_gains(rows);
    if (sg.ill_conditioned) {
      out.resample.push_back(n);
      continue;
    }
    for (std::size_t j = 0; j < sel.size(); ++j) out.gains(n, sel[j]) = sg.gains[j];
  }
  return out;
}

std::vector<double> gen_bounds_scaled(const ProblemInstance& inst, const std::vector<std::size_t>& rt_users,
                                      double scale) {
  if (!(scale >= 0.0 && scale <= 1.0)) throw std::invalid_argument("scale outside [0, 1]");
  std::vector<double> floors(inst.num_users, 0.0);

  ProblemInstance rt_only = inst;
  rt_only.rate_floors.assign(inst.num_users, 0.0);
  rt_only.rt_users.clear();
  std::vector<char> is_rt(inst.num_users, 0);
  for (std::size_t k : rt_users) is_rt.at(k) = 1;
  for (std::size_t n = 0; n < inst.num_subcarriers; ++n)
    for (std::size_t k = 0; k < inst.num_users; ++k)
      if (!is_rt[k]) rt_only.gains(n, k) = 0.0;
  if (!rt_only.has_any_gain()) return floors;

  const std::vector<double> zeros(inst.num_users, 0.0);
  const double theta = solve_unconstrained(rt_only, zeros).theta_star;
  const std::vector<double> rates =
      user_rates(rt_only, primal_from_dual(rt_only, DualPoint::with_zero_deltas(theta, inst.num_users)));
  for (std::size_t k : rt_users) floors[k] = scale * rates[k];
  return floors;
}

FixedRatioBounds gen_bounds_fixed_ratio(const ProblemInstance& inst, const std::vector<std::size_t>& rt_users,
                                        const std::vector<double>& ratios, double scale) {
  if (ratios.empty()) throw std::invalid_argument("ratios empty");
  if (!(scale >= 0.0)) throw std::invalid_argument("scale must be nonnegative");
  FixedRatioBounds out;
  out.floors.assign(inst.num_users, 0.0);

  const std::size_t R = rt_users.size();
  const std::size_t G = ratios.size();
  const std::size_t per_group = R / G;
  std::vector<double> base(inst.num_users, 0.0);
  bool any = false;
  for (std::size_t i = 0; i < R; ++i) {
    const std::size_t group = per_group == 0 ? std::min(i, G - 1) : std::min(i / per_group, G - 1);
    out.groups.push_back(group);
    const std::size_t k = rt_users[i];
    bool scheduled = false;
    for (std::size_t n = 0; n < inst.num_subcarriers; ++n) scheduled = scheduled || inst.gains(n, k) > 0.0;
    if (scheduled) base[k] = ratios[group];
    any = any || base[k] > 0.0;
  }
  if (!any) throw std::invalid_argument("all base floors are zero");

  ProblemInstance probe = inst;
  probe.rt_users = rt_users;
  std::sort(probe.rt_users.begin(), probe.rt_users.end());
  auto fits = [&](double gamma) {
    for (std::size_t k = 0; k < inst.num_users; ++k) probe.rate_floors[k] = gamma * base[k];
    return min_floor_power(probe) <= inst.power_budget;
  };
  double lo = 0.0;
  double hi = 1.0;
  while (fits(hi)) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (fits(mid))
      lo = mid;
    else
      hi = mid;
  }
  out.gamma = lo;
  for (std::size_t k = 0; k < inst.num_users; ++k) out.floors[k] = scale * lo * base[k];
  return out;
}

Scenario generate(const ScenarioSpec& spec) {
  if (const auto errors = validate(spec); !errors.empty()) throw std::invalid_argument(errors.front());
  Scenario sc;
  sc.channels = gen_channels(spec);
  ChannelSet& ch = sc.channels;

  ProblemInstance& inst = sc.instance;
  inst.num_users = spec.num_users;
  inst.num_subcarriers = spec.num_subcarriers;
  inst.num_antennas = spec.num_antennas;
  inst.power_budget = spec.power_budget;
  inst.weights.assign(spec.num_users, 1.0);
  inst.gains = Grid(spec.num_subcarriers, spec.num_users);
  inst.rate_floors.assign(spec.num_users, 0.0);

  for (std::size_t n = 0; n < spec.num_subcarriers; ++n) {
    for (std::size_t attempt = 0;; ++attempt) {
      if (attempt > 0) {
        for (std::size_t k = 0; k < spec.num_users; ++k) {
          const auto h = draw_channel(spec.seed, n, k, attempt, spec.num_antennas);
          std::copy(h.begin(), h.end(), ch.channel(n, k).begin());
        }
        ++sc.redraws;
      }
      ch.selections[n] = sus_select_subcarrier(ch, n, spec.num_antennas, spec.alpha);
      std::vector<std::span<const Complex>> rows;
      for (std::size_t k : ch.selections[n]) rows.push_back(ch.channel(n, k));
      const SubcarrierGains sg = zf_gains(rows);
      if (!sg.ill_conditioned) {
        for (std::size_t j = 0; j < sg.gains.size(); ++j) inst.gains(n, ch.selections[n][j]) = sg.gains[j];
        break;
      }
      if (attempt + 1 >= kMaxRedraws) throw std::runtime_error("subcarrier stays ill-conditioned after redraws");
    }
  }

  for (std::size_t k = 0; k < spec.num_rt; ++k) inst.rt_users.push_back(k);
  if (spec.num_rt == 0) return sc;

  if (spec.mode == BoundMode::scaled) {
    inst.rate_floors = gen_bounds_scaled(inst, inst.rt_users, spec.scale);
  } else {
    try {
      FixedRatioBounds fr = gen_bounds_fixed_ratio(inst, inst.rt_users, spec.ratios, spec.scale);
      inst.rate_floors = std::move(fr.floors);
      sc.gamma = fr.gamma;
      sc.groups = std::move(fr.groups);
    } catch (const std::invalid_argument&) {
      // No RT user is scheduled anywhere: nothing to bound.
    }
  }
  return sc;
}

std::string sidecar_json(const ScenarioSpec& spec, const Scenario& scenario) {
  nlohmann::json j;
  j["seed"] = spec.seed;
  j["alpha"] = spec.alpha;
  j["mode"] = to_string(spec.mode);
  j["scale"] = spec.scale;
  j["gamma"] = scenario.gamma;
  j["groups"] = scenario.groups;
  j["ratios"] = spec.ratios;
  j["selection"] = "greedy span projection, strongest first";
  j["redraws"] = scenario.redraws;
  return j.dump(2);
}

}  // namespace zfpa
