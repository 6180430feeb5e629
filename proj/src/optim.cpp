// Copyright 2026 The gbs-fga Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gbs/optim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <tuple>

#include <fmt/format.h>

#include "gbs/detail/linalg.hpp"
#include "gbs/errors.hpp"
#include "gbs/minimizers.hpp"

namespace gbs {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ContractViolation(fmt::format("alpha must lie in (0, 1], got {}", alpha));
}

std::vector<std::uint32_t> ascending_order(std::span<const double> energies) {
  std::vector<std::uint32_t> order(energies.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return energies[a] < energies[b]; });
  return order;
}

double cvar_over_order(std::span<const double> energies, std::span<const std::uint32_t> order,
                       const PatternDistribution& dist, double alpha) {
  double remaining = alpha;
  detail::CompensatedSum acc;
  for (std::uint32_t x : order) {
    const double p = dist.probs[x];
    if (p <= 0.0) continue;
    const double take = std::min(p, remaining);
    acc.add(take * energies[x]);
    remaining -= take;
    if (remaining <= 0.0) break;
  }
  const double included = alpha - std::max(remaining, 0.0);
  if (!(included > 0.0)) throw InvalidStateError("distribution carries no probability mass");
  return acc.value() / included;
}

void check_dist(int n, const PatternDistribution& dist, std::size_t energies) {
  if (dist.n_modes != n || dist.probs.size() != energies) {
    throw ContractViolation(fmt::format("distribution over {} modes does not match {} variables", dist.n_modes, n));
  }
}

}  // namespace

std::string to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "linear-approx";
}

OptimizerKind optimizer_from_string(const std::string& name) {
  if (name == "linear-approx" || name == "cobyla") return OptimizerKind::kLinearApprox;
  if (name == "adam") return OptimizerKind::kAdam;
  throw InputError(fmt::format("unknown optimizer '{}' (expected linear-approx or adam)", name));
}

std::string to_string(MaskRule rule) { return rule == MaskRule::kAbsolute ? "absolute" : "algebraic"; }

MaskRule mask_rule_from_string(const std::string& name) {
  if (name == "algebraic") return MaskRule::kAlgebraic;
  if (name == "absolute") return MaskRule::kAbsolute;
  throw InputError(fmt::format("unknown mask rule '{}' (expected algebraic or absolute)", name));
}

TrainConfig TrainConfig::resolved(int n_modes) const {
  TrainConfig cfg = *this;
  if (cfg.mask_size < 0) cfg.mask_size = std::min(3 * n_modes, n_modes * (n_modes + 1) / 2);
  if (cfg.max_evals < 0) cfg.max_evals = 50 * n_modes;
  check_alpha(cfg.alpha);
  if (cfg.shots_k < 0) throw ContractViolation("shots_k must be nonnegative");
  if (cfg.max_evals < 1) throw ContractViolation("max_evals must be at least 1");
  if (cfg.mask_size > n_modes * (n_modes + 1) / 2) {
    throw ContractViolation(fmt::format("mask_size {} exceeds N(N+1)/2 = {}", cfg.mask_size, n_modes * (n_modes + 1) / 2));
  }
  if (!(cfg.init_scale > 0.0)) throw ContractViolation("init_scale must be positive");
  if (!(cfg.adam_lr > 0.0)) throw ContractViolation("adam_lr must be positive");
  if (cfg.adam_steps < 0) throw ContractViolation("adam_steps must be nonnegative");
  if (cfg.optimizer == OptimizerKind::kAdam && cfg.shots_k > 0) {
    throw ContractViolation("adam needs a deterministic cost; use shots_k = 0");
  }
  if (cfg.shots_k == 0 && n_modes > cfg.enumeration_cap) {
    throw CapacityError(fmt::format("exact mode over {} modes exceeds the enumeration cap {}", n_modes,
                                    cfg.enumeration_cap));
  }
  return cfg;
}

ParameterMask build_mask(const QuboProblem& problem, int mask_size, MaskRule rule) {
  const int n = problem.n;
  if (mask_size < 0 || mask_size > n * (n + 1) / 2) {
    throw ContractViolation(fmt::format("mask_size {} outside [0, {}]", mask_size, n * (n + 1) / 2));
  }
  std::vector<std::tuple<double, int, int>> ranked;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double v = rule == MaskRule::kAbsolute ? std::abs(problem.q(i, j)) : problem.q(i, j);
      ranked.emplace_back(v, i, j);
    }
  }
  std::sort(ranked.begin(), ranked.end());
  ParameterMask mask;
  for (int k = 0; k < mask_size; ++k) mask.indices.emplace_back(std::get<1>(ranked[k]), std::get<2>(ranked[k]));
  return mask;
}

double cvar_from_samples(std::span<const double> energies, double alpha) {
  if (energies.empty()) throw ContractViolation("cvar_from_samples needs at least one energy");
  check_alpha(alpha);
  const auto k = energies.size();
  // ceil with a relative guard so that e.g. 0.1 * 30 counts as 3, not 4.
  auto m = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(k) * (1.0 - 1e-12)));
  m = std::clamp<std::size_t>(m, 1, k);
  std::vector<double> sorted(energies.begin(), energies.end());
  if (m < k) std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(m), sorted.end());
  std::sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(m));
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) sum += sorted[i];
  return sum / static_cast<double>(m);
}

double cvar_exact(std::span<const double> energies, const PatternDistribution& dist, double alpha) {
  check_alpha(alpha);
  check_dist(dist.n_modes, dist, energies.size());
  const auto order = ascending_order(energies);
  return cvar_over_order(energies, order, dist, alpha);
}

double cvar_exact(const QuboProblem& problem, const PatternDistribution& dist, double alpha) {
  check_alpha(alpha);
  check_dist(problem.n, dist, std::size_t{1} << problem.n);
  const auto energies = problem.energy_table();
  return cvar_exact(energies, dist, alpha);
}

double expected_energy_analytic(const QuboProblem& problem, const GaussianState& state) {
  const int n = problem.n;
  if (state.n_modes() != n) {
    throw ContractViolation(fmt::format("state has {} modes, QUBO has {} variables", state.n_modes(), n));
  }
  std::vector<double> vac(n);
  for (int i = 0; i < n; ++i) vac[i] = vacuum_marginal(state, 1u << i);

  detail::CompensatedSum sum;
  sum.add(problem.offset);
  for (int i = 0; i < n; ++i) {
    sum.add(problem.q(i, i) * (1.0 - vac[i]));
    for (int j = i + 1; j < n; ++j) {
      const double qij = problem.q(i, j) + problem.q(j, i);
      if (qij == 0.0) continue;
      const double both = 1.0 - vac[i] - vac[j] + vacuum_marginal(state, (1u << i) | (1u << j));
      sum.add(qij * both);
    }
  }
  return sum.value();
}

ThetaMatrix initial_theta(int n_modes, double init_scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd theta(n_modes, n_modes);
  for (int i = 0; i < n_modes; ++i) {
    for (int j = i; j < n_modes; ++j) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      theta(i, j) = theta(j, i) = init_scale * (2.0 * u - 1.0);
    }
  }
  return ThetaMatrix(std::move(theta));
}

double ground_state_fidelity(const GaussianState& state, const GroundTruth& truth, int enumeration_cap) {
  detail::CompensatedSum mass;
  if (state.n_modes() <= enumeration_cap) {
    const PatternDistribution dist = full_distribution(state, enumeration_cap);
    for (std::uint32_t x : truth.minimizers) mass.add(dist.probs[x]);
  } else {
    for (std::uint32_t x : truth.minimizers) mass.add(pattern_probability(state, ClickPattern{x, state.n_modes()}));
  }
  return std::clamp(mass.value(), 0.0, 1.0);
}

TrainRecord train(const QuboProblem& problem, const TrainConfig& config) {
  return train(problem, brute_force_solve(problem), config);
}

TrainRecord train(const QuboProblem& problem, const GroundTruth& truth, const TrainConfig& config) {
  const int n = problem.n;
  const TrainConfig cfg = config.resolved(n);
  const auto started = std::chrono::steady_clock::now();

  TrainRecord record;
  record.mask = build_mask(problem, cfg.mask_size, cfg.mask_rule);
  record.thresholds = cfg.thresholds;
  const ThetaMatrix start = initial_theta(n, cfg.init_scale, cfg.seed);

  auto theta_from = [&](std::span<const double> params) {
    Eigen::MatrixXd m = start.entries();
    for (std::size_t k = 0; k < params.size(); ++k) {
      const auto [i, j] = record.mask.indices[k];
      m(i, j) = m(j, i) = params[k];
    }
    return ThetaMatrix(std::move(m));
  };

  const std::vector<double> energies = problem.energy_table();
  const std::vector<std::uint32_t> order = ascending_order(energies);
  const bool sampled = cfg.shots_k > 0;
  const bool analytic = !sampled && cfg.alpha == 1.0;

  int evals = 0;
  auto cost = [&](std::span<const double> params) {
    if (cfg.time_budget_s > 0.0) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
      if (elapsed.count() > cfg.time_budget_s) {
        throw TimeoutError(fmt::format("training exceeded {} s after {} evaluations", cfg.time_budget_s, evals));
      }
    }
    const int index = evals++;
    const GaussianState state = state_from_theta(theta_from(params));
    if (analytic) return expected_energy_analytic(problem, state);
    if (!sampled) return cvar_over_order(energies, order, full_distribution(state, cfg.enumeration_cap), cfg.alpha);
    const auto shots = sample(state, cfg.shots_k, splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(index))));
    std::vector<double> values;
    values.reserve(shots.size());
    for (const ClickPattern& s : shots) values.push_back(energies[s.bits]);
    return cvar_from_samples(values, cfg.alpha);
  };

  auto record_cost = [&](double c) {
    record.cost_trace.emplace_back(evals - 1, c);
    if (!std::isfinite(c)) {
      throw TrainingFailedError(fmt::format("non-finite cost at evaluation {}", evals - 1), record.cost_trace);
    }
  };

  std::vector<double> x0;
  for (const auto& [i, j] : record.mask.indices) x0.push_back(start(i, j));

  MinimizeResult result;
  if (cfg.optimizer == OptimizerKind::kLinearApprox) {
    const Objective traced = [&](std::span<const double> p) {
      const double c = cost(p);
      record_cost(c);
      return c;
    };
    const double rho_begin = 0.5 * cfg.init_scale;
    result = minimize_linear_approx(traced, x0, {rho_begin, std::min(cfg.rho_end, rho_begin), cfg.max_evals});
  } else {
    AdamOptions opts;
    opts.learning_rate = cfg.adam_lr;
    opts.steps = cfg.adam_steps;
    opts.on_iterate = record_cost;
    result = minimize_adam(cost, x0, opts);
  }

  record.best_theta = theta_from(result.x);
  record.best_cost = result.value;
  record.n_evals = evals;
  record.final_fidelity = ground_state_fidelity(state_from_theta(record.best_theta), truth, cfg.enumeration_cap);
  for (double t : cfg.thresholds) record.success.push_back(record.final_fidelity > t);
  return record;
}

}  // namespace gbs
