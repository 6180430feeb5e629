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

#include "gbs/problems.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "gbs/detail/linalg.hpp"
#include "gbs/errors.hpp"

namespace gbs {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(rng() % span);
}

bool bernoulli(std::mt19937_64& rng, double p) { return uniform(rng, 0.0, 1.0) < p; }

// Depth-first search for a one-gate-per-flight assignment respecting P.
bool has_feasible_assignment(const FgaInstance& inst) {
  std::vector<std::vector<bool>> forbidden(inst.n_flights, std::vector<bool>(inst.n_flights, false));
  for (auto [i, j] : inst.forbidden_pairs) forbidden[i][j] = forbidden[j][i] = true;
  std::vector<int> gate(inst.n_flights, -1);
  auto place = [&](auto&& self, int flight) -> bool {
    if (flight == inst.n_flights) return true;
    for (int a = 0; a < inst.n_gates; ++a) {
      bool ok = true;
      for (int other = 0; other < flight && ok; ++other) ok = !(forbidden[flight][other] && gate[other] == a);
      if (!ok) continue;
      gate[flight] = a;
      if (self(self, flight + 1)) return true;
    }
    gate[flight] = -1;
    return false;
  };
  return place(place, 0);
}

// The unconstrained minimizer of T(x) alone must break a constraint.
bool is_nontrivial(const FgaInstance& inst) {
  const QuboProblem transfer_only(inst.transfer, 0.0);
  const GroundTruth gt = brute_force_solve(transfer_only);
  return std::any_of(gt.minimizers.begin(), gt.minimizers.end(),
                     [&](std::uint32_t x) { return !check_constraints(inst, x).feasible(); });
}

FgaInstance draw_instance(int n_flights, int n_gates, std::uint64_t seed, std::mt19937_64& rng,
                          const GeneratorConfig& cfg) {
  FgaInstance inst;
  inst.n_flights = n_flights;
  inst.n_gates = n_gates;
  inst.seed = seed;
  const int n = n_flights * n_gates;
  inst.transfer = Eigen::MatrixXd::Zero(n, n);

  Eigen::MatrixXd walk(n_gates, n_gates);
  for (int a = 0; a < n_gates; ++a) {
    for (int b = a; b < n_gates; ++b) walk(a, b) = walk(b, a) = uniform(rng, cfg.walk_min, cfg.walk_max);
  }
  std::vector<double> exit_walk(n_gates);
  for (auto& e : exit_walk) e = uniform(rng, cfg.walk_min, cfg.walk_max);

  for (int i = 0; i < n_flights; ++i) {
    const int passengers = uniform_int(rng, cfg.passengers_min, cfg.passengers_max);
    for (int a = 0; a < n_gates; ++a) inst.transfer(inst.var(i, a), inst.var(i, a)) = passengers * exit_walk[a];
  }
  for (int i = 0; i < n_flights; ++i) {
    for (int j = i + 1; j < n_flights; ++j) {
      if (!bernoulli(rng, cfg.transfer_density)) continue;
      const int demand = uniform_int(rng, cfg.passengers_min, cfg.passengers_max);
      for (int a = 0; a < n_gates; ++a) {
        for (int b = 0; b < n_gates; ++b) {
          const double half = 0.5 * demand * walk(a, b);
          inst.transfer(inst.var(i, a), inst.var(j, b)) = half;
          inst.transfer(inst.var(j, b), inst.var(i, a)) = half;
        }
      }
    }
  }
  for (int i = 0; i < n_flights; ++i) {
    for (int j = i + 1; j < n_flights; ++j) {
      if (bernoulli(rng, cfg.forbidden_probability)) inst.forbidden_pairs.emplace_back(i, j);
    }
  }
  const double lambda = cfg.penalty_factor * inst.transfer.cwiseAbs().sum();
  inst.lambda_one = lambda > 0.0 ? lambda : 1.0;
  inst.lambda_not = inst.lambda_one;
  return inst;
}

}  // namespace

void FgaInstance::validate() const {
  if (n_flights < 1 || n_gates < 1) throw ContractViolation("instance needs at least one flight and one gate");
  const int n = n_vars();
  if (transfer.rows() != n || transfer.cols() != n) {
    throw ContractViolation(fmt::format("transfer matrix must be {}x{}", n, n));
  }
  if (!transfer.allFinite()) throw ContractViolation("transfer matrix has non-finite entries");
  for (int r = 0; r < n; ++r) {
    for (int c = r + 1; c < n; ++c) {
      if (transfer(r, c) != transfer(c, r)) throw ContractViolation("transfer matrix is not symmetric");
    }
  }
  for (std::size_t k = 0; k < forbidden_pairs.size(); ++k) {
    const auto [i, j] = forbidden_pairs[k];
    if (i < 0 || j >= n_flights || i >= j) {
      throw ContractViolation(fmt::format("forbidden pair ({}, {}) must satisfy 0 <= i < j < {}", i, j, n_flights));
    }
    if (k > 0 && !(forbidden_pairs[k - 1] < forbidden_pairs[k])) {
      throw ContractViolation("forbidden pairs must be sorted and unique");
    }
  }
  if (!(lambda_one > 0.0) || !(lambda_not > 0.0) || !std::isfinite(lambda_one) || !std::isfinite(lambda_not)) {
    throw ContractViolation("penalty weights must be positive and finite");
  }
}

FgaInstance generate_instance(int n_flights, int n_gates, std::uint64_t seed, const GeneratorConfig& config) {
  if (n_flights < 1 || n_gates < 1) throw ContractViolation("instance needs at least one flight and one gate");
  if (n_flights * n_gates > kBruteForceCap) {
    throw CapacityError(fmt::format("{} x {} = {} variables exceeds the cap of {}", n_flights, n_gates,
                                    n_flights * n_gates, kBruteForceCap));
  }
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
    FgaInstance inst = draw_instance(n_flights, n_gates, seed, rng, config);
    if (has_feasible_assignment(inst) && is_nontrivial(inst)) return inst;
  }
  throw InputError(fmt::format("no non-trivial feasible {}x{} instance after {} attempts (seed {})", n_flights,
                               n_gates, config.max_attempts, seed));
}

QuboProblem::QuboProblem(Eigen::MatrixXd q_matrix, double offset_value)
    : n(static_cast<int>(q_matrix.rows())), q(std::move(q_matrix)), offset(offset_value) {
  if (q.rows() != q.cols()) throw ContractViolation("QUBO matrix must be square");
  if (n > 32) throw CapacityError("QUBO supports at most 32 variables");
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (q(i, j) != q(j, i)) throw ContractViolation("QUBO matrix must be symmetric");
    }
  }
}

double QuboProblem::value(std::uint32_t x) const {
  double v = offset;
  for (std::uint32_t a = x; a != 0; a &= a - 1) {
    const int i = std::countr_zero(a);
    double row = 0.0;
    for (std::uint32_t b = x; b != 0; b &= b - 1) row += q(i, std::countr_zero(b));
    v += row;
  }
  return v;
}

std::vector<double> QuboProblem::energy_table() const {
  if (n > kBruteForceCap) throw CapacityError(fmt::format("{} variables exceeds the cap of {}", n, kBruteForceCap));
  std::vector<double> table(std::size_t{1} << n);
  for (std::size_t x = 0; x < table.size(); ++x) table[x] = value(static_cast<std::uint32_t>(x));
  return table;
}

double QuboProblem::scale() const { return q.cwiseAbs().sum() + std::abs(offset); }

QuboProblem assemble_qubo(const FgaInstance& inst) {
  inst.validate();
  Eigen::MatrixXd q = inst.transfer;
  double offset = 0.0;

  // lambda_one * (sum_a x_ia - 1)^2 = lambda_one * (-sum_a x_ia + 2 sum_{a<b} x_ia x_ib + 1)
  for (int i = 0; i < inst.n_flights; ++i) {
    for (int a = 0; a < inst.n_gates; ++a) {
      q(inst.var(i, a), inst.var(i, a)) -= inst.lambda_one;
      for (int b = 0; b < inst.n_gates; ++b) {
        if (a != b) q(inst.var(i, a), inst.var(i, b)) += inst.lambda_one;
      }
    }
    offset += inst.lambda_one;
  }
  // lambda_not * sum_{(i,j) in P} sum_a x_ia x_ja, split over the two symmetric entries
  for (auto [i, j] : inst.forbidden_pairs) {
    for (int a = 0; a < inst.n_gates; ++a) {
      q(inst.var(i, a), inst.var(j, a)) += 0.5 * inst.lambda_not;
      q(inst.var(j, a), inst.var(i, a)) += 0.5 * inst.lambda_not;
    }
  }
  return QuboProblem(std::move(q), offset);
}

ConstraintReport check_constraints(const FgaInstance& inst, std::uint32_t x) {
  ConstraintReport report;
  auto assigned = [&](int flight, int gate) { return (x >> inst.var(flight, gate)) & 1u; };
  for (int i = 0; i < inst.n_flights; ++i) {
    int gates = 0;
    for (int a = 0; a < inst.n_gates; ++a) gates += static_cast<int>(assigned(i, a));
    if (gates != 1) ++report.unassigned_or_multi;
  }
  for (auto [i, j] : inst.forbidden_pairs) {
    for (int a = 0; a < inst.n_gates; ++a) {
      if (assigned(i, a) && assigned(j, a)) ++report.conflicts;
    }
  }
  return report;
}

GroundTruth brute_force_solve(const QuboProblem& problem) {
  if (problem.n > kBruteForceCap) {
    throw CapacityError(fmt::format("{} variables exceeds the brute-force cap of {}", problem.n, kBruteForceCap));
  }
  const std::vector<double> table = problem.energy_table();
  const double best = *std::min_element(table.begin(), table.end());
  const double tol = 1e-12 * (1.0 + problem.scale());
  GroundTruth gt{best, {}};
  for (std::size_t x = 0; x < table.size(); ++x) {
    if (table[x] <= best + tol) gt.minimizers.push_back(static_cast<std::uint32_t>(x));
  }
  return gt;
}

double expected_energy_exact(const QuboProblem& problem, const PatternDistribution& dist) {
  if (dist.n_modes != problem.n || dist.probs.size() != (std::size_t{1} << problem.n)) {
    throw ContractViolation(
        fmt::format("distribution over {} modes does not match QUBO over {} variables", dist.n_modes, problem.n));
  }
  detail::CompensatedSum sum;
  for (std::size_t x = 0; x < dist.probs.size(); ++x) {
    if (dist.probs[x] != 0.0) sum.add(dist.probs[x] * problem.value(static_cast<std::uint32_t>(x)));
  }
  return sum.value();
}

}  // namespace gbs
