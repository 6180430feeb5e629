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

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gbs/torontonian.hpp"

namespace gbs {

inline constexpr int kBruteForceCap = 20;

/// Flight-gate assignment instance. Assignment variable x_{i,a} (flight i at
/// gate a) is mode i * n_gates + a. The transfer-time functional is
/// T(x) = x^T transfer x with its linear part on the diagonal.
struct FgaInstance {
  int n_flights = 0;
  int n_gates = 0;
  Eigen::MatrixXd transfer;
  /// Flight pairs (i, j), i < j, that may not share a gate. Sorted, unique.
  std::vector<std::pair<int, int>> forbidden_pairs;
  double lambda_one = 1.0;
  double lambda_not = 1.0;
  std::uint64_t seed = 0;

  int n_vars() const { return n_flights * n_gates; }
  int var(int flight, int gate) const { return flight * n_gates + gate; }

  /// Throws ContractViolation on any broken invariant.
  void validate() const;
};

/// Knobs of the random instance generator.
struct GeneratorConfig {
  int passengers_min = 1;
  int passengers_max = 50;
  double walk_min = 1.0;
  double walk_max = 10.0;
  double transfer_density = 0.5;
  double forbidden_probability = 0.4;
  /// lambda_one = lambda_not = penalty_factor * sum_ij |T_ij|.
  double penalty_factor = 2.0;
  int max_attempts = 100;
};

/// Random instance, deterministic in `seed`. Redraws (up to max_attempts) until
/// the instance is non-trivial and a feasible assignment exists.
/// Throws CapacityError when n_flights * n_gates exceeds kBruteForceCap and
/// InputError when no acceptable instance is drawn.
FgaInstance generate_instance(int n_flights, int n_gates, std::uint64_t seed, const GeneratorConfig& config = {});

/// value(x) = x^T q x + offset over x in {0,1}^n.
struct QuboProblem {
  int n = 0;
  Eigen::MatrixXd q;
  double offset = 0.0;

  QuboProblem() = default;
  QuboProblem(Eigen::MatrixXd q_matrix, double offset_value);

  double value(std::uint32_t x) const;
  /// value() for all 2^n bit vectors. Throws CapacityError above kBruteForceCap.
  std::vector<double> energy_table() const;
  /// sum |q_ij| + |offset|; the scale used for tie tolerances.
  double scale() const;
};

QuboProblem assemble_qubo(const FgaInstance& inst);

/// Constraint check on an assignment bit vector.
struct ConstraintReport {
  /// Flights not assigned to exactly one gate.
  int unassigned_or_multi = 0;
  /// Forbidden pairs sharing a gate (counted per gate).
  int conflicts = 0;

  bool feasible() const { return unassigned_or_multi == 0 && conflicts == 0; }
};

ConstraintReport check_constraints(const FgaInstance& inst, std::uint32_t x);

struct GroundTruth {
  double min_value = 0.0;
  /// Every bit vector within 1e-12 * scale of the minimum, ascending.
  std::vector<std::uint32_t> minimizers;
};

GroundTruth brute_force_solve(const QuboProblem& problem);

/// <Q> = sum_x p(x) Q(x) over the exact pattern distribution.
double expected_energy_exact(const QuboProblem& problem, const PatternDistribution& dist);

}  // namespace gbs
