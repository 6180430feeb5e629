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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gbs/gaussian_sim.hpp"
#include "gbs/problems.hpp"
#include "gbs/torontonian.hpp"

namespace gbs {

enum class OptimizerKind { kLinearApprox, kAdam };

/// How "smallest entries" of q are ranked when picking trainable theta entries.
enum class MaskRule { kAlgebraic, kAbsolute };

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(const std::string& name);
std::string to_string(MaskRule rule);
MaskRule mask_rule_from_string(const std::string& name);

struct TrainConfig {
  double alpha = 1.0;
  /// Shots per cost evaluation; 0 evaluates the exact distribution.
  int shots_k = 0;
  /// Number of trainable theta entries; -1 resolves to 3N.
  int mask_size = -1;
  /// Derivative-free evaluation budget; -1 resolves to 50N.
  int max_evals = -1;
  OptimizerKind optimizer = OptimizerKind::kLinearApprox;
  MaskRule mask_rule = MaskRule::kAlgebraic;
  double adam_lr = 0.05;
  int adam_steps = 500;
  double init_scale = 0.1;
  double rho_end = 1e-6;
  std::uint64_t seed = 0;
  std::vector<double> thresholds{0.1, 0.01};
  int enumeration_cap = kDefaultEnumerationCap;
  /// Wall-clock budget in seconds; 0 disables it.
  double time_budget_s = 0.0;

  /// Copy with -1 defaults filled in for n modes. Throws ContractViolation
  /// on an invalid combination.
  TrainConfig resolved(int n_modes) const;
};

/// Upper-triangle theta entries (i <= j) that the optimizer may change.
struct ParameterMask {
  std::vector<std::pair<int, int>> indices;
};

/// Picks the mask_size pairs (i <= j) with the smallest q_ij (by value or
/// magnitude per `rule`), ties broken by lexicographic (i, j). The result is
/// listed in that ranking order.
ParameterMask build_mask(const QuboProblem& problem, int mask_size, MaskRule rule = MaskRule::kAlgebraic);

/// Mean of the ceil(alpha * K) smallest energies.
double cvar_from_samples(std::span<const double> energies, double alpha);

/// Lower alpha-tail expectation of the exact energy distribution, with the
/// boundary atom included fractionally so the tail mass is exactly alpha.
double cvar_exact(const QuboProblem& problem, const PatternDistribution& dist, double alpha);

/// Same, with a precomputed energy table (energies[x] = value(x)).
double cvar_exact(std::span<const double> energies, const PatternDistribution& dist, double alpha);

/// <Q> from one- and two-mode vacuum marginals:
///   <P_i> = 1 - p_vac(i),  <P_i P_j> = 1 - p_vac(i) - p_vac(j) + p_vac(i, j).
/// O(N^2) small determinants, no enumeration.
double expected_energy_analytic(const QuboProblem& problem, const GaussianState& state);

struct TrainRecord {
  ThetaMatrix best_theta = ThetaMatrix::zeros(1);
  double best_cost = 0.0;
  ParameterMask mask;
  std::vector<std::pair<int, double>> cost_trace;
  int n_evals = 0;
  double final_fidelity = 0.0;
  std::vector<double> thresholds;
  std::vector<bool> success;
};

/// Random starting theta: every upper-triangle entry uniform in
/// [-init_scale, init_scale], drawn in row-major order from `seed`.
ThetaMatrix initial_theta(int n_modes, double init_scale, std::uint64_t seed);

/// Probability mass of the state on the ground-truth minimizer set.
double ground_state_fidelity(const GaussianState& state, const GroundTruth& truth, int enumeration_cap);

/// Trains the masked theta entries against the configured cost. Throws
/// TrainingFailedError on a non-finite cost and TimeoutError when the
/// wall-clock budget runs out.
TrainRecord train(const QuboProblem& problem, const GroundTruth& truth, const TrainConfig& config);
TrainRecord train(const QuboProblem& problem, const TrainConfig& config);

}  // namespace gbs
