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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gbs/gaussian_sim.hpp"

namespace gbs {

inline constexpr int kDefaultEnumerationCap = 16;
inline constexpr int kHardEnumerationCap = 20;

/// Threshold-detector outcome over N modes. Bit i of `bits` is mode i (1 = click).
struct ClickPattern {
  std::uint32_t bits = 0;
  int n_modes = 0;

  bool clicked(int mode) const { return (bits >> mode) & 1u; }
  int clicks() const;
  /// "0110..." with mode 0 first.
  std::string to_string() const;
  static ClickPattern from_string(const std::string& s);

  friend bool operator==(const ClickPattern&, const ClickPattern&) = default;
};

/// Exact probability table over all 2^N patterns, indexed by ClickPattern::bits.
struct PatternDistribution {
  int n_modes = 0;
  std::vector<double> probs;

  double operator[](std::uint32_t bits) const { return probs[bits]; }
  double total() const;
};

/// Tor(A) = sum_{Z subset [n]} (-1)^{n-|Z|} / sqrt(det(I - A_(Z))) for a 2n x 2n
/// matrix A, A_(Z) keeping rows/columns {i, i+n : i in Z}. Tor of a 0 x 0
/// matrix is 1. Throws InvalidStateError if any det(I - A_(Z)) is not real
/// positive.
double torontonian(const Eigen::MatrixXcd& a);

/// p(S) = Tor(O_(S)) / sqrt(det sigma), S = clicked modes.
double pattern_probability(const GaussianState& state, ClickPattern pattern);

/// All 2^N pattern probabilities. Every vacuum marginal p_vac(T) is computed
/// once and the probabilities follow by inclusion-exclusion over subsets.
/// Throws CapacityError when N exceeds `cap`; `cap` itself must not exceed
/// kHardEnumerationCap.
PatternDistribution full_distribution(const GaussianState& state, int cap = kDefaultEnumerationCap);

/// K exact samples drawn mode by mode from the conditional click law on the
/// reduced covariance of the modes sampled so far. Deterministic in `seed`.
std::vector<ClickPattern> sample(const GaussianState& state, int k, std::uint64_t seed);

}  // namespace gbs
