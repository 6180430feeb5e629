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

#include "gbs/torontonian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "fock_oracle.hpp"
#include "gbs/errors.hpp"
#include "test_util.hpp"

using namespace gbs;
using gbs::testing::FockOracle;
using gbs::testing::random_theta;
using gbs::testing::random_theta_with_max_squeezing;

namespace {

GaussianState single_mode(double r) {
  Eigen::MatrixXd m(1, 1);
  m << r;
  return state_from_theta(ThetaMatrix(m));
}

}  // namespace

TEST(Torontonian, empty_matrix_is_one) { EXPECT_EQ(torontonian(Eigen::MatrixXcd(0, 0)), 1.0); }

TEST(Torontonian, vacuum_submatrix_never_clicks) {
  EXPECT_NEAR(torontonian(Eigen::MatrixXcd::Zero(2, 2)), 0.0, 1e-15);
}

TEST(Torontonian, single_mode_closed_form) {
  const double t = std::tanh(1.0);
  Eigen::MatrixXcd a(2, 2);
  a << 0.0, t, t, 0.0;
  EXPECT_NEAR(torontonian(a), std::cosh(1.0) - 1.0, 1e-12);
  EXPECT_NEAR(torontonian(a), 0.543081, 1e-6);
}

TEST(Torontonian, rejects_nonpositive_determinant) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2);
  a(0, 0) = 2.0;
  EXPECT_THROW(torontonian(a), InvalidStateError);
  EXPECT_THROW(torontonian(Eigen::MatrixXcd::Zero(3, 3)), ContractViolation);
}

TEST(Torontonian, two_mode_matches_fock_oracle) {
  std::mt19937_64 rng(8);
  const ThetaMatrix theta = random_theta_with_max_squeezing(2, rng, 0.5);
  const GaussianState s = state_from_theta(theta);
  const FockOracle oracle(theta.entries(), 20);
  ASSERT_LT(oracle.truncation_loss(), 1e-9);
  EXPECT_NEAR(torontonian(s.o_matrix()), oracle.pattern_probability(0b11) * s.sqrt_det_sigma(), 1e-7);
}

TEST(PatternProbability, vacuum_and_single_mode) {
  const GaussianState vac = state_from_theta(ThetaMatrix::zeros(3));
  EXPECT_NEAR(pattern_probability(vac, {0, 3}), 1.0, 1e-15);
  EXPECT_NEAR(pattern_probability(vac, {0b010, 3}), 0.0, 1e-15);

  const GaussianState s = single_mode(1.0);
  EXPECT_NEAR(pattern_probability(s, {0, 1}), 1.0 / std::cosh(1.0), 1e-13);
  EXPECT_NEAR(pattern_probability(s, {1, 1}), 1.0 - 1.0 / std::cosh(1.0), 1e-13);
  EXPECT_NEAR(pattern_probability(s, {1, 1}), 0.351946, 1e-6);
  EXPECT_THROW(pattern_probability(s, {0, 2}), ContractViolation);
}

TEST(PatternProbability, three_modes_match_fock_oracle) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 3; ++trial) {
    const ThetaMatrix theta = random_theta_with_max_squeezing(3, rng, 0.45);
    const GaussianState s = state_from_theta(theta);
    const FockOracle oracle(theta.entries(), 20);
    ASSERT_LT(oracle.truncation_loss(), 1e-8);
    for (std::uint32_t p = 0; p < 8; ++p) {
      EXPECT_NEAR(pattern_probability(s, {p, 3}), oracle.pattern_probability(p), 1e-6) << "pattern " << p;
    }
  }
}

TEST(ClickPattern, string_round_trip) {
  const ClickPattern p = ClickPattern::from_string("0110");
  EXPECT_EQ(p.bits, 0b0110u);
  EXPECT_EQ(p.clicks(), 2);
  EXPECT_EQ(p.to_string(), "0110");
  EXPECT_THROW(ClickPattern::from_string("01x"), ContractViolation);
}

TEST(FullDistribution, vacuum_point_mass) {
  const auto d = full_distribution(state_from_theta(ThetaMatrix::zeros(4)));
  EXPECT_NEAR(d[0], 1.0, 1e-15);
  for (std::uint32_t p = 1; p < 16; ++p) EXPECT_NEAR(d[p], 0.0, 1e-15);
}

TEST(FullDistribution, unentangled_modes_factorize) {
  Eigen::MatrixXd m = Eigen::Vector2d(0.8, 0.8).asDiagonal();
  const auto d = full_distribution(state_from_theta(ThetaMatrix(m)));
  const double p0 = 1.0 / std::cosh(0.8);
  const double p1 = 1.0 - p0;
  EXPECT_NEAR(d[0b00], p0 * p0, 1e-13);
  EXPECT_NEAR(d[0b01], p1 * p0, 1e-13);
  EXPECT_NEAR(d[0b10], p0 * p1, 1e-13);
  EXPECT_NEAR(d[0b11], p1 * p1, 1e-13);
}

TEST(FullDistribution, agrees_with_direct_torontonian_and_normalizes) {
  std::mt19937_64 rng(77);
  for (int n = 1; n <= 8; ++n) {
    const GaussianState s = state_from_theta(random_theta(n, rng));
    const auto d = full_distribution(s);
    ASSERT_NEAR(d.total(), 1.0, 1e-9);
    for (std::uint32_t p = 0; p < (1u << n); ++p) {
      ASSERT_GE(d[p], 0.0);
      ASSERT_NEAR(d[p], pattern_probability(s, {p, n}), 1e-11) << "n=" << n << " pattern " << p;
    }
  }
}

TEST(FullDistribution, capacity) {
  const GaussianState s = state_from_theta(ThetaMatrix::zeros(5));
  EXPECT_THROW(full_distribution(s, 4), CapacityError);
  EXPECT_THROW(full_distribution(s, 21), ContractViolation);
}

TEST(FullDistribution, marginal_consistency) {
  std::mt19937_64 rng(13);
  const int n = 5;
  const GaussianState s = state_from_theta(random_theta(n, rng));
  const auto d = full_distribution(s);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::uint32_t p = 0; p < (1u << n); ++p) {
      if (!((p >> i) & 1u)) sum += d[p];
    }
    EXPECT_NEAR(sum, vacuum_marginal(s, 1u << i), 1e-9);
  }
}

TEST(FullDistribution, all_clicked_torontonian_identity) {
  std::mt19937_64 rng(21);
  const int n = 4;
  const GaussianState s = state_from_theta(random_theta(n, rng));
  const double tor = torontonian(s.o_matrix());
  EXPECT_GE(tor, 0.0);
  EXPECT_NEAR(tor, s.sqrt_det_sigma() * full_distribution(s)[(1u << n) - 1], 1e-10);
}

TEST(FullDistribution, permutation_covariance) {
  std::mt19937_64 rng(4);
  const int n = 5;
  for (int trial = 0; trial < 5; ++trial) {
    const ThetaMatrix theta = random_theta(n, rng);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd permuted(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) permuted(perm[i], perm[j]) = theta(i, j);
    }
    const auto d = full_distribution(state_from_theta(theta));
    const auto dp = full_distribution(state_from_theta(ThetaMatrix(permuted)));
    for (std::uint32_t p = 0; p < (1u << n); ++p) {
      std::uint32_t q = 0;
      for (int i = 0; i < n; ++i) {
        if ((p >> i) & 1u) q |= 1u << perm[i];
      }
      ASSERT_NEAR(d[p], dp[q], 1e-12);
    }
  }
}

TEST(Sample, vacuum_gives_all_zeros) {
  const auto shots = sample(state_from_theta(ThetaMatrix::zeros(3)), 50, 1);
  ASSERT_EQ(shots.size(), 50u);
  for (const auto& s : shots) EXPECT_EQ(s, (ClickPattern{0, 3}));
}

TEST(Sample, single_mode_click_rate) {
  const int k = 100000;
  const auto shots = sample(single_mode(1.0), k, 2024);
  const double p = 1.0 - 1.0 / std::cosh(1.0);
  const double clicks = static_cast<double>(std::count_if(shots.begin(), shots.end(), [](auto s) { return s.bits == 1; }));
  const double sigma = std::sqrt(k * p * (1.0 - p));
  EXPECT_LT(std::abs(clicks - k * p), 3.0 * sigma);
}

TEST(Sample, total_variation_to_exact) {
  std::mt19937_64 rng(404);
  const int n = 4;
  const GaussianState s = state_from_theta(random_theta(n, rng));
  const auto d = full_distribution(s);
  const int k = 100000;
  std::vector<double> counts(1u << n, 0.0);
  for (const auto& shot : sample(s, k, 7)) counts[shot.bits] += 1.0;
  double tv = 0.0;
  for (std::uint32_t p = 0; p < (1u << n); ++p) tv += std::abs(counts[p] / k - d[p]);
  EXPECT_LT(0.5 * tv, 0.01);
}

TEST(Sample, deterministic_per_seed) {
  std::mt19937_64 rng(1);
  const GaussianState s = state_from_theta(random_theta(4, rng));
  EXPECT_EQ(sample(s, 200, 99), sample(s, 200, 99));
  EXPECT_NE(sample(s, 200, 99), sample(s, 200, 100));
  EXPECT_THROW(sample(s, 0, 1), ContractViolation);
}
