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

#include "gbs/gaussian_sim.hpp"

#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "gbs/errors.hpp"
#include "test_util.hpp"

using namespace gbs;
using gbs::testing::max_abs;
using gbs::testing::random_theta;

namespace {

Eigen::MatrixXcd reconstruct(const TakagiFactors& f) {
  const Eigen::VectorXcd r = f.squeezings.cast<std::complex<double>>();
  return f.unitary * r.asDiagonal() * f.unitary.transpose();
}

Eigen::MatrixXcd identity(Eigen::Index n) { return Eigen::MatrixXcd::Identity(n, n); }

}  // namespace

TEST(ThetaMatrix, rejects_asymmetric_and_nonfinite) {
  Eigen::MatrixXd m(2, 2);
  m << 0.1, 0.2, 0.3, 0.4;
  EXPECT_THROW(ThetaMatrix{m}, ContractViolation);
  m(1, 0) = 0.2;
  m(0, 0) = std::nan("");
  EXPECT_THROW(ThetaMatrix{m}, ContractViolation);
  EXPECT_THROW(ThetaMatrix{Eigen::MatrixXd(0, 0)}, ContractViolation);
  EXPECT_THROW(ThetaMatrix{Eigen::MatrixXd::Zero(2, 3)}, ContractViolation);
}

TEST(Takagi, zero_matrix) {
  const auto f = takagi_decompose(ThetaMatrix::zeros(2));
  EXPECT_EQ(f.squeezings, Eigen::VectorXd::Zero(2));
  EXPECT_EQ(max_abs(f.unitary - identity(2)), 0.0);
}

TEST(Takagi, diagonal_with_negative_entry) {
  Eigen::MatrixXd m = Eigen::Vector2d(0.5, -0.3).asDiagonal();
  const auto f = takagi_decompose(ThetaMatrix(m));
  EXPECT_DOUBLE_EQ(f.squeezings[0], 0.5);
  EXPECT_DOUBLE_EQ(f.squeezings[1], 0.3);
  EXPECT_LT(max_abs(reconstruct(f) - m.cast<std::complex<double>>()), 1e-15);
  EXPECT_EQ(f.unitary(1, 1), std::complex<double>(0.0, 1.0));
}

TEST(Takagi, random_4x4_postconditions) {
  std::mt19937_64 rng(11);
  const ThetaMatrix theta = random_theta(4, rng);
  const auto f = takagi_decompose(theta);
  EXPECT_LT(max_abs(reconstruct(f) - theta.entries().cast<std::complex<double>>()), 1e-10);
  EXPECT_LT(max_abs(f.unitary.adjoint() * f.unitary - identity(4)), 1e-10);
  for (int i = 0; i < 4; ++i) {
    EXPECT_GE(f.squeezings[i], 0.0);
    if (i > 0) EXPECT_GE(f.squeezings[i - 1], f.squeezings[i]);
  }
}

TEST(Takagi, equal_magnitudes_keep_eigenvector_order) {
  // Eigenvalues -0.4 and 0.4 tie in magnitude; -0.4 comes first from the solver.
  Eigen::MatrixXd m(2, 2);
  m << 0.0, 0.4, 0.4, 0.0;
  const auto f = takagi_decompose(ThetaMatrix(m));
  EXPECT_NEAR(f.squeezings[0], 0.4, 1e-15);
  EXPECT_NEAR(f.squeezings[1], 0.4, 1e-15);
  // First column carries the phase of the negative eigenvalue.
  EXPECT_NEAR(f.unitary.col(0).real().norm(), 0.0, 1e-15);
  EXPECT_NEAR(f.unitary.col(1).imag().norm(), 0.0, 1e-15);
}

TEST(Takagi, round_trip_property) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(1, 8);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = size(rng);
    const ThetaMatrix theta = random_theta(n, rng, -2.0, 2.0);
    const auto f = takagi_decompose(theta);
    ASSERT_LT(max_abs(reconstruct(f) - theta.entries().cast<std::complex<double>>()), 1e-10);
    ASSERT_LT(max_abs(f.unitary.adjoint() * f.unitary - identity(n)), 1e-10);
  }
}

TEST(BuildState, vacuum) {
  std::mt19937_64 rng(3);
  const ThetaMatrix theta = random_theta(3, rng);
  TakagiFactors f = takagi_decompose(theta);
  f.squeezings.setZero();
  const GaussianState s = build_state(f);
  EXPECT_LT(max_abs(s.sigma() - identity(6)), 1e-14);
  EXPECT_LT(max_abs(s.o_matrix()), 1e-14);
  EXPECT_NEAR(s.sqrt_det_sigma(), 1.0, 1e-14);
}

TEST(BuildState, single_mode_closed_form) {
  const double r = 1.0;
  Eigen::MatrixXd m(1, 1);
  m << r;
  const GaussianState s = state_from_theta(ThetaMatrix(m));
  const double c = std::cosh(r);
  const double sh = std::sinh(r);
  Eigen::MatrixXcd sigma(2, 2);
  sigma << c * c, sh * c, sh * c, c * c;
  Eigen::MatrixXcd o(2, 2);
  o << 0.0, std::tanh(r), std::tanh(r), 0.0;
  EXPECT_LT(max_abs(s.sigma() - sigma), 1e-13);
  EXPECT_LT(max_abs(s.o_matrix() - o), 1e-13);
  EXPECT_NEAR(s.sqrt_det_sigma(), c, 1e-13);
}

TEST(BuildState, pure_state_block_structure) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 6;
    const auto f = takagi_decompose(random_theta(n, rng));
    const GaussianState s = build_state(f);
    const Eigen::VectorXcd t = f.squeezings.array().tanh().matrix().cast<std::complex<double>>();
    const Eigen::MatrixXcd b = f.unitary * t.asDiagonal() * f.unitary.transpose();
    ASSERT_LT(max_abs(s.o_matrix().topLeftCorner(n, n)), 1e-8);
    ASSERT_LT(max_abs(s.o_matrix().topRightCorner(n, n) - b), 1e-8);
    ASSERT_LT(max_abs(s.o_matrix().bottomLeftCorner(n, n) - b.conjugate()), 1e-8);
  }
}

TEST(BuildState, determinant_and_positivity) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 6;
    const auto f = takagi_decompose(random_theta(n, rng, -1.5, 1.5));
    const GaussianState s = build_state(f);
    double expected = 1.0;
    for (int i = 0; i < n; ++i) expected *= std::cosh(f.squeezings[i]);
    ASSERT_NEAR(s.sqrt_det_sigma() / expected, 1.0, 1e-9);
    ASSERT_LT(max_abs(s.sigma() - s.sigma().adjoint()), 1e-10);
    // Husimi positivity in this convention: sigma - I/2 >= 0 and the
    // uncertainty bound sigma - diag(I, 0) >= 0, sigma - diag(0, I) >= 0.
    using Solver = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>;
    ASSERT_GE(Solver(s.sigma()).eigenvalues().minCoeff(), 0.5 - 1e-10);
    Eigen::MatrixXcd upper = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    upper.topLeftCorner(n, n).setIdentity();
    Eigen::MatrixXcd lower = Eigen::MatrixXcd::Identity(2 * n, 2 * n) - upper;
    ASSERT_GE(Solver(s.sigma() - upper).eigenvalues().minCoeff(), -1e-10);
    ASSERT_GE(Solver(s.sigma() - lower).eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(BuildState, singular_covariance_is_rejected) {
  EXPECT_THROW(GaussianState::from_sigma(Eigen::MatrixXcd::Zero(2, 2)), InvalidStateError);
}

TEST(VacuumMarginal, vacuum_and_single_mode) {
  const GaussianState vac = state_from_theta(ThetaMatrix::zeros(3));
  EXPECT_DOUBLE_EQ(vacuum_marginal(vac, 0b101), 1.0);

  Eigen::MatrixXd m(1, 1);
  m << 1.0;
  const GaussianState s = state_from_theta(ThetaMatrix(m));
  EXPECT_NEAR(vacuum_marginal(s, 0b1), 1.0 / std::cosh(1.0), 1e-13);
  EXPECT_NEAR(vacuum_marginal(s, 0b1), 0.648054, 1e-6);
}

TEST(VacuumMarginal, rejects_empty_and_out_of_range) {
  const GaussianState vac = state_from_theta(ThetaMatrix::zeros(2));
  EXPECT_THROW(vacuum_marginal(vac, 0), ContractViolation);
  EXPECT_THROW(vacuum_marginal(vac, 0b100), ContractViolation);
}

TEST(VacuumMarginal, monotone_in_mode_set) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5;
    const GaussianState s = state_from_theta(random_theta(n, rng));
    for (std::uint32_t t = 1; t < (1u << n); ++t) {
      for (std::uint32_t sup = t; sup < (1u << n); sup = (sup + 1) | t) {
        ASSERT_GE(vacuum_marginal(s, t) + 1e-14, vacuum_marginal(s, sup));
      }
    }
  }
}
