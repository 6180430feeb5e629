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

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "gbs/detail/linalg.hpp"
#include "gbs/errors.hpp"

namespace gbs {

namespace {

constexpr double kDetImagTolerance = 1e-8;

double real_positive_det(const Eigen::MatrixXcd& m, const char* what) {
  const std::complex<double> det = detail::determinant(m);
  if (!(det.real() > 0.0) || std::abs(det.imag()) > kDetImagTolerance * std::abs(det.real())) {
    throw InvalidStateError(
        fmt::format("{}: determinant ({}, {}) is not real positive", what, det.real(), det.imag()));
  }
  return det.real();
}

bool is_diagonal(const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i != j && m(i, j) != 0.0) return false;
    }
  }
  return true;
}

}  // namespace

ThetaMatrix::ThetaMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.rows() != entries_.cols()) {
    throw ContractViolation(
        fmt::format("theta must be a nonempty square matrix, got {}x{}", entries_.rows(), entries_.cols()));
  }
  if (!entries_.allFinite()) throw ContractViolation("theta has non-finite entries");
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < entries_.cols(); ++j) {
      if (entries_(i, j) != entries_(j, i)) {
        throw ContractViolation(fmt::format("theta is not symmetric at ({}, {})", i, j));
      }
    }
  }
}

ThetaMatrix ThetaMatrix::zeros(int n_modes) {
  return ThetaMatrix(Eigen::MatrixXd::Zero(n_modes, n_modes));
}

TakagiFactors takagi_decompose(const ThetaMatrix& theta) {
  const int n = theta.n_modes();
  Eigen::VectorXd lambda(n);
  Eigen::MatrixXd vectors(n, n);
  if (is_diagonal(theta.entries())) {
    lambda = theta.entries().diagonal();
    vectors.setIdentity();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(theta.entries());
    if (solver.info() != Eigen::Success) throw InvalidStateError("eigendecomposition of theta failed");
    lambda = solver.eigenvalues();
    vectors = solver.eigenvectors();
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return std::abs(lambda[a]) > std::abs(lambda[b]); });

  TakagiFactors out{Eigen::MatrixXcd(n, n), Eigen::VectorXd(n)};
  for (int k = 0; k < n; ++k) {
    const int src = order[k];
    const std::complex<double> phase = lambda[src] >= 0.0 ? std::complex<double>(1.0, 0.0)
                                                          : std::complex<double>(0.0, 1.0);
    out.squeezings[k] = std::abs(lambda[src]);
    out.unitary.col(k) = vectors.col(src).cast<std::complex<double>>() * phase;
  }
  return out;
}

GaussianState GaussianState::from_sigma(Eigen::MatrixXcd sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() % 2 != 0) {
    throw ContractViolation("covariance must be square with even dimension");
  }
  GaussianState state;
  state.n_modes_ = static_cast<int>(sigma.rows() / 2);
  const double det = real_positive_det(sigma, "covariance");
  const auto lu = sigma.fullPivLu();
  if (!lu.isInvertible()) throw InvalidStateError("covariance is numerically singular");
  const auto dim = sigma.rows();
  state.o_matrix_ = Eigen::MatrixXcd::Identity(dim, dim) - lu.inverse();
  state.sqrt_det_sigma_ = std::sqrt(det);
  state.sigma_ = std::move(sigma);
  return state;
}

GaussianState build_state(const TakagiFactors& factors) {
  const int n = factors.n_modes();
  const Eigen::MatrixXcd& u = factors.unitary;
  const Eigen::VectorXd two_r = 2.0 * factors.squeezings;
  const Eigen::VectorXcd c = two_r.array().cosh().matrix().cast<std::complex<double>>();
  const Eigen::VectorXcd s = two_r.array().sinh().matrix().cast<std::complex<double>>();

  const Eigen::MatrixXcd ucu = u * c.asDiagonal() * u.adjoint();
  const Eigen::MatrixXcd usu = u * s.asDiagonal() * u.transpose();

  Eigen::MatrixXcd sigma(2 * n, 2 * n);
  sigma.topLeftCorner(n, n) = ucu;
  sigma.topRightCorner(n, n) = usu;
  sigma.bottomLeftCorner(n, n) = usu.conjugate();
  sigma.bottomRightCorner(n, n) = ucu.conjugate();
  sigma = 0.5 * sigma + 0.5 * Eigen::MatrixXcd::Identity(2 * n, 2 * n);
  // Round-off makes the two Hermitian halves differ at 1e-17; restore exactly.
  sigma = (0.5 * (sigma + sigma.adjoint())).eval();
  return GaussianState::from_sigma(std::move(sigma));
}

GaussianState state_from_theta(const ThetaMatrix& theta) {
  return build_state(takagi_decompose(theta));
}

double vacuum_marginal(const GaussianState& state, std::uint32_t modes) {
  const int n = state.n_modes();
  if (modes == 0) throw ContractViolation("vacuum_marginal needs a nonempty mode set");
  if (n < 32 && (modes >> n) != 0) throw ContractViolation("vacuum_marginal mode index out of range");
  const auto idx = detail::quadrature_indices(modes, n);
  const double det = real_positive_det(detail::submatrix(state.sigma(), idx), "reduced covariance");
  return 1.0 / std::sqrt(det);
}

}  // namespace gbs
