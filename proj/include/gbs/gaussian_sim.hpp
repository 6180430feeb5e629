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

#include <Eigen/Dense>

namespace gbs {

/// Trainable N x N real symmetric parameter matrix of the squeezing network.
/// Symmetry is exact: entries(i, j) and entries(j, i) are the same double.
class ThetaMatrix {
 public:
  /// Throws ContractViolation when `entries` is empty, non-square,
  /// not exactly symmetric or contains non-finite values.
  explicit ThetaMatrix(Eigen::MatrixXd entries);

  static ThetaMatrix zeros(int n_modes);

  int n_modes() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

 private:
  Eigen::MatrixXd entries_;
};

/// theta = U diag(r) U^T with U unitary and r >= 0 sorted descending.
struct TakagiFactors {
  Eigen::MatrixXcd unitary;
  Eigen::VectorXd squeezings;

  int n_modes() const { return static_cast<int>(squeezings.size()); }
};

/// Takagi factorization of a real symmetric matrix. Eigendecomposition
/// theta = V diag(lambda) V^T, r_i = |lambda_i|, and the column of a negative
/// eigenvalue is multiplied by i so that (i)^2 restores the sign.
/// Ties in |lambda| keep ascending eigenvector order.
TakagiFactors takagi_decompose(const ThetaMatrix& theta);

/// Pure, zero-displacement Gaussian state in the complex (a, a^dagger)
/// ordering. The Husimi covariance of the vacuum is the identity.
class GaussianState {
 public:
  int n_modes() const { return n_modes_; }
  /// 2N x 2N Husimi covariance.
  const Eigen::MatrixXcd& sigma() const { return sigma_; }
  /// O = I - sigma^{-1}.
  const Eigen::MatrixXcd& o_matrix() const { return o_matrix_; }
  double sqrt_det_sigma() const { return sqrt_det_sigma_; }

  /// Builds a state directly from a covariance matrix (used for reduced
  /// states and tests). Throws InvalidStateError when sigma is singular or
  /// its determinant is not real positive.
  static GaussianState from_sigma(Eigen::MatrixXcd sigma);

 private:
  GaussianState() = default;

  int n_modes_ = 0;
  Eigen::MatrixXcd sigma_;
  Eigen::MatrixXcd o_matrix_;
  double sqrt_det_sigma_ = 1.0;
};

/// Squeezers r_i followed by the interferometer U:
///   sigma = 1/2 [[U C U^dag, U S U^T], [(U S U^T)^*, (U C U^dag)^*]] + I/2
/// with C = diag(cosh 2r), S = diag(sinh 2r).
GaussianState build_state(const TakagiFactors& factors);

/// Convenience: takagi_decompose followed by build_state.
GaussianState state_from_theta(const ThetaMatrix& theta);

/// Probability that no mode in `modes` clicks (other modes unconstrained):
/// 1 / sqrt(det sigma_(T)), sigma_(T) keeping rows/columns {i, i+N : i in T}.
/// Bit i of `modes` selects mode i; must be nonempty and within range.
double vacuum_marginal(const GaussianState& state, std::uint32_t modes);

}  // namespace gbs
