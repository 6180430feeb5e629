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

// Photon-number ground truth for small pure Gaussian states, built without the
// covariance/Torontonian machinery. For real symmetric theta the state is
//   |psi> = det(cosh theta)^{-1/2} exp(1/2 sum_ij B_ij a_i^+ a_j^+) |0>,
//   B = tanh(theta),
// up to per-mode phases that do not change photon statistics. The
// coefficients g_n of exp(x^T B x / 2) obey
//   (n_k + 1) g_{n + e_k} = sum_j B_kj g_{n - e_j}
// and P(n) = g_n^2 n! / det(cosh theta).

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace gbs::testing {

class FockOracle {
 public:
  FockOracle(const Eigen::MatrixXd& theta, int cutoff) : n_(static_cast<int>(theta.rows())), cutoff_(cutoff) {
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n_, n_);
    const Eigen::MatrixXd e2 = (2.0 * theta).exp();
    const Eigen::MatrixXd b = (e2 - id) * (e2 + id).inverse();
    const Eigen::MatrixXd cosh = 0.5 * (theta.exp() + (-theta).exp());
    const double norm = cosh.determinant();

    const int side = cutoff_ + 1;
    std::size_t total = 1;
    for (int i = 0; i < n_; ++i) total *= static_cast<std::size_t>(side);
    probs_.assign(total, 0.0);
    std::vector<double> g(total, 0.0);
    g[0] = 1.0;

    std::vector<std::size_t> stride(n_);
    stride[n_ - 1] = 1;
    for (int i = n_ - 2; i >= 0; --i) stride[i] = stride[i + 1] * static_cast<std::size_t>(side);

    std::vector<int> occ(n_, 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rem = flat;
      for (int i = 0; i < n_; ++i) {
        occ[i] = static_cast<int>(rem / stride[i]);
        rem %= stride[i];
      }
      if (flat != 0) {
        int k = 0;
        while (occ[k] == 0) ++k;
        const std::size_t base = flat - stride[k];  // n = m - e_k
        double acc = 0.0;
        for (int j = 0; j < n_; ++j) {
          const int nj = occ[j] - (j == k ? 1 : 0);
          if (nj > 0) acc += b(k, j) * g[base - stride[j]];
        }
        g[flat] = acc / occ[k];
      }
      double factorial = 1.0;
      for (int i = 0; i < n_; ++i) factorial *= std::tgamma(occ[i] + 1.0);
      probs_[flat] = g[flat] * g[flat] * factorial / norm;
    }
    stride_ = stride;
  }

  /// P(click pattern) restricted to the truncated box.
  double pattern_probability(std::uint32_t clicks) const {
    double p = 0.0;
    for (std::size_t flat = 0; flat < probs_.size(); ++flat) {
      bool match = true;
      for (int i = 0; i < n_ && match; ++i) {
        const bool photon = (flat / stride_[i]) % static_cast<std::size_t>(cutoff_ + 1) != 0;
        match = photon == (((clicks >> i) & 1u) != 0);
      }
      if (match) p += probs_[flat];
    }
    return p;
  }

  /// Probability mass outside the truncated box.
  double truncation_loss() const {
    double s = 0.0;
    for (double p : probs_) s += p;
    return 1.0 - s;
  }

 private:
  int n_;
  int cutoff_;
  std::vector<double> probs_;
  std::vector<std::size_t> stride_;
};

}  // namespace gbs::testing
