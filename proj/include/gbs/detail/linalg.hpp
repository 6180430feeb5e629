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

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace gbs::detail {

/// Indices {i, i+n : bit i of modes set}, ascending within each half.
inline std::vector<int> quadrature_indices(std::uint32_t modes, int n) {
  std::vector<int> idx;
  for (int i = 0; i < n; ++i) {
    if (modes & (1u << i)) idx.push_back(i);
  }
  const auto half = idx.size();
  for (std::size_t k = 0; k < half; ++k) idx.push_back(idx[k] + n);
  return idx;
}

inline Eigen::MatrixXcd submatrix(const Eigen::MatrixXcd& m, const std::vector<int>& idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXcd out(k, k);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) out(r, c) = m(idx[r], idx[c]);
  }
  return out;
}

/// Determinant via partial-pivot LU; the empty matrix has determinant 1.
inline std::complex<double> determinant(const Eigen::MatrixXcd& m) {
  if (m.rows() == 0) return {1.0, 0.0};
  return m.partialPivLu().determinant();
}

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace gbs::detail
