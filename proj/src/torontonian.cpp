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
#include <bit>
#include <cmath>
#include <random>
#include <unordered_map>

#include <fmt/format.h>

#include "gbs/detail/linalg.hpp"
#include "gbs/errors.hpp"

namespace gbs {

namespace {

constexpr double kNegativeClamp = 1e-12;
constexpr double kConditionalSlack = 1e-9;
constexpr double kDetImagTolerance = 1e-8;

double clamp_probability(double p) {
  if (p < -kNegativeClamp) {
    throw InvalidStateError(fmt::format("negative probability {:.3e}", p));
  }
  return p < 0.0 ? 0.0 : p;
}

double inverse_sqrt_det(const Eigen::MatrixXcd& m) {
  const std::complex<double> det = detail::determinant(m);
  if (!(det.real() > 0.0) || std::abs(det.imag()) > kDetImagTolerance * std::abs(det.real())) {
    throw InvalidStateError(
        fmt::format("subset determinant ({}, {}) is not real positive", det.real(), det.imag()));
  }
  return 1.0 / std::sqrt(det.real());
}

// Uniform double in [0, 1) from the top 53 bits.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

int ClickPattern::clicks() const { return std::popcount(bits); }

std::string ClickPattern::to_string() const {
  std::string s(static_cast<std::size_t>(n_modes), '0');
  for (int i = 0; i < n_modes; ++i) {
    if (clicked(i)) s[static_cast<std::size_t>(i)] = '1';
  }
  return s;
}

ClickPattern ClickPattern::from_string(const std::string& s) {
  if (s.size() > 32) throw ContractViolation("click pattern longer than 32 modes");
  ClickPattern p{0, static_cast<int>(s.size())};
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1') {
      p.bits |= 1u << i;
    } else if (s[i] != '0') {
      throw ContractViolation(fmt::format("invalid click pattern '{}'", s));
    }
  }
  return p;
}

double PatternDistribution::total() const {
  detail::CompensatedSum sum;
  for (double p : probs) sum.add(p);
  return sum.value();
}

double torontonian(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols() || a.rows() % 2 != 0) {
    throw ContractViolation("torontonian needs a square matrix of even dimension");
  }
  const int n = static_cast<int>(a.rows() / 2);
  if (n > kHardEnumerationCap) throw CapacityError(fmt::format("torontonian of size {} is over the cap", n));
  const Eigen::MatrixXcd id_minus_a = Eigen::MatrixXcd::Identity(a.rows(), a.cols()) - a;

  detail::CompensatedSum sum;
  const std::uint32_t subsets = 1u << n;
  for (std::uint32_t z = 0; z < subsets; ++z) {
    const double term = inverse_sqrt_det(detail::submatrix(id_minus_a, detail::quadrature_indices(z, n)));
    sum.add(((n - std::popcount(z)) % 2 == 0) ? term : -term);
  }
  return sum.value();
}

double pattern_probability(const GaussianState& state, ClickPattern pattern) {
  if (pattern.n_modes != state.n_modes()) {
    throw ContractViolation(
        fmt::format("pattern has {} modes, state has {}", pattern.n_modes, state.n_modes()));
  }
  const auto idx = detail::quadrature_indices(pattern.bits, state.n_modes());
  const double tor = torontonian(detail::submatrix(state.o_matrix(), idx));
  return clamp_probability(tor / state.sqrt_det_sigma());
}

PatternDistribution full_distribution(const GaussianState& state, int cap) {
  if (cap > kHardEnumerationCap) {
    throw ContractViolation(fmt::format("enumeration cap {} exceeds hard cap {}", cap, kHardEnumerationCap));
  }
  const int n = state.n_modes();
  if (n > cap) {
    throw CapacityError(
        fmt::format("full distribution over {} modes exceeds the enumeration cap {}; use sample()", n, cap));
  }
  const std::uint32_t full = (1u << n) - 1u;
  PatternDistribution dist{n, std::vector<double>(std::size_t{1} << n)};

  // f(Z) = P(no click outside Z) = p_vac(complement of Z).
  for (std::uint32_t z = 0; z <= full; ++z) {
    const std::uint32_t vac = full & ~z;
    dist.probs[z] = vac == 0 ? 1.0
                             : inverse_sqrt_det(detail::submatrix(state.sigma(), detail::quadrature_indices(vac, n)));
  }
  // p(S) = sum_{Z subset S} (-1)^{|S \ Z|} f(Z), as an in-place subset transform.
  for (int bit = 0; bit < n; ++bit) {
    const std::uint32_t m = 1u << bit;
    for (std::uint32_t s = 0; s <= full; ++s) {
      if (s & m) dist.probs[s] -= dist.probs[s ^ m];
    }
  }
  for (double& p : dist.probs) p = clamp_probability(p);
  return dist;
}

std::vector<ClickPattern> sample(const GaussianState& state, int k, std::uint64_t seed) {
  if (k < 1) throw ContractViolation("sample count must be at least 1");
  const int n = state.n_modes();
  if (n > 31) throw CapacityError("sampler supports at most 31 modes");

  // Reduced states on modes [0, j) for j = 1..n.
  std::vector<GaussianState> reduced;
  reduced.reserve(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) {
    const auto idx = detail::quadrature_indices((1u << j) - 1u, n);
    reduced.push_back(GaussianState::from_sigma(detail::submatrix(state.sigma(), idx)));
  }

  std::unordered_map<std::uint64_t, double> cache;
  auto marginal = [&](int len, std::uint32_t bits) {
    const std::uint64_t key = (static_cast<std::uint64_t>(len) << 32) | bits;
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    const GaussianState& r = reduced[static_cast<std::size_t>(len - 1)];
    const auto idx = detail::quadrature_indices(bits, len);
    const double m = clamp_probability(torontonian(detail::submatrix(r.o_matrix(), idx)) / r.sqrt_det_sigma());
    cache.emplace(key, m);
    return m;
  };

  std::mt19937_64 rng(seed);
  std::vector<ClickPattern> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int shot = 0; shot < k; ++shot) {
    std::uint32_t bits = 0;
    double prefix = 1.0;
    for (int j = 0; j < n; ++j) {
      const double no_click = marginal(j + 1, bits);
      double cond = prefix > 0.0 ? no_click / prefix : 1.0;
      if (cond < -kConditionalSlack || cond > 1.0 + kConditionalSlack) {
        throw InvalidStateError(fmt::format("conditional probability {} out of range at mode {}", cond, j));
      }
      cond = std::clamp(cond, 0.0, 1.0);
      if (uniform01(rng) < cond) {
        prefix = no_click;
      } else {
        bits |= 1u << j;
        prefix = marginal(j + 1, bits);
      }
    }
    out.push_back(ClickPattern{bits, n});
  }
  return out;
}

}  // namespace gbs
