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

#include <functional>
#include <span>
#include <vector>

namespace gbs {

using Objective = std::function<double(std::span<const double>)>;

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  int n_evals = 0;
};

struct LinearApproxOptions {
  double rho_begin = 0.05;
  double rho_end = 1e-6;
  int max_evals = 100;
};

/// Derivative-free minimization by linear approximation over a simplex of
/// n + 1 interpolation points, in the style of Powell's COBYLA without
/// constraints. Each iteration fits the linear model through the simplex,
/// steps to its minimizer on the trust sphere of radius rho and swaps the
/// trial point into the simplex. rho only shrinks, from rho_begin down to
/// rho_end. Stops after max_evals objective calls or when rho reaches rho_end.
MinimizeResult minimize_linear_approx(const Objective& f, std::vector<double> x0, const LinearApproxOptions& opts);

struct AdamOptions {
  double learning_rate = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int steps = 500;
  double fd_step = 1e-5;
  /// Called with the objective value at each iterate (not the gradient probes).
  std::function<void(double)> on_iterate;
};

/// ADAM on central finite-difference gradients. Returns the best point seen.
MinimizeResult minimize_adam(const Objective& f, std::vector<double> x0, const AdamOptions& opts);

/// (f(x + h e_k) - f(x - h e_k)) / 2h for every coordinate.
std::vector<double> central_difference_gradient(const Objective& f, std::span<const double> x, double h);

}  // namespace gbs
