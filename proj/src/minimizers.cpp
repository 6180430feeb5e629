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

#include "gbs/minimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "gbs/errors.hpp"

namespace gbs {

namespace {

// Simplex acceptability thresholds relative to rho (Powell's alpha, beta, gamma).
constexpr double kMinFaceDistance = 0.25;
constexpr double kMaxVertexDistance = 2.1;
constexpr double kGeometryStep = 0.5;
constexpr double kPoorRatio = 0.1;

double call(const Objective& f, const Eigen::VectorXd& x) {
  return f(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

// NaN compares as worse than anything.
bool better(double a, double b) { return a < b || (std::isnan(b) && !std::isnan(a)); }

}  // namespace

MinimizeResult minimize_linear_approx(const Objective& f, std::vector<double> x0, const LinearApproxOptions& opts) {
  if (opts.max_evals < 1) throw ContractViolation("max_evals must be at least 1");
  if (!(opts.rho_begin > 0.0) || !(opts.rho_end > 0.0) || opts.rho_end > opts.rho_begin) {
    throw ContractViolation("trust radii must satisfy 0 < rho_end <= rho_begin");
  }
  const auto n = static_cast<Eigen::Index>(x0.size());
  int evals = 0;
  auto evaluate = [&](const Eigen::VectorXd& x) {
    ++evals;
    return call(f, x);
  };

  std::vector<Eigen::VectorXd> pts;
  std::vector<double> fv;
  pts.push_back(Eigen::Map<const Eigen::VectorXd>(x0.data(), n));
  fv.push_back(evaluate(pts[0]));

  double rho = opts.rho_begin;
  for (Eigen::Index k = 0; k < n && evals < opts.max_evals; ++k) {
    Eigen::VectorXd x = pts[0];
    x[k] += rho;
    pts.push_back(x);
    fv.push_back(evaluate(x));
  }

  auto best_index = [&] {
    std::size_t best = 0;
    for (std::size_t k = 1; k < fv.size(); ++k) {
      if (better(fv[k], fv[best])) best = k;
    }
    return best;
  };

  while (n > 0 && static_cast<Eigen::Index>(pts.size()) == n + 1 && evals < opts.max_evals) {
    const std::size_t best = best_index();
    const Eigen::VectorXd& xb = pts[best];

    // Columns of `dirs` are the other vertices relative to the best one.
    std::vector<std::size_t> vertex;
    Eigen::MatrixXd dirs(n, n);
    Eigen::VectorXd df(n);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (k == best) continue;
      const auto c = static_cast<Eigen::Index>(vertex.size());
      dirs.col(c) = pts[k] - xb;
      df[c] = fv[k] - fv[best];
      vertex.push_back(k);
    }

    const Eigen::FullPivLU<Eigen::MatrixXd> lu(dirs);
    if (!lu.isInvertible() || !df.allFinite()) {
      // Degenerate simplex or non-finite values: rebuild around the best point.
      Eigen::Index axis = 0;
      for (std::size_t k : vertex) {
        if (evals >= opts.max_evals) break;
        Eigen::VectorXd x = xb;
        x[axis++] += rho;
        pts[k] = x;
        fv[k] = evaluate(x);
      }
      continue;
    }
    const Eigen::MatrixXd inv = lu.inverse();
    const Eigen::VectorXd grad = inv.transpose() * df;

    // Geometry: every vertex within 2.1 rho, every face distance above 0.25 rho.
    Eigen::Index repair = -1;
    double worst_dist = kMaxVertexDistance * rho;
    for (Eigen::Index c = 0; c < n; ++c) {
      const double d = dirs.col(c).norm();
      if (d > worst_dist) {
        worst_dist = d;
        repair = c;
      }
    }
    if (repair < 0) {
      double worst_face = kMinFaceDistance * rho;
      for (Eigen::Index c = 0; c < n; ++c) {
        const double face = 1.0 / inv.row(c).norm();
        if (face < worst_face) {
          worst_face = face;
          repair = c;
        }
      }
    }
    if (repair >= 0) {
      Eigen::VectorXd v = inv.row(repair).transpose().normalized();
      if (grad.dot(v) > 0.0) v = -v;
      const Eigen::VectorXd x = xb + kGeometryStep * rho * v;
      const std::size_t k = vertex[static_cast<std::size_t>(repair)];
      pts[k] = x;
      fv[k] = evaluate(x);
      continue;
    }

    const double gnorm = grad.norm();
    bool poor = true;
    if (gnorm > 0.0 && std::isfinite(gnorm)) {
      const Eigen::VectorXd step = -rho / gnorm * grad;
      const Eigen::VectorXd xt = xb + step;
      const double ft = evaluate(xt);
      const double ratio = (fv[best] - ft) / (rho * gnorm);
      poor = !(ratio >= kPoorRatio);

      const Eigen::VectorXd coeff = inv * step;
      Eigen::Index drop = 0;
      double score = -1.0;
      for (Eigen::Index c = 0; c < n; ++c) {
        const double s = std::abs(coeff[c]) * std::max(1.0, (pts[vertex[c]] - xt).norm() / rho);
        if (s > score) {
          score = s;
          drop = c;
        }
      }
      if (better(ft, fv[best]) || score > 1.0) {
        pts[vertex[drop]] = xt;
        fv[vertex[drop]] = ft;
      }
    }
    if (poor) {
      if (rho <= opts.rho_end) break;
      rho *= 0.5;
      if (rho <= 3.0 * opts.rho_end) rho = opts.rho_end;
    }
  }

  const std::size_t best = best_index();
  return {std::vector<double>(pts[best].data(), pts[best].data() + n), fv[best], evals};
}

std::vector<double> central_difference_gradient(const Objective& f, std::span<const double> x, double h) {
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    probe[k] = x[k] + h;
    const double up = f(probe);
    probe[k] = x[k] - h;
    const double down = f(probe);
    probe[k] = x[k];
    grad[k] = (up - down) / (2.0 * h);
  }
  return grad;
}

MinimizeResult minimize_adam(const Objective& f, std::vector<double> x0, const AdamOptions& opts) {
  if (opts.steps < 0) throw ContractViolation("adam steps must be nonnegative");
  int evals = 0;
  const Objective counted = [&](std::span<const double> x) {
    ++evals;
    return f(x);
  };

  const std::size_t n = x0.size();
  std::vector<double> x = std::move(x0);
  std::vector<double> m(n, 0.0);
  std::vector<double> v(n, 0.0);
  MinimizeResult best{x, std::numeric_limits<double>::quiet_NaN(), 0};

  auto track = [&](double fx) {
    if (opts.on_iterate) opts.on_iterate(fx);
    if (better(fx, best.value)) {
      best.value = fx;
      best.x = x;
    }
  };

  double b1t = 1.0;
  double b2t = 1.0;
  for (int t = 0; t < opts.steps; ++t) {
    track(counted(x));
    const std::vector<double> g = central_difference_gradient(counted, x, opts.fd_step);
    b1t *= opts.beta1;
    b2t *= opts.beta2;
    for (std::size_t k = 0; k < n; ++k) {
      m[k] = opts.beta1 * m[k] + (1.0 - opts.beta1) * g[k];
      v[k] = opts.beta2 * v[k] + (1.0 - opts.beta2) * g[k] * g[k];
      const double m_hat = m[k] / (1.0 - b1t);
      const double v_hat = v[k] / (1.0 - b2t);
      x[k] -= opts.learning_rate * m_hat / (std::sqrt(v_hat) + opts.epsilon);
    }
  }
  track(counted(x));
  best.n_evals = evals;
  return best;
}

}  // namespace gbs
