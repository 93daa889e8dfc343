// Copyright 2026 The adsdp Authors
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

// Slow, independent reference solvers used to check the production code.

#ifndef ADSDP_TESTS_ORACLES_HPP_
#define ADSDP_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace adsdp::oracle {

// Weighted variance of a diagonal strategy that gives day i the budget share
// p_i: t_i = r_i^2 / (2 rho p_i), value sum_i a_i t_i.
inline double share_objective(const std::vector<double>& a, const std::vector<double>& r,
                              double rho, const std::vector<double>& p) {
  double v = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) v += a[i] * r[i] * r[i] / (2.0 * rho * p[i]);
  return v;
}

// Exponentiated-gradient descent on the budget simplex.
inline double mirror_descent_min(const std::vector<double>& a, const std::vector<double>& r,
                                 double rho, int iterations = 20000) {
  const std::size_t n = a.size();
  std::vector<double> p(n, 1.0 / static_cast<double>(n));
  double best = share_objective(a, r, rho, p);
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> g(n);
    double gmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = -a[i] * r[i] * r[i] / (2.0 * rho * p[i] * p[i]);
      gmax = std::max(gmax, std::abs(g[i]));
    }
    const double eta = 0.5 / gmax;
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] *= std::exp(-eta * g[i]);
      z += p[i];
    }
    for (double& x : p) x /= z;
    best = std::min(best, share_objective(a, r, rho, p));
  }
  return best;
}

// Coordinate descent that moves budget between one pair of days at a time,
// each move a golden-section line search.
inline double pairwise_transfer_min(const std::vector<double>& a, const std::vector<double>& r,
                                    double rho, int sweeps = 200) {
  const std::size_t n = a.size();
  std::vector<double> p(n, 1.0 / static_cast<double>(n));
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double total = p[i] + p[j];
        auto f = [&](double x) {
          auto q = p;
          q[i] = x;
          q[j] = total - x;
          return share_objective(a, r, rho, q);
        };
        double lo = total * 1e-12;
        double hi = total - lo;
        for (int k = 0; k < 100; ++k) {
          const double m1 = hi - g * (hi - lo);
          const double m2 = lo + g * (hi - lo);
          if (f(m1) < f(m2)) {
            hi = m2;
          } else {
            lo = m1;
          }
        }
        p[i] = 0.5 * (lo + hi);
        p[j] = total - p[i];
      }
    }
  }
  return share_objective(a, r, rho, p);
}

// Two-day minimum of r1^2/t1 + r2^2/t2 subject to A t <= v with A = Q.^2.
// For fixed t1 the best t2 is the largest feasible one; the remaining 1-D
// problem is scanned on a log grid and refined by golden section.
inline double two_day_min_budget(const Eigen::MatrixXd& q, const Eigen::VectorXd& v,
                                 double r1, double r2) {
  const Eigen::MatrixXd a = q.array().square().matrix();
  auto t2_max = [&](double t1) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < a.rows(); ++j) {
      const double rem = v(j) - a(j, 0) * t1;
      if (a(j, 1) > 0.0) {
        best = std::min(best, rem / a(j, 1));
      } else if (rem < 0.0) {
        return -1.0;
      }
    }
    return best;
  };
  auto f = [&](double t1) {
    const double t2 = t2_max(t1);
    if (!(t2 > 0.0)) return std::numeric_limits<double>::infinity();
    return r1 * r1 / t1 + r2 * r2 / t2;
  };
  double hi_t1 = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < a.rows(); ++j) {
    if (a(j, 0) > 0.0) hi_t1 = std::min(hi_t1, v(j) / a(j, 0));
  }
  const int grid = 4000;
  double best_x = hi_t1 * 0.5;
  double best = f(best_x);
  for (int k = 1; k < grid; ++k) {
    const double x = hi_t1 * std::pow(10.0, -8.0 * (1.0 - static_cast<double>(k) / grid));
    if (f(x) < best) {
      best = f(x);
      best_x = x;
    }
  }
  double lo = best_x / 1.01;
  double hi = std::min(best_x * 1.01, hi_t1);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int k = 0; k < 200; ++k) {
    const double m1 = hi - g * (hi - lo);
    const double m2 = lo + g * (hi - lo);
    if (f(m1) < f(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return std::min(best, f(0.5 * (lo + hi)));
}

}  // namespace adsdp::oracle

#endif  // ADSDP_TESTS_ORACLES_HPP_
