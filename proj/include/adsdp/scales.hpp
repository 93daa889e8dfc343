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

// Initial per-day noise scales for independent Gaussian noise.
//
// Two calibration problems are supported, both over the per-day variances
// t_i = sigma_i^2 of a diagonal strategy:
//
//  * weighted variance sum under a budget:
//        min sum_i a_i t_i   s.t.  sum_i r_i^2 / t_i <= 2 rho,
//    with a_i = sum_j gamma_j^2 Q[j,i]^2. Closed form by Cauchy-Schwarz:
//        t_i = (r_i / sqrt(a_i)) * (sum_k r_k sqrt(a_k)) / (2 rho).
//
//  * minimum budget under per-query variance caps:
//        min sum_i r_i^2 / t_i   s.t.  sum_i Q[j,i]^2 t_i <= v_j,
//    solved with a primal log-barrier Newton method whose duality gap is
//    certified by the Lagrange dual
//        g(mu) = sum_i 2 r_i sqrt((A^T mu)_i) - mu^T v,  A = Q .* Q.
//
// Days that no query reads get effectively infinite noise: together they
// consume kDegenerateShare * rho of the budget.

#ifndef ADSDP_SCALES_HPP_
#define ADSDP_SCALES_HPP_

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "adsdp/accounting.hpp"
#include "adsdp/workload.hpp"

namespace adsdp {

inline constexpr double kDegenerateShare = 1e-9;

enum class ScaleObjective { kWeightedVarianceSum, kMinBudgetUnderVarianceCaps };

struct ScalePlan {
  std::vector<double> sigma_bar;
  std::vector<double> r_bar;
  ScaleObjective objective = ScaleObjective::kWeightedVarianceSum;
  Budget rho1{1.0};
  // Weighted variance sum (first objective) or the budget before rescaling
  // to rho1 (second objective).
  double objective_value = 0.0;

  std::size_t days() const { return sigma_bar.size(); }
};

// sigma_i = sigma_bar_i / r_bar_i * r_i. Keeps r_i / sigma_i, and so the
// budget, fixed.
inline double rescale(double sigma_bar, double r_bar, double r) {
  if (!(r_bar > 0.0)) throw std::domain_error("r_bar must be positive");
  return sigma_bar / r_bar * r;
}

// a_i = sum_j gamma_j^2 Q[j,i]^2.
inline Eigen::VectorXd cauchy_coefficients(const QueryWorkload& w) {
  return (w.queries.array().square().colwise() * w.gamma.array().square())
      .colwise()
      .sum()
      .transpose();
}

namespace detail {

inline void check_bounds(const std::vector<double>& r_bar, Eigen::Index n) {
  if (static_cast<Eigen::Index>(r_bar.size()) != n) {
    throw std::invalid_argument("one r_bar per day required");
  }
  for (double r : r_bar) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw std::domain_error("r_bar entries must be positive and finite");
    }
  }
}

// Gives degenerate days their share of rho1 and returns the remainder for
// the active days.
inline double assign_degenerate(const std::vector<bool>& active,
                                const std::vector<double>& r_bar, double rho1,
                                std::vector<double>& sigma) {
  std::size_t degenerate = 0;
  for (bool a : active) degenerate += a ? 0 : 1;
  if (degenerate == 0) return rho1;
  const bool all = degenerate == active.size();
  const double pool = all ? rho1 : kDegenerateShare * rho1;
  const double per_day = pool / static_cast<double>(degenerate);
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (!active[i]) sigma[i] = r_bar[i] / std::sqrt(2.0 * per_day);
  }
  return rho1 - pool;
}

}  // namespace detail

// Closed-form minimiser of the weighted variance sum at budget rho1.
inline ScalePlan init_privacy_constrained(const QueryWorkload& w,
                                          const std::vector<double>& r_bar,
                                          Budget rho1) {
  const Eigen::Index n = w.days();
  detail::check_bounds(r_bar, n);
  const Eigen::VectorXd a = cauchy_coefficients(w);

  std::vector<bool> active(n);
  std::vector<double> sigma(n, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) active[i] = a(i) > 0.0;
  const double rho_active =
      detail::assign_degenerate(active, r_bar, rho1.rho(), sigma);

  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (active[i]) s += r_bar[i] * std::sqrt(a(i));
  }
  double objective = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!active[i]) continue;
    const double var = r_bar[i] / std::sqrt(a(i)) * s / (2.0 * rho_active);
    sigma[i] = std::sqrt(var);
    objective += a(i) * var;
  }

  ScalePlan plan;
  plan.sigma_bar = std::move(sigma);
  plan.r_bar = r_bar;
  plan.objective = ScaleObjective::kWeightedVarianceSum;
  plan.rho1 = rho1;
  plan.objective_value = objective;
  return plan;
}

struct UtilityConstrainedSolution {
  std::vector<double> variance;  // t_i = sigma_i^2
  double objective = 0.0;        // sum r_i^2 / t_i = 2 * budget
  double dual_bound = 0.0;       // certified lower bound on the optimum
  double kkt_residual = 0.0;
  std::vector<double> multipliers;

  Budget budget() const { return Budget(objective / 2.0); }
  double relative_gap() const { return (objective - dual_bound) / objective; }
};

// Minimum-budget variances meeting every cap. Days no query reads are left
// at +infinity (zero budget); callers decide their final scale.
inline UtilityConstrainedSolution solve_utility_constrained(
    const QueryWorkload& w, const Eigen::VectorXd& caps,
    const std::vector<double>& r_bar) {
  const Eigen::Index n = w.days();
  const Eigen::Index m = w.query_count();
  detail::check_bounds(r_bar, n);
  if (caps.size() != m) throw std::invalid_argument("one cap per query");
  if (!caps.allFinite()) throw std::domain_error("caps must be finite");
  if ((caps.array() <= 0.0).any()) {
    throw std::domain_error("variance caps must be positive");
  }

  const Eigen::MatrixXd a_full = w.queries.array().square().matrix();
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a_full.col(i).sum() > 0.0) cols.push_back(i);
  }
  std::vector<Eigen::Index> rows;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (a_full.row(j).sum() > 0.0) rows.push_back(j);
  }

  UtilityConstrainedSolution sol;
  sol.variance.assign(n, std::numeric_limits<double>::infinity());
  sol.multipliers.assign(m, 0.0);
  const auto na = static_cast<Eigen::Index>(cols.size());
  const auto ma = static_cast<Eigen::Index>(rows.size());
  if (na == 0) return sol;

  Eigen::MatrixXd a(ma, na);
  Eigen::VectorXd v(ma);
  Eigen::VectorXd wt(na);
  for (Eigen::Index jj = 0; jj < ma; ++jj) {
    v(jj) = caps(rows[jj]);
    for (Eigen::Index ii = 0; ii < na; ++ii) a(jj, ii) = a_full(rows[jj], cols[ii]);
  }
  for (Eigen::Index ii = 0; ii < na; ++ii) {
    const double r = r_bar[cols[ii]];
    wt(ii) = r * r;
  }

  // Strictly feasible start: every constraint at half its cap.
  const Eigen::VectorXd row_sums = a.rowwise().sum();
  const double t0 = 0.5 * (v.array() / row_sums.array()).minCoeff();
  Eigen::VectorXd t = Eigen::VectorXd::Constant(na, t0);

  auto objective = [&](const Eigen::VectorXd& x) {
    return (wt.array() / x.array()).sum();
  };
  auto barrier = [&](const Eigen::VectorXd& x, double s, bool& ok) {
    ok = (x.array() > 0.0).all();
    if (!ok) return 0.0;
    const Eigen::ArrayXd slack = (v - a * x).array();
    ok = (slack > 0.0).all();
    if (!ok) return 0.0;
    return s * objective(x) - slack.log().sum();
  };

  double s = static_cast<double>(ma) / objective(t);
  constexpr double kGapTarget = 1e-10;
  for (int outer = 0; outer < 200; ++outer) {
    for (int inner = 0; inner < 200; ++inner) {
      const Eigen::ArrayXd slack = (v - a * t).array();
      const Eigen::ArrayXd inv_slack = slack.inverse();
      const Eigen::VectorXd grad =
          (s * (-wt.array() / t.array().square())).matrix() +
          a.transpose() * inv_slack.matrix();
      Eigen::MatrixXd hess = a.transpose() * inv_slack.square().matrix().asDiagonal() * a;
      hess.diagonal().array() += s * 2.0 * wt.array() / t.array().cube();
      const Eigen::VectorXd step = -hess.ldlt().solve(grad);
      const double decrement = -grad.dot(step);
      if (!(decrement > 1e-28)) break;
      bool ok = false;
      const double base = barrier(t, s, ok);
      double alpha = 1.0;
      if (decrement < 1e-6) {
        // Inside the quadratic region the full step is taken; the barrier
        // values no longer differ by more than rounding.
        barrier(t + step, s, ok);
      } else {
        for (int ls = 0; ls < 80; ++ls) {
          const Eigen::VectorXd trial = t + alpha * step;
          const double value = barrier(trial, s, ok);
          if (ok && value <= base - 0.25 * alpha * decrement) break;
          alpha *= 0.5;
        }
      }
      if (!ok) break;
      t += alpha * step;
    }
    if (static_cast<double>(ma) / s <= kGapTarget * objective(t)) break;
    s *= 8.0;
  }

  const Eigen::ArrayXd slack = (v - a * t).array();
  auto stationarity_of = [&](const Eigen::VectorXd& mu) {
    const Eigen::VectorXd c = a.transpose() * mu;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < na; ++i) {
      worst = std::max(worst, std::abs(c(i) * t(i) * t(i) - wt(i)) / wt(i));
    }
    return worst;
  };
  // Barrier multipliers 1/(s * slack) lose digits to cancellation in tiny
  // slacks. Refit them by least squares on the near-active constraints and
  // keep whichever certificate is tighter.
  Eigen::VectorXd mu = (1.0 / (s * slack)).matrix();
  double stationarity = stationarity_of(mu);
  {
    std::vector<Eigen::Index> act;
    for (Eigen::Index j = 0; j < ma; ++j) {
      if (slack(j) <= 1e-6 * v(j)) act.push_back(j);
    }
    if (!act.empty()) {
      Eigen::MatrixXd at(na, static_cast<Eigen::Index>(act.size()));
      for (std::size_t k = 0; k < act.size(); ++k) {
        at.col(static_cast<Eigen::Index>(k)) = a.row(act[k]).transpose();
      }
      const Eigen::VectorXd target = (wt.array() / t.array().square()).matrix();
      const Eigen::VectorXd fit = at.colPivHouseholderQr().solve(target);
      if ((fit.array() >= 0.0).all()) {
        Eigen::VectorXd refit = Eigen::VectorXd::Zero(ma);
        for (std::size_t k = 0; k < act.size(); ++k) refit(act[k]) = fit(static_cast<Eigen::Index>(k));
        const double st = stationarity_of(refit);
        if (st < stationarity) {
          mu = refit;
          stationarity = st;
        }
      }
    }
  }
  const Eigen::VectorXd c = a.transpose() * mu;
  const double f = objective(t);
  const double dual = 2.0 * (wt.array() * c.array()).sqrt().sum() - mu.dot(v);
  const double complementarity =
      (mu.array() * slack.max(0.0)).sum() / f;
  const double infeasibility = std::max(0.0, (-slack / v.array()).maxCoeff());

  for (Eigen::Index ii = 0; ii < na; ++ii) sol.variance[cols[ii]] = t(ii);
  for (Eigen::Index jj = 0; jj < ma; ++jj) sol.multipliers[rows[jj]] = mu(jj);
  sol.objective = f;
  sol.dual_bound = dual;
  sol.kkt_residual = std::max({stationarity, complementarity, infeasibility});
  return sol;
}

// Minimum-budget scales, then one common factor on every sigma so the
// mechanism spends exactly rho1.
inline ScalePlan init_utility_constrained(const QueryWorkload& w,
                                          const Eigen::VectorXd& caps,
                                          const std::vector<double>& r_bar,
                                          Budget rho1) {
  const auto sol = solve_utility_constrained(w, caps, r_bar);
  const auto n = static_cast<std::size_t>(w.days());
  std::vector<bool> active(n);
  std::vector<double> sigma(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) active[i] = std::isfinite(sol.variance[i]);
  const double rho_active =
      detail::assign_degenerate(active, r_bar, rho1.rho(), sigma);

  double active_budget = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (active[i]) active_budget += 0.5 * r_bar[i] * r_bar[i] / sol.variance[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (active[i]) sigma[i] = std::sqrt(sol.variance[i] * active_budget / rho_active);
  }

  ScalePlan plan;
  plan.sigma_bar = std::move(sigma);
  plan.r_bar = r_bar;
  plan.objective = ScaleObjective::kMinBudgetUnderVarianceCaps;
  plan.rho1 = rho1;
  plan.objective_value = sol.objective / 2.0;
  return plan;
}

inline void write_scale_plan_csv(std::ostream& out, const ScalePlan& plan) {
  out.precision(17);
  out << "day,sigma_bar\n";
  for (std::size_t i = 0; i < plan.days(); ++i) {
    out << i << ',' << plan.sigma_bar[i] << '\n';
  }
}

}  // namespace adsdp

#endif  // ADSDP_SCALES_HPP_
