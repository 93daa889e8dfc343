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

// zCDP accounting: conversions to and from pure/approximate DP, group
// privacy, Gaussian calibration and the bounded-contribution budget formula.
// All budgets are in zCDP units (rho).

#ifndef ADSDP_ACCOUNTING_HPP_
#define ADSDP_ACCOUNTING_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>

namespace adsdp {

class Budget {
 public:
  explicit Budget(double rho) : rho_(rho) {
    if (!(rho > 0.0) || !std::isfinite(rho)) {
      throw std::domain_error("zCDP budget must be positive and finite, got " +
                              std::to_string(rho));
    }
  }
  double rho() const { return rho_; }

  friend Budget operator+(Budget a, Budget b) { return Budget(a.rho_ + b.rho_); }
  friend Budget operator*(double s, Budget b) { return Budget(s * b.rho_); }

 private:
  double rho_;
};

// Per-day contribution bounds r and Gaussian standard deviations sigma.
struct BoundedScales {
  std::vector<double> r;
  std::vector<double> sigma;

  BoundedScales(std::vector<double> bounds, std::vector<double> sigmas)
      : r(std::move(bounds)), sigma(std::move(sigmas)) {
    if (r.size() != sigma.size()) {
      throw std::invalid_argument("bounds and scales differ in length");
    }
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!(r[i] > 0.0) || !(sigma[i] > 0.0)) {
        throw std::domain_error("bounds and scales must be positive");
      }
    }
  }
};

// Tightest delta of the (epsilon, delta)-DP guarantee implied by rho-zCDP,
//   delta = min_{a > 1} exp((a-1)(a*rho - eps)) / (a-1) * (1 - 1/a)^a.
// The log of the objective is convex in a, so Brent's method on a bracket
// that contains the minimiser finds the global minimum.
inline double zcdp_to_dp(Budget budget, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::domain_error("epsilon must be positive");
  }
  const double rho = budget.rho();
  // Simplified log objective; tends to 0 as a -> 1+.
  auto log_delta = [&](double a) {
    const double am1 = a - 1.0;
    return am1 * (a * rho - epsilon) + am1 * std::log(am1) - a * std::log(a);
  };
  // The minimiser is near (eps + rho) / (2 rho); bracket generously.
  const double upper = std::max(4.0, 4.0 * (epsilon / rho + 2.0));
  const double lower = 1.0 + 1e-12;
  std::uintmax_t max_iter = 500;
  const auto [arg, value] = boost::math::tools::brent_find_minima(
      log_delta, lower, upper, std::numeric_limits<double>::digits / 2,
      max_iter);
  (void)arg;
  return std::min(1.0, std::exp(value));
}

// rho of the zCDP guarantee implied by epsilon-DP (tight):
// eps * (e^eps - 1) / (e^eps + 1) = eps * tanh(eps / 2).
inline Budget puredp_to_zcdp(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::domain_error("epsilon must be positive");
  }
  return Budget(epsilon * std::tanh(epsilon / 2.0));
}

// Inverse of puredp_to_zcdp: the epsilon whose pure-DP guarantee converts to
// exactly `target`. Monotone bisection to 1e-12 absolute.
inline double epsilon_for_zcdp_budget(Budget target) {
  const double rho = target.rho();
  auto f = [](double e) { return e * std::tanh(e / 2.0); };
  double lo = 0.0;
  double hi = 1.0;
  while (f(hi) < rho) hi *= 2.0;
  for (int it = 0; it < 400 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < rho ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// An event-level rho-zCDP mechanism is k^2 rho-zCDP for users holding at
// most k records.
inline Budget group_privacy(Budget event_level, std::uint64_t k) {
  if (k == 0) throw std::domain_error("group size must be positive");
  const double kk = static_cast<double>(k);
  return Budget(kk * kk * event_level.rho());
}

// L2 sensitivity of x -> diag(1/sigma) x over per-day bounded differences,
// sqrt(sum r_i^2 / sigma_i^2).
inline double bounded_sensitivity(const BoundedScales& scales) {
  double total = 0.0;
  for (std::size_t i = 0; i < scales.r.size(); ++i) {
    const double ratio = scales.r[i] / scales.sigma[i];
    total += ratio * ratio;
  }
  return std::sqrt(total);
}

// Budget of per-day Gaussian noise sigma_i under bounds r_i:
// rho = 1/2 * sum r_i^2 / sigma_i^2.
inline Budget mechanism_budget(const BoundedScales& scales) {
  if (scales.r.empty()) throw std::domain_error("no days");
  double total = 0.0;
  for (std::size_t i = 0; i < scales.r.size(); ++i) {
    const double ratio = scales.r[i] / scales.sigma[i];
    total += ratio * ratio;
  }
  return Budget(0.5 * total);
}

// Standard deviation at which the Gaussian mechanism with L2 sensitivity
// `l2_sensitivity` is rho-zCDP.
inline double gaussian_sigma(double l2_sensitivity, Budget budget) {
  if (!(l2_sensitivity > 0.0)) {
    throw std::domain_error("sensitivity must be positive");
  }
  return l2_sensitivity / std::sqrt(2.0 * budget.rho());
}

// Sequential-composition record of what a run spent.
class BudgetLedger {
 public:
  struct Entry {
    std::string label;
    double rho;
  };

  void charge(std::string label, Budget budget) {
    entries_.push_back({std::move(label), budget.rho()});
  }
  double total() const {
    double sum = 0.0;
    for (const auto& e : entries_) sum += e.rho;
    return sum;
  }
  double total_for(const std::string& label) const {
    double sum = 0.0;
    for (const auto& e : entries_) {
      if (e.label == label) sum += e.rho;
    }
    return sum;
  }
  std::size_t count(const std::string& label) const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.label == label ? 1 : 0;
    return n;
  }
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

}  // namespace adsdp

#endif  // ADSDP_ACCOUNTING_HPP_
