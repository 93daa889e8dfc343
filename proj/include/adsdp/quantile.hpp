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

// Exponential-mechanism quantile of per-user contribution counts, used to
// pick a day's contribution bound.

#ifndef ADSDP_QUANTILE_HPP_
#define ADSDP_QUANTILE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "adsdp/accounting.hpp"
#include "adsdp/random.hpp"

namespace adsdp {

struct QuantileParams {
  double p = 0.99;
  double epsilon = 1.0;
  std::uint32_t lambda_cap = 10;

  void validate() const {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("p must be in (0, 1)");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw std::domain_error("epsilon must be positive");
    }
    if (lambda_cap < 1) throw std::domain_error("lambda_cap must be >= 1");
  }
};

// Sorted, capped counts framed by 0 and lambda_cap: c_0 .. c_{k+1}.
inline std::vector<double> quantile_breakpoints(
    std::span<const std::uint32_t> counts, std::uint32_t lambda_cap) {
  std::vector<double> c;
  c.reserve(counts.size() + 2);
  c.push_back(0.0);
  for (std::uint32_t v : counts) {
    c.push_back(static_cast<double>(std::min(v, lambda_cap)));
  }
  std::sort(c.begin() + 1, c.end());
  c.push_back(static_cast<double>(lambda_cap));
  return c;
}

// Selection probability of each interval [c_i, c_{i+1}], i = 0..k:
// proportional to (c_{i+1} - c_i) * exp(-eps * |i - p*k| / 2).
inline std::vector<double> quantile_interval_probabilities(
    std::span<const std::uint32_t> counts, const QuantileParams& params) {
  params.validate();
  if (counts.empty()) throw std::domain_error("no contribution counts");
  const auto c = quantile_breakpoints(counts, params.lambda_cap);
  const double k = static_cast<double>(counts.size());
  const std::size_t intervals = counts.size() + 1;
  std::vector<double> log_w(intervals, -std::numeric_limits<double>::infinity());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < intervals; ++i) {
    const double len = c[i + 1] - c[i];
    if (len <= 0.0) continue;
    log_w[i] = std::log(len) -
               params.epsilon * std::abs(static_cast<double>(i) - params.p * k) / 2.0;
    best = std::max(best, log_w[i]);
  }
  std::vector<double> prob(intervals, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < intervals; ++i) {
    if (std::isfinite(log_w[i])) {
      prob[i] = std::exp(log_w[i] - best);
      total += prob[i];
    }
  }
  for (double& q : prob) q /= total;
  return prob;
}

// Private p-quantile of `counts`, rounded up to a usable integer bound in
// [1, lambda_cap]. Throws on an empty day; callers carry the previous bound.
inline std::uint32_t private_quantile(std::span<const std::uint32_t> counts,
                                      const QuantileParams& params,
                                      Engine& engine) {
  const auto prob = quantile_interval_probabilities(counts, params);
  const auto c = quantile_breakpoints(counts, params.lambda_cap);
  const double u = uniform01(engine);
  std::size_t chosen = prob.size() - 1;
  double cdf = 0.0;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    cdf += prob[i];
    if (u < cdf && prob[i] > 0.0) {
      chosen = i;
      break;
    }
  }
  while (prob[chosen] == 0.0 && chosen > 0) --chosen;
  const double value = c[chosen] + uniform01(engine) * (c[chosen + 1] - c[chosen]);
  const double bound = std::clamp(std::ceil(value), 1.0,
                                  static_cast<double>(params.lambda_cap));
  return static_cast<std::uint32_t>(bound);
}

// The quantile is eps-DP, so it is both eps^2/8-zCDP (exponential mechanism)
// and eps*tanh(eps/2)-zCDP (pure DP); the smaller applies.
inline Budget quantile_budget(double epsilon) {
  if (!(epsilon > 0.0)) throw std::domain_error("epsilon must be positive");
  return Budget(std::min(epsilon * epsilon / 8.0, epsilon * std::tanh(epsilon / 2.0)));
}

// Largest epsilon whose quantile_budget is at most `budget` (bisection; the
// budget is increasing in epsilon).
inline double quantile_epsilon_for_budget(Budget budget) {
  auto f = [](double e) {
    return std::min(e * e / 8.0, e * std::tanh(e / 2.0));
  };
  double lo = 0.0;
  double hi = 1.0;
  while (f(hi) < budget.rho()) hi *= 2.0;
  for (int it = 0; it < 400 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) <= budget.rho() ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace adsdp

#endif  // ADSDP_QUANTILE_HPP_
