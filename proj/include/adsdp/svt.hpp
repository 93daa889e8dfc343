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

// Sparse-vector bound tracking. Two detectors watch the daily contribution
// histogram: one asks whether too many users sit above the current bound,
// the other whether too few sit between s_down * bound and the bound.

#ifndef ADSDP_SVT_HPP_
#define ADSDP_SVT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "adsdp/accounting.hpp"
#include "adsdp/attribution.hpp"
#include "adsdp/random.hpp"

namespace adsdp {

struct SvtConfig {
  double epsilon = 1.0;  // pure-DP budget of the whole run, both detectors
  std::uint32_t k_max = 7;
  double T_up = 50.0;
  double T_down = 50.0;
  double s_up = 1.3;
  double s_down = 0.8;
  std::size_t l = 7;

  void validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw std::domain_error("svt epsilon must be positive");
    }
    if (k_max < 1) throw std::domain_error("k_max must be >= 1");
    if (!(T_up > 0.0) || !(T_down > 0.0)) {
      throw std::domain_error("svt thresholds must be positive");
    }
    if (!(s_up > 1.0) || !(s_down > 0.0 && s_down < 1.0)) {
      throw std::domain_error("need s_up > 1 > s_down > 0");
    }
    if (l < 1) throw std::domain_error("l must be >= 1");
  }

  double detector_epsilon() const { return epsilon / 2.0; }
};

struct SvtState {
  double noisy_T_up = 0.0;
  double noisy_T_down = 0.0;  // perturbed -T_down
  std::uint32_t count_up = 0;
  std::uint32_t count_down = 0;
  std::vector<double> bound_list;
};

// Fresh state with both thresholds perturbed once, at stream start.
inline SvtState init_svt_state(const SvtConfig& config, NoiseSource& noise) {
  config.validate();
  const double scale = 2.0 / config.detector_epsilon();
  SvtState state;
  state.noisy_T_up = config.T_up + noise.laplace(scale);
  state.noisy_T_down = -config.T_down + noise.laplace(scale);
  return state;
}

// Number of users with strictly more than tau contributions.
inline std::int64_t above_threshold(std::span<const std::uint32_t> counts,
                                    double tau) {
  std::int64_t n = 0;
  for (std::uint32_t c : counts) n += static_cast<double>(c) > tau ? 1 : 0;
  return n;
}

inline std::int64_t above_threshold(const ContributionHistogram& histogram,
                                    double tau) {
  const auto values = histogram.values();
  return above_threshold(std::span<const std::uint32_t>(values), tau);
}

struct CheckResult {
  bool update = false;
  std::uint32_t count = 0;
  double noisy_threshold = 0.0;
};

// One above-threshold test. Once `count` reaches k_max the detector is
// exhausted and answers false without touching the noise stream.
inline CheckResult check_update(double q, double epsilon, std::uint32_t count,
                                double noisy_threshold, std::uint32_t k_max,
                                double threshold, NoiseSource& noise) {
  if (!(epsilon > 0.0)) throw std::domain_error("epsilon must be positive");
  CheckResult out{false, count, noisy_threshold};
  if (count >= k_max) return out;
  const double noisy_q =
      q + noise.laplace(4.0 * static_cast<double>(k_max) / epsilon);
  if (noisy_q > noisy_threshold) {
    out.update = true;
    out.count = count + 1;
    out.noisy_threshold = threshold + noise.laplace(2.0 / epsilon);
  }
  return out;
}

// Mean of the last l bounds, or of all of them on a short history.
inline double rolling_bound(const SvtState& state, std::size_t l) {
  if (state.bound_list.empty()) {
    throw std::logic_error("bound list is empty; seed it with quantile bounds");
  }
  const std::size_t take = std::min(l, state.bound_list.size());
  const auto first = state.bound_list.end() - static_cast<std::ptrdiff_t>(take);
  return std::accumulate(first, state.bound_list.end(), 0.0) /
         static_cast<double>(take);
}

// Next day's bound; appends it to state.bound_list.
inline double update_bound_svt(std::span<const std::uint32_t> counts,
                               const SvtConfig& config, SvtState& state,
                               NoiseSource& noise) {
  const double tau = rolling_bound(state, config.l);
  const double eps = config.detector_epsilon();
  const auto above_tau = static_cast<double>(above_threshold(counts, tau));
  const double q_up = above_tau;
  const double q_down =
      above_tau - static_cast<double>(above_threshold(counts, tau * config.s_down));

  const auto up = check_update(q_up, eps, state.count_up, state.noisy_T_up,
                               config.k_max, config.T_up, noise);
  state.count_up = up.count;
  state.noisy_T_up = up.noisy_threshold;
  const auto down = check_update(q_down, eps, state.count_down,
                                 state.noisy_T_down, config.k_max,
                                 -config.T_down, noise);
  state.count_down = down.count;
  state.noisy_T_down = down.noisy_threshold;

  double r = tau;
  if (up.update && !down.update) r = tau * config.s_up;
  if (down.update && !up.update) r = tau * config.s_down;
  state.bound_list.push_back(r);
  return r;
}

// Both detectors together are epsilon-DP, hence this much zCDP.
inline Budget svt_budget(double epsilon) { return puredp_to_zcdp(epsilon); }

}  // namespace adsdp

#endif  // ADSDP_SVT_HPP_
