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

// Comparison mechanisms. All release the same workload answers under
// user-level zCDP at a given total budget:
//
//   ipa     i.i.d. Gaussian per day, group privacy over GS records.
//   bin     binary-tree continual release, group privacy over GS.
//   stream  binary tree whose clipping bound doubles when an SVT sees users
//           above it; noise follows the bound instead of GS.
//   umm     square-root factorization of the prefix-sum matrix, group
//           privacy over GS.
//   mmbpc   the same factorization with columns scaled by per-day bounds
//           picked by the Ads-BPC bound pipeline.
//
// These are reconstructions for relative comparison; tree layout, the
// factorization and Stream's SVT settings are our choices.

#ifndef ADSDP_BASELINES_HPP_
#define ADSDP_BASELINES_HPP_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adsdp/accounting.hpp"
#include "adsdp/common.hpp"
#include "adsdp/mechanism.hpp"
#include "adsdp/random.hpp"
#include "adsdp/stream.hpp"
#include "adsdp/svt.hpp"
#include "adsdp/workload.hpp"

namespace adsdp {

struct GlobalSensitivityConfig {
  std::uint64_t GS = 1;
  Budget rho_total{1.0};
  std::uint64_t seed = 0;
  bool noise_enabled = true;

  void validate() const {
    if (GS < 1) throw ConfigError("GS must be >= 1");
  }
  // Event-level budget that group privacy lifts to rho_total.
  Budget event_budget() const {
    const double g = static_cast<double>(GS);
    return (1.0 / (g * g)) * rho_total;
  }
};

struct BaselineRun {
  Eigen::MatrixXd answers;  // m x k
  BudgetLedger ledger;
  std::vector<double> bounds;  // per-day clipping bound, where one exists
};

namespace detail {

inline void check_days(const StreamData& data, const QueryWorkload& w) {
  if (static_cast<Eigen::Index>(data.days()) != w.days()) {
    throw ConfigError("workload and data disagree on the number of days");
  }
}

// Answers of w from noisy prefix sums (row t estimates days 0..t).
inline Eigen::MatrixXd answers_from_prefix(const QueryWorkload& w,
                                           const Eigen::MatrixXd& prefix) {
  Eigen::MatrixXd x = prefix;
  for (Eigen::Index t = x.rows() - 1; t > 0; --t) x.row(t) -= prefix.row(t - 1);
  return w.queries * x;
}

inline int tree_height(std::size_t n) {
  int h = 0;
  while ((std::size_t{1} << h) < n) ++h;
  return h;
}

// Noisy prefix sums from a complete binary tree over the days. Level L
// node j covers days [j 2^L, (j+1) 2^L). sigma_of(L, j) gives the node's
// noise scale; draws follow level, node, publisher order.
template <typename SigmaFn>
Eigen::MatrixXd tree_prefix(const Eigen::MatrixXd& x, SigmaFn sigma_of,
                            NoiseSource& noise) {
  const auto n = static_cast<std::size_t>(x.rows());
  const Eigen::Index k = x.cols();
  const int h = tree_height(n);
  std::vector<Eigen::MatrixXd> levels(static_cast<std::size_t>(h) + 1);
  for (int L = 0; L <= h; ++L) {
    const std::size_t width = std::size_t{1} << L;
    const std::size_t nodes = (std::size_t{1} << h) >> L;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nodes), k);
    for (std::size_t j = 0; j < nodes; ++j) {
      const std::size_t lo = j * width;
      const std::size_t hi = std::min(n, lo + width);
      for (std::size_t t = lo; t < hi; ++t) {
        m.row(static_cast<Eigen::Index>(j)) += x.row(static_cast<Eigen::Index>(t));
      }
      const double sigma = sigma_of(L, j);
      for (Eigen::Index p = 0; p < k; ++p) {
        m(static_cast<Eigen::Index>(j), p) += noise.gaussian(sigma);
      }
    }
    levels[static_cast<std::size_t>(L)] = std::move(m);
  }
  Eigen::MatrixXd prefix = Eigen::MatrixXd::Zero(x.rows(), k);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t len = t + 1;
    std::size_t start = 0;
    for (int L = h; L >= 0; --L) {
      if (len & (std::size_t{1} << L)) {
        prefix.row(static_cast<Eigen::Index>(t)) +=
            levels[static_cast<std::size_t>(L)].row(
                static_cast<Eigen::Index>(start >> L));
        start += std::size_t{1} << L;
      }
    }
  }
  return prefix;
}

}  // namespace detail

// Number of tree nodes summed for the prefix ending at day t (0-based).
inline int dyadic_cover_size(std::size_t t) {
  return std::popcount(t + 1);
}

inline BaselineRun ipa(const StreamData& data, const QueryWorkload& w,
                       const GlobalSensitivityConfig& cfg) {
  cfg.validate();
  detail::check_days(data, w);
  const StreamData clipped = clip_global(data, cfg.GS);
  const Budget event = cfg.event_budget();
  const double sigma = gaussian_sigma(std::sqrt(2.0), event);
  NoiseSource noise(cfg.seed, cfg.noise_enabled);
  Eigen::MatrixXd x = clipped.aggregate();
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    for (Eigen::Index p = 0; p < x.cols(); ++p) x(t, p) += noise.gaussian(sigma);
  }
  BaselineRun run;
  run.answers = w.queries * x;
  run.ledger.charge("measurement", group_privacy(event, cfg.GS));
  return run;
}

// Per-entry noise standard deviation ipa uses.
inline double ipa_sigma(const GlobalSensitivityConfig& cfg) {
  return gaussian_sigma(std::sqrt(2.0), cfg.event_budget());
}

// Node noise of bin: event-level L2 sensitivity sqrt(2 (h+1)).
inline double bin_sigma(std::size_t n, const GlobalSensitivityConfig& cfg) {
  const int h = detail::tree_height(n);
  return gaussian_sigma(std::sqrt(2.0 * (h + 1)), cfg.event_budget());
}

inline BaselineRun bin_tree(const StreamData& data, const QueryWorkload& w,
                            const GlobalSensitivityConfig& cfg) {
  cfg.validate();
  detail::check_days(data, w);
  const StreamData clipped = clip_global(data, cfg.GS);
  const double sigma = bin_sigma(data.days(), cfg);
  NoiseSource noise(cfg.seed, cfg.noise_enabled);
  const Eigen::MatrixXd prefix = detail::tree_prefix(
      clipped.aggregate(), [&](int, std::size_t) { return sigma; }, noise);
  BaselineRun run;
  run.answers = detail::answers_from_prefix(w, prefix);
  run.ledger.charge("measurement", group_privacy(cfg.event_budget(), cfg.GS));
  return run;
}

struct StreamConfig {
  Budget rho_total{1.0};
  double svt_share = 0.15;
  std::uint32_t max_doublings = 8;
  // SVT threshold on the number of users above the bound.
  double threshold = 0.0;
  std::uint64_t seed = 0;
  bool noise_enabled = true;

  void validate() const {
    if (!(svt_share > 0.0 && svt_share < 1.0)) {
      throw ConfigError("svt_share must be in (0, 1)");
    }
    if (max_doublings < 1) throw ConfigError("max_doublings must be >= 1");
  }
  Budget release_budget() const { return (1.0 - svt_share) * rho_total; }
  Budget svt_zcdp() const { return svt_share * rho_total; }
};

// Scale factor of Stream's node noise: sigma_node = tau_node * factor.
// A user's records arriving while the bound is tau number at most tau, and
// each record counts 1/tau_node <= 1/tau in the normalized tree, so a level
// changes by at most 2 E in squared L2 norm over E bound epochs.
inline double stream_noise_factor(std::size_t n, const StreamConfig& cfg) {
  const int h = detail::tree_height(n);
  const double epochs = static_cast<double>(cfg.max_doublings) + 1.0;
  return std::sqrt(epochs * (h + 1) / cfg.release_budget().rho());
}

struct StreamTrace {
  std::vector<double> tau;  // bound in force on each day
  std::uint32_t doublings = 0;
};

inline BaselineRun stream_mech(const StreamData& data, const QueryWorkload& w,
                               const StreamConfig& cfg,
                               StreamTrace* trace = nullptr) {
  cfg.validate();
  detail::check_days(data, w);
  const std::size_t n = data.days();
  const Eigen::Index k = static_cast<Eigen::Index>(data.publisher_count());
  NoiseSource noise(cfg.seed, cfg.noise_enabled);
  BaselineRun run;

  const double eps = epsilon_for_zcdp_budget(cfg.svt_zcdp());
  run.ledger.charge("svt", puredp_to_zcdp(eps));
  double noisy_threshold = cfg.threshold + noise.laplace(2.0 / eps);
  std::uint32_t count = 0;

  std::vector<std::uint32_t> raw_total(data.users(), 0);
  std::vector<std::uint32_t> kept_total(data.users(), 0);
  std::vector<std::uint32_t> active;  // users seen so far
  double tau = 1.0;
  StreamTrace local;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), k);

  for (std::size_t i = 0; i < n; ++i) {
    const DayData& d = data.day(i);
    for (const auto& r : d.records) {
      if (raw_total[r.user]++ == 0) active.push_back(r.user);
    }
    for (;;) {
      std::int64_t above = 0;
      for (std::uint32_t u : active) above += raw_total[u] > tau ? 1 : 0;
      const auto res = check_update(static_cast<double>(above), eps, count,
                                    noisy_threshold, cfg.max_doublings,
                                    cfg.threshold, noise);
      count = res.count;
      noisy_threshold = res.noisy_threshold;
      if (!res.update) break;
      tau *= 2.0;
      ++local.doublings;
    }
    local.tau.push_back(tau);
    for (const auto& r : d.records) {
      if (static_cast<double>(kept_total[r.user]) + 1.0 > tau) continue;
      ++kept_total[r.user];
      for (const auto& e : d.weights_of(r)) {
        x(static_cast<Eigen::Index>(i), e.publisher) += e.weight;
      }
    }
  }

  const double factor = stream_noise_factor(n, cfg);
  auto sigma_of = [&](int L, std::size_t j) {
    const std::size_t last = std::min(n, (j + 1) << L) - 1;
    const std::size_t day = std::min(last, n - 1);
    return local.tau[day] * factor;
  };
  const Eigen::MatrixXd prefix = detail::tree_prefix(x, sigma_of, noise);
  run.answers = detail::answers_from_prefix(w, prefix);
  run.bounds = local.tau;
  run.ledger.charge("measurement", cfg.release_budget());
  if (trace) *trace = std::move(local);
  return run;
}

// Lower-triangular Toeplitz B with B * B equal to the n x n prefix-sum
// matrix. Diagonal t holds binom(2t, t) / 4^t.
inline Eigen::MatrixXd sqrt_prefix_factor(Eigen::Index n) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  Eigen::VectorXd c(n);
  c(0) = 1.0;
  for (Eigen::Index t = 1; t < n; ++t) {
    c(t) = c(t - 1) * (2.0 * static_cast<double>(t) - 1.0) /
           (2.0 * static_cast<double>(t));
  }
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) b(i, j) = c(i - j);
  }
  return b;
}

inline double umm_sigma(Eigen::Index n, const GlobalSensitivityConfig& cfg) {
  const Eigen::MatrixXd b = sqrt_prefix_factor(n);
  const double max_col = b.colwise().norm().maxCoeff();
  return gaussian_sigma(std::sqrt(2.0) * max_col, cfg.event_budget());
}

inline BaselineRun umm(const StreamData& data, const QueryWorkload& w,
                       const GlobalSensitivityConfig& cfg) {
  cfg.validate();
  detail::check_days(data, w);
  const StreamData clipped = clip_global(data, cfg.GS);
  const Eigen::Index n = w.days();
  const Eigen::MatrixXd b = sqrt_prefix_factor(n);
  const double sigma = umm_sigma(n, cfg);
  NoiseSource noise(cfg.seed, cfg.noise_enabled);
  Eigen::MatrixXd z = b * clipped.aggregate();
  for (Eigen::Index t = 0; t < z.rows(); ++t) {
    for (Eigen::Index p = 0; p < z.cols(); ++p) z(t, p) += noise.gaussian(sigma);
  }
  const Eigen::MatrixXd x_hat = b.triangularView<Eigen::Lower>().solve(z);
  BaselineRun run;
  run.answers = w.queries * x_hat;
  run.ledger.charge("measurement", group_privacy(cfg.event_budget(), cfg.GS));
  return run;
}

// Strategy B diag(1/r). Its L2 sensitivity over per-day bounded
// differences is ||B 1||, attained at d = r because B is nonnegative.
inline Eigen::MatrixXd mmbpc_strategy(const std::vector<double>& r) {
  const auto n = static_cast<Eigen::Index>(r.size());
  Eigen::MatrixXd s = sqrt_prefix_factor(n);
  for (Eigen::Index j = 0; j < n; ++j) s.col(j) /= r[static_cast<std::size_t>(j)];
  return s;
}

inline double mmbpc_sigma(Eigen::Index n, Budget rho1) {
  const Eigen::MatrixXd b = sqrt_prefix_factor(n);
  return gaussian_sigma((b * Eigen::VectorXd::Ones(n)).norm(), rho1);
}

inline BaselineRun mmbpc(const StreamData& data, const QueryWorkload& w,
                         const AdsBpcConfig& config) {
  config.validate();
  detail::check_days(data, w);
  const std::size_t n = data.days();
  const Eigen::Index k = static_cast<Eigen::Index>(data.publisher_count());
  BaselineRun run;
  NoiseSource noise(config.seed, config.noise_enabled);
  BoundEstimator estimator(config, run.ledger, noise);
  UserCounter counter(data.users());

  const Eigen::MatrixXd b = sqrt_prefix_factor(static_cast<Eigen::Index>(n));
  const double sigma = mmbpc_sigma(static_cast<Eigen::Index>(n), config.rho1());
  run.ledger.charge("measurement", config.rho1());

  // Day i releases row i of B diag(1/r) X + noise, which only needs bounds
  // up to day i.
  Eigen::MatrixXd scaled = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), k);
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), k);
  for (std::size_t i = 0; i < n; ++i) {
    const DayData& raw = data.day(i);
    const auto counts = day_counts(raw, counter);
    const double r = estimator.next(i, counts);
    const std::uint64_t cb = clip_bound_of(r);
    run.bounds.push_back(static_cast<double>(cb));
    const DayData clipped = clip_day(raw, cb, counter);
    const auto row = static_cast<Eigen::Index>(i);
    scaled.row(row) = data.aggregate_day(clipped) / static_cast<double>(cb);
    z.row(row) = b.row(row) * scaled;
    for (Eigen::Index p = 0; p < k; ++p) z(row, p) += noise.gaussian(sigma);
  }
  Eigen::MatrixXd x_hat = b.triangularView<Eigen::Lower>().solve(z);
  for (std::size_t i = 0; i < n; ++i) {
    x_hat.row(static_cast<Eigen::Index>(i)) *= run.bounds[i];
  }
  run.answers = w.queries * x_hat;
  return run;
}

}  // namespace adsdp

#endif  // ADSDP_BASELINES_HPP_
