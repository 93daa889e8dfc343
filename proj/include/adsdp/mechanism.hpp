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

// Ads-BPC: streaming release of per-day, per-publisher attributed totals
// under user-level zCDP with per-day contribution bounds.
//
// Each day the mechanism estimates a bound r_i (private quantile for the
// first l days, SVT afterwards), clips every user to ceil(r_i) conversions,
// scales the day's precomputed noise by r_i and releases the noisy row.
// Since r_i / sigma_i is fixed by the plan, the Gaussian part always spends
// exactly rho1 whatever bounds are chosen.

#ifndef ADSDP_MECHANISM_HPP_
#define ADSDP_MECHANISM_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adsdp/accounting.hpp"
#include "adsdp/common.hpp"
#include "adsdp/quantile.hpp"
#include "adsdp/random.hpp"
#include "adsdp/scales.hpp"
#include "adsdp/stream.hpp"
#include "adsdp/svt.hpp"
#include "adsdp/workload.hpp"

namespace adsdp {

// Fractions of the total budget for measurement, quantile and SVT.
struct BudgetSplit {
  double measurement = 0.7;
  double quantile = 0.15;
  double svt = 0.15;
};

struct AdsBpcConfig {
  Budget rho_total{1.0};
  BudgetSplit split;
  std::size_t l = 7;
  double p = 0.99;
  std::uint32_t lambda_cap = 10;
  // epsilon is derived from the split; the value here is ignored.
  SvtConfig svt;
  std::uint64_t seed = 0;
  ScaleObjective objective = ScaleObjective::kWeightedVarianceSum;
  // Per-query variance caps for kMinBudgetUnderVarianceCaps; empty means 1.
  Eigen::VectorXd variance_caps;
  // Test hooks.
  bool noise_enabled = true;
  std::optional<double> fixed_bound;

  void validate() const {
    const double parts[] = {split.measurement, split.quantile, split.svt};
    for (double f : parts) {
      if (!(f > 0.0)) throw ConfigError("budget split fractions must be > 0");
    }
    if (std::abs(split.measurement + split.quantile + split.svt - 1.0) > 1e-12) {
      throw ConfigError("budget split must sum to 1");
    }
    if (l < 1) throw ConfigError("l must be >= 1");
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("p must be in (0, 1)");
    if (lambda_cap < 1) throw ConfigError("lambda_cap must be >= 1");
    if (fixed_bound && !(*fixed_bound >= 1.0)) {
      throw ConfigError("fixed bound must be >= 1");
    }
  }

  Budget rho1() const { return split.measurement * rho_total; }
  Budget rho2_per_day() const {
    return (split.quantile / static_cast<double>(l)) * rho_total;
  }
  Budget rho3() const { return split.svt * rho_total; }

  SvtConfig svt_config() const {
    SvtConfig c = svt;
    c.l = l;
    c.epsilon = epsilon_for_zcdp_budget(rho3());
    c.validate();
    return c;
  }
};

// Integer clipping bound for a real-valued r; infinity disables clipping.
inline std::uint64_t clip_bound_of(double r) {
  if (!std::isfinite(r)) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(std::ceil(r));
}

// Per-day bound pipeline shared by Ads-BPC and MMBPC: quantile for days
// < l, SVT after. Charges the ledger as it spends.
class BoundEstimator {
 public:
  BoundEstimator(const AdsBpcConfig& config, BudgetLedger& ledger,
                 NoiseSource& noise)
      : config_(config), ledger_(ledger), noise_(noise) {
    if (config_.fixed_bound) return;
    svt_ = config_.svt_config();
    quantile_.p = config_.p;
    quantile_.lambda_cap = config_.lambda_cap;
    quantile_.epsilon = quantile_epsilon_for_budget(config_.rho2_per_day());
    state_ = init_svt_state(svt_, noise_);
    ledger_.charge("svt", svt_budget(svt_.epsilon));
  }

  // Bound for day `day` given that day's per-user counts.
  double next(std::size_t day, std::span<const std::uint32_t> counts) {
    if (config_.fixed_bound) return *config_.fixed_bound;
    if (day < config_.l) {
      ledger_.charge("quantile", quantile_budget(quantile_.epsilon));
      double r = state_.bound_list.empty() ? 1.0 : state_.bound_list.back();
      if (!counts.empty()) {
        r = private_quantile(counts, quantile_, noise_.engine());
      }
      state_.bound_list.push_back(r);
      return r;
    }
    return update_bound_svt(counts, svt_, state_, noise_);
  }

  const SvtState& state() const { return state_; }
  const QuantileParams& quantile_params() const { return quantile_; }

 private:
  const AdsBpcConfig& config_;
  BudgetLedger& ledger_;
  NoiseSource& noise_;
  SvtConfig svt_;
  QuantileParams quantile_;
  SvtState state_;
};

struct DailyRelease {
  std::size_t day = 0;
  double bound = 1.0;              // r_i
  std::uint64_t clip_bound = 1;    // ceil(r_i)
  double sigma = 0.0;              // noise scale actually used
  Eigen::RowVectorXd noisy_row;    // one entry per publisher
  // Workload rows whose last day is this one, with their answers (one
  // column per publisher).
  std::vector<Eigen::Index> queries;
  Eigen::MatrixXd query_answers;
};

struct AdsBpcRun {
  ScalePlan plan;
  std::vector<DailyRelease> releases;
  BudgetLedger ledger;
  Eigen::MatrixXd noisy;    // n x k
  Eigen::MatrixXd answers;  // m x k
};

inline ScalePlan plan_scales(const QueryWorkload& w, const AdsBpcConfig& config) {
  const std::vector<double> r_bar(static_cast<std::size_t>(w.days()), 1.0);
  if (config.objective == ScaleObjective::kWeightedVarianceSum) {
    return init_privacy_constrained(w, r_bar, config.rho1());
  }
  Eigen::VectorXd caps = config.variance_caps;
  if (caps.size() == 0) caps = Eigen::VectorXd::Ones(w.query_count());
  return init_utility_constrained(w, caps, r_bar, config.rho1());
}

// Queries grouped by the day they become answerable. All-zero rows are
// answered on day 0.
inline std::vector<std::vector<Eigen::Index>> queries_by_day(
    const QueryWorkload& w) {
  std::vector<std::vector<Eigen::Index>> out(static_cast<std::size_t>(w.days()));
  for (Eigen::Index j = 0; j < w.query_count(); ++j) {
    const Eigen::Index last = std::max<Eigen::Index>(0, w.last_day(j));
    out[static_cast<std::size_t>(last)].push_back(j);
  }
  return out;
}

inline AdsBpcRun run_adsbpc(const StreamData& data, const QueryWorkload& w,
                            const AdsBpcConfig& config) {
  config.validate();
  if (static_cast<Eigen::Index>(data.days()) != w.days()) {
    throw ConfigError("workload has " + std::to_string(w.days()) +
                      " days, data has " + std::to_string(data.days()));
  }
  const auto n = data.days();
  const auto k = static_cast<Eigen::Index>(data.publisher_count());

  AdsBpcRun run;
  run.plan = plan_scales(w, config);
  run.ledger.charge("measurement", mechanism_budget(BoundedScales(
                                       run.plan.r_bar, run.plan.sigma_bar)));
  run.noisy = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), k);
  run.answers = Eigen::MatrixXd::Zero(w.query_count(), k);

  NoiseSource noise(config.seed, config.noise_enabled);
  BoundEstimator estimator(config, run.ledger, noise);
  UserCounter counter(data.users());
  const auto by_day = queries_by_day(w);

  for (std::size_t i = 0; i < n; ++i) {
    const DayData& raw = data.day(i);
    const auto counts = day_counts(raw, counter);
    DailyRelease rel;
    rel.day = i;
    rel.bound = estimator.next(i, counts);
    rel.clip_bound = clip_bound_of(rel.bound);
    const DayData clipped = clip_day(raw, rel.clip_bound, counter);
    rel.sigma = rescale(run.plan.sigma_bar[i], run.plan.r_bar[i],
                        static_cast<double>(rel.clip_bound));
    rel.noisy_row = data.aggregate_day(clipped);
    for (Eigen::Index p = 0; p < k; ++p) rel.noisy_row(p) += noise.gaussian(rel.sigma);
    run.noisy.row(static_cast<Eigen::Index>(i)) = rel.noisy_row;

    rel.queries = by_day[i];
    rel.query_answers.resize(static_cast<Eigen::Index>(rel.queries.size()), k);
    for (std::size_t q = 0; q < rel.queries.size(); ++q) {
      const Eigen::Index j = rel.queries[q];
      const Eigen::RowVectorXd ans = w.queries.row(j) * run.noisy;
      rel.query_answers.row(static_cast<Eigen::Index>(q)) = ans;
      run.answers.row(j) = ans;
    }
    run.releases.push_back(std::move(rel));
  }
  return run;
}

// L2 sensitivity over n x k difference matrices whose row i has L1 norm at
// most r_i; the same value as the single-publisher case.
inline double sensitivity_multi(const BoundedScales& scales) {
  return bounded_sensitivity(scales);
}

// Realized (ceil r_i, sigma_i) pairs of a run.
inline BoundedScales realized_scales(const AdsBpcRun& run) {
  std::vector<double> r;
  std::vector<double> sigma;
  for (const auto& rel : run.releases) {
    r.push_back(static_cast<double>(rel.clip_bound));
    sigma.push_back(rel.sigma);
  }
  return BoundedScales(std::move(r), std::move(sigma));
}

inline void write_release_csv(std::ostream& out, const AdsBpcRun& run,
                              const std::vector<std::string>& publishers) {
  out.precision(17);
  out << "day,bound,publisher,noisy_value\n";
  for (const auto& rel : run.releases) {
    for (Eigen::Index p = 0; p < rel.noisy_row.size(); ++p) {
      out << rel.day << ',' << rel.bound << ',' << publishers.at(p) << ','
          << rel.noisy_row(p) << '\n';
    }
  }
}

inline void write_answers_csv(std::ostream& out, const Eigen::MatrixXd& answers,
                              const std::vector<std::string>& publishers) {
  out.precision(17);
  out << "query,publisher,answer\n";
  for (Eigen::Index j = 0; j < answers.rows(); ++j) {
    for (Eigen::Index p = 0; p < answers.cols(); ++p) {
      out << j << ',' << publishers.at(p) << ',' << answers(j, p) << '\n';
    }
  }
}

}  // namespace adsdp

#endif  // ADSDP_MECHANISM_HPP_
