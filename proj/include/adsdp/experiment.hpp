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

// Trial runner used by the CLI and the end-to-end tests. A dataset is built
// once; trials differ only in the mechanism's seed, trial t using
// trial_seed(seed, t).

#ifndef ADSDP_EXPERIMENT_HPP_
#define ADSDP_EXPERIMENT_HPP_

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "adsdp/attribution.hpp"
#include "adsdp/baselines.hpp"
#include "adsdp/common.hpp"
#include "adsdp/events.hpp"
#include "adsdp/mechanism.hpp"
#include "adsdp/stream.hpp"
#include "adsdp/synth.hpp"
#include "adsdp/workload.hpp"

namespace adsdp {

enum class Method { kAdsBpc, kIpa, kBin, kStream, kUmm, kMmbpc };
enum class Scenario { kPrefixWrmse, kWindowMaxVar };

inline constexpr Method kAllMethods[] = {Method::kIpa,    Method::kBin,
                                         Method::kStream, Method::kUmm,
                                         Method::kMmbpc,  Method::kAdsBpc};

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::kAdsBpc: return "adsbpc";
    case Method::kIpa: return "ipa";
    case Method::kBin: return "bin";
    case Method::kStream: return "stream";
    case Method::kUmm: return "umm";
    case Method::kMmbpc: return "mmbpc";
  }
  return "?";
}

inline std::string_view to_string(Scenario s) {
  return s == Scenario::kPrefixWrmse ? "prefix_wrmse" : "window_maxvar";
}

inline std::optional<Method> parse_method(std::string_view name) {
  for (Method m : kAllMethods) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

inline std::optional<Scenario> parse_scenario(std::string_view name) {
  for (Scenario s : {Scenario::kPrefixWrmse, Scenario::kWindowMaxVar}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

struct ExperimentConfig {
  AdsBpcConfig mechanism;  // shared by adsbpc and mmbpc
  std::size_t window_K = 7;
  double stream_svt_share = 0.15;
  std::uint32_t stream_max_doublings = 8;
  double stream_threshold = 0.0;
  // Overrides of the dataset's own values.
  std::optional<std::uint32_t> lambda_cap;
  std::optional<std::uint64_t> gs;
};

struct Dataset {
  std::string name;
  StreamData data;
  std::uint64_t gs = 1;
  std::uint32_t lambda_cap = 10;
};

inline Dataset synthetic_dataset(const SynthSpec& spec) {
  Dataset d;
  d.name = std::string(to_string(spec.family));
  d.data = to_stream(generate(spec));
  d.gs = family_cap(spec.family);
  d.lambda_cap = family_lambda_cap(spec.family);
  return d;
}

// Dataset from impression/conversion CSVs through join and attribution.
// GS defaults to the largest per-user total in the data.
inline Dataset file_dataset(const std::string& name,
                            const std::string& impressions_path,
                            const std::string& conversions_path,
                            AttributionModel model, std::size_t days,
                            DayClock clock = {}) {
  const auto imps = load_impressions(impressions_path);
  const auto convs = load_conversions(conversions_path);
  const auto attributed = attribute(join(imps, convs), imps, convs, model, clock);
  Dataset d;
  d.name = name;
  d.data = StreamData::from_attributed(attributed, days, publishers_of(attributed));
  d.gs = std::max<std::uint64_t>(1, max_user_total(d.data));
  return d;
}

inline QueryWorkload scenario_workload(Scenario s, std::size_t n,
                                       std::size_t window) {
  const auto nn = static_cast<Eigen::Index>(n);
  if (s == Scenario::kPrefixWrmse) {
    QueryWorkload w = prefix_sum_workload(nn);
    Eigen::VectorXd g = Eigen::VectorXd::Ones(nn);
    g(nn - 1) = 7.0;
    return w.with_gamma(std::move(g));
  }
  return sliding_window_workload(nn, static_cast<Eigen::Index>(window));
}

// Answers (m x k) of one trial.
inline Eigen::MatrixXd run_method(Method method, Scenario scenario,
                                  const Dataset& ds, const QueryWorkload& w,
                                  const ExperimentConfig& cfg,
                                  std::uint64_t seed) {
  AdsBpcConfig mc = cfg.mechanism;
  mc.seed = seed;
  mc.lambda_cap = cfg.lambda_cap.value_or(ds.lambda_cap);
  if (scenario == Scenario::kWindowMaxVar) {
    mc.objective = ScaleObjective::kMinBudgetUnderVarianceCaps;
    mc.variance_caps = Eigen::VectorXd::Ones(w.query_count());
  } else {
    mc.objective = ScaleObjective::kWeightedVarianceSum;
  }
  GlobalSensitivityConfig gc;
  gc.GS = cfg.gs.value_or(ds.gs);
  gc.rho_total = mc.rho_total;
  gc.seed = seed;
  gc.noise_enabled = mc.noise_enabled;
  switch (method) {
    case Method::kAdsBpc: return run_adsbpc(ds.data, w, mc).answers;
    case Method::kIpa: return ipa(ds.data, w, gc).answers;
    case Method::kBin: return bin_tree(ds.data, w, gc).answers;
    case Method::kUmm: return umm(ds.data, w, gc).answers;
    case Method::kMmbpc: return mmbpc(ds.data, w, mc).answers;
    case Method::kStream: {
      StreamConfig sc;
      sc.rho_total = mc.rho_total;
      sc.svt_share = cfg.stream_svt_share;
      sc.max_doublings = cfg.stream_max_doublings;
      sc.threshold = cfg.stream_threshold;
      sc.seed = seed;
      sc.noise_enabled = mc.noise_enabled;
      return stream_mech(ds.data, w, sc).answers;
    }
  }
  throw ConfigError("unknown method");
}

// Worker count: ADSDP_THREADS if set, else the hardware concurrency.
inline unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ADSDP_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = std::min(n, static_cast<unsigned>(v));
  }
  return n;
}

// Calls fn(i) for i in [0, count) on up to `workers` threads.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += workers) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct TrialResult {
  std::size_t trial = 0;
  double error = 0.0;  // WRMSE, or this trial's largest squared error
};

struct MethodResult {
  Method method = Method::kAdsBpc;
  std::vector<TrialResult> trials;
  // Mean WRMSE over trials, or the largest per-query MSE across trials.
  double error = 0.0;
};

inline MethodResult run_trials(Method method, Scenario scenario,
                               const Dataset& ds, const ExperimentConfig& cfg,
                               std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw ConfigError("trials must be >= 1");
  const QueryWorkload w = scenario_workload(scenario, ds.data.days(), cfg.window_K);
  const Eigen::MatrixXd truth = w.queries * ds.data.aggregate();
  const auto k = static_cast<Eigen::Index>(ds.data.publisher_count());
  const Eigen::VectorXd gamma = repeat_weights(w.gamma, k);

  std::vector<std::optional<AnswerSet>> answers(trials);
  parallel_for(trials, worker_count(), [&](std::size_t t) {
    answers[t] = AnswerSet::from_matrices(
        run_method(method, scenario, ds, w, cfg, trial_seed(seed, t)), truth);
  });

  MethodResult out;
  out.method = method;
  std::vector<AnswerSet> all;
  for (std::size_t t = 0; t < trials; ++t) {
    const AnswerSet& a = *answers[t];
    double e = 0.0;
    if (scenario == Scenario::kPrefixWrmse) {
      e = wrmse(a, gamma);
    } else {
      e = max_mse(std::span<const AnswerSet>(&a, 1));
    }
    out.trials.push_back({t, e});
    all.push_back(a);
  }
  if (scenario == Scenario::kPrefixWrmse) {
    double sum = 0.0;
    for (const auto& t : out.trials) sum += t.error;
    out.error = sum / static_cast<double>(trials);
  } else {
    out.error = max_mse(all);
  }
  return out;
}

inline constexpr std::string_view kResultsHeader =
    "method,dataset,scenario,rho,n,trial,error";

inline void write_result_rows(std::ostream& out, const MethodResult& r,
                              const Dataset& ds, Scenario scenario, double rho) {
  out.precision(17);
  for (const auto& t : r.trials) {
    out << to_string(r.method) << ',' << ds.name << ',' << to_string(scenario)
        << ',' << rho << ',' << ds.data.days() << ',' << t.trial << ','
        << t.error << '\n';
  }
}

}  // namespace adsdp

#endif  // ADSDP_EXPERIMENT_HPP_
