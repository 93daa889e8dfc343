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

// adsdp command line: generate data, run mechanisms, sweep parameters.
// Exit codes: 0 success, 2 usage error, 3 bad config or input data.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "adsdp/adsdp.hpp"

namespace {

constexpr int kUsageError = 2;
constexpr int kDataError = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using nlohmann::json;

adsdp::ExperimentConfig load_config(const std::string& path) {
  adsdp::ExperimentConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw adsdp::ConfigError("cannot open config '" + path + "'");
  const json j = json::parse(in);
  auto& m = cfg.mechanism;
  m.rho_total = adsdp::Budget(j.value("rho_total", 1.0));
  if (j.contains("split")) {
    const auto s = j.at("split").get<std::vector<double>>();
    if (s.size() != 3) throw adsdp::ConfigError("split needs three fractions");
    m.split = {s[0], s[1], s[2]};
  }
  m.l = j.value("l", m.l);
  m.p = j.value("p", m.p);
  if (j.contains("lambda_cap")) cfg.lambda_cap = j.at("lambda_cap").get<std::uint32_t>();
  if (j.contains("svt")) {
    const auto& s = j.at("svt");
    m.svt.T_up = s.value("T_up", m.svt.T_up);
    m.svt.T_down = s.value("T_down", m.svt.T_down);
    m.svt.s_up = s.value("s_up", m.svt.s_up);
    m.svt.s_down = s.value("s_down", m.svt.s_down);
    m.svt.k_max = s.value("k_max", m.svt.k_max);
  }
  cfg.window_K = j.value("window_K", cfg.window_K);
  m.seed = j.value("seed", m.seed);
  if (j.contains("stream")) {
    const auto& s = j.at("stream");
    cfg.stream_svt_share = s.value("svt_share", cfg.stream_svt_share);
    cfg.stream_max_doublings = s.value("max_doublings", cfg.stream_max_doublings);
    cfg.stream_threshold = s.value("threshold", cfg.stream_threshold);
  }
  if (j.contains("gs")) cfg.gs = j.at("gs").get<std::uint64_t>();
  m.validate();
  return cfg;
}

struct DatasetFlags {
  std::string dataset = "zipf";
  std::uint64_t users = 10'000;
  std::uint32_t publishers = 50;
  std::uint32_t days = 31;
  std::uint64_t data_seed = 1;
  std::string attribution = "lta";
};

void add_dataset_flags(CLI::App* app, DatasetFlags& f) {
  app->add_option("--dataset", f.dataset,
                  "Family (zipf, normal, uniform, criteo_like, facebook_like) or a "
                  "directory holding impressions.csv and conversions.csv");
  app->add_option("--users", f.users, "Synthetic users");
  app->add_option("--publishers", f.publishers, "Synthetic publishers");
  app->add_option("--days", f.days, "Number of days n");
  app->add_option("--data-seed", f.data_seed, "Seed of the synthetic data");
  app->add_option("--attribution", f.attribution, "lta, fta or uni (file datasets)");
}

adsdp::AttributionModel parse_attribution(const std::string& name) {
  if (name == "lta") return adsdp::AttributionModel::kLastTouch;
  if (name == "fta") return adsdp::AttributionModel::kFirstTouch;
  if (name == "uni") return adsdp::AttributionModel::kUniform;
  throw UsageError("unknown attribution model '" + name + "'");
}

adsdp::Dataset build_dataset(const DatasetFlags& f, std::uint32_t days) {
  namespace fs = std::filesystem;
  if (fs::is_directory(f.dataset)) {
    return adsdp::file_dataset(fs::path(f.dataset).filename().string(),
                               (fs::path(f.dataset) / "impressions.csv").string(),
                               (fs::path(f.dataset) / "conversions.csv").string(),
                               parse_attribution(f.attribution), days);
  }
  adsdp::SynthSpec spec;
  spec.family = adsdp::parse_family(f.dataset);
  spec.n_users = f.users;
  spec.n_publishers = f.publishers;
  spec.n_days = days;
  spec.seed = f.data_seed;
  return adsdp::synthetic_dataset(spec);
}

std::vector<adsdp::Method> parse_methods(const std::string& text) {
  std::vector<adsdp::Method> out;
  if (text == "all") return {std::begin(adsdp::kAllMethods), std::end(adsdp::kAllMethods)};
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto m = adsdp::parse_method(item);
    if (!m) throw UsageError("unknown method '" + item + "'");
    out.push_back(*m);
  }
  if (out.empty()) throw UsageError("no method given");
  return out;
}

adsdp::Scenario parse_scenario_or_throw(const std::string& text) {
  const auto s = adsdp::parse_scenario(text);
  if (!s) throw UsageError("unknown scenario '" + text + "'");
  return *s;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw adsdp::ConfigError("cannot write '" + path + "'");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"User-level DP streaming ad measurement"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a synthetic event log as CSV");
  DatasetFlags gen_flags;
  std::string gen_out = ".";
  std::uint64_t scale = 1;
  bool full_size = false;
  gen->add_option("--family", gen_flags.dataset, "Dataset family")->required();
  gen->add_option("--users", gen_flags.users, "Users");
  gen->add_option("--publishers", gen_flags.publishers, "Publishers");
  gen->add_option("--days", gen_flags.days, "Days");
  gen->add_option("--seed", gen_flags.data_seed, "Seed");
  gen->add_flag("--full-size", full_size, "Use the family's full-size shape");
  gen->add_option("--scale-down", scale, "Divide users and publishers by this");
  gen->add_option("--out", gen_out, "Output directory");

  // run
  auto* run = app.add_subcommand("run", "Run methods for a number of trials");
  DatasetFlags run_flags;
  std::string config_path, method = "all", scenario = "prefix_wrmse", out_path,
                           summary_path;
  std::size_t trials = 10;
  std::uint64_t seed = 0;
  bool seed_set = false;
  run->add_option("--config", config_path, "JSON config");
  run->add_option("--method", method, "Method, comma list or 'all'");
  run->add_option("--scenario", scenario, "prefix_wrmse or window_maxvar");
  run->add_option("--trials", trials, "Trials");
  run->add_option("--seed", seed, "Mechanism seed")->each([&](const std::string&) {
    seed_set = true;
  });
  run->add_option("--out", out_path, "Per-trial results CSV (stdout if empty)");
  run->add_option("--summary", summary_path, "Mean-error summary CSV");
  add_dataset_flags(run, run_flags);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Sweep rho or n");
  DatasetFlags sweep_flags;
  std::string axis, values_text, sweep_config, sweep_method = "all",
                                 sweep_scenario = "prefix_wrmse", sweep_out,
                                 plot_path;
  std::size_t sweep_trials = 10;
  std::uint64_t sweep_seed = 0;
  sweep->add_option("--axis", axis, "rho or n")->required();
  sweep->add_option("--values", values_text, "Comma-separated values")->required();
  sweep->add_option("--config", sweep_config, "JSON config");
  sweep->add_option("--method", sweep_method, "Method, comma list or 'all'");
  sweep->add_option("--scenario", sweep_scenario, "prefix_wrmse or window_maxvar");
  sweep->add_option("--trials", sweep_trials, "Trials");
  sweep->add_option("--seed", sweep_seed, "Mechanism seed");
  sweep->add_option("--out", sweep_out, "Long-format CSV (stdout if empty)");
  sweep->add_option("--plot-data", plot_path, "Mean error per method and value");
  add_dataset_flags(sweep, sweep_flags);

  // delta
  auto* delta = app.add_subcommand("delta", "Report the (epsilon, delta) of a zCDP budget");
  double d_rho = 1.0, d_eps = 1.0;
  delta->add_option("--rho", d_rho, "zCDP rho")->required();
  delta->add_option("--epsilon", d_eps, "epsilon")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*gen) {
      adsdp::SynthSpec spec;
      spec.family = adsdp::parse_family(gen_flags.dataset);
      if (full_size) spec = adsdp::default_spec(spec.family);
      if (!full_size) {
        spec.n_users = gen_flags.users;
        spec.n_publishers = gen_flags.publishers;
      }
      spec.n_days = gen_flags.days;
      spec.seed = gen_flags.data_seed;
      spec = adsdp::scale_down(spec, scale);
      const auto data = adsdp::generate(spec);
      std::filesystem::create_directories(gen_out);
      auto imp = open_out((std::filesystem::path(gen_out) / "impressions.csv").string());
      auto conv = open_out((std::filesystem::path(gen_out) / "conversions.csv").string());
      adsdp::write_events(data, imp, conv);
      std::cerr << "wrote " << data.conversions.size() << " conversions to "
                << gen_out << '\n';
      return 0;
    }

    if (*delta) {
      std::cout.precision(12);
      std::cout << adsdp::zcdp_to_dp(adsdp::Budget(d_rho), d_eps) << '\n';
      return 0;
    }

    if (*run) {
      if (trials == 0) throw UsageError("--trials must be >= 1");
      auto cfg = load_config(config_path);
      const auto methods = parse_methods(method);
      const auto sc = parse_scenario_or_throw(scenario);
      const std::uint64_t s = seed_set ? seed : cfg.mechanism.seed;
      const auto ds = build_dataset(run_flags, run_flags.days);
      std::ofstream file;
      if (!out_path.empty()) file = open_out(out_path);
      std::ostream& out = out_path.empty() ? std::cout : file;
      out << adsdp::kResultsHeader << '\n';
      std::vector<adsdp::MethodResult> results;
      for (auto m : methods) {
        results.push_back(adsdp::run_trials(m, sc, ds, cfg, trials, s));
        adsdp::write_result_rows(out, results.back(), ds, sc,
                                 cfg.mechanism.rho_total.rho());
      }
      if (!summary_path.empty()) {
        auto sum = open_out(summary_path);
        sum.precision(17);
        sum << "method,dataset,scenario,rho,n,error\n";
        for (const auto& r : results) {
          sum << adsdp::to_string(r.method) << ',' << ds.name << ','
              << adsdp::to_string(sc) << ',' << cfg.mechanism.rho_total.rho() << ','
              << ds.data.days() << ',' << r.error << '\n';
        }
      }
      return 0;
    }

    if (*sweep) {
      if (sweep_trials == 0) throw UsageError("--trials must be >= 1");
      if (axis != "rho" && axis != "n") throw UsageError("--axis must be rho or n");
      std::vector<double> values;
      std::stringstream ss(values_text);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
          values.push_back(std::stod(item));
        } catch (const std::exception&) {
          throw UsageError("bad sweep value '" + item + "'");
        }
      }
      if (values.empty()) throw UsageError("--values is empty");
      const auto base = load_config(sweep_config);
      const auto methods = parse_methods(sweep_method);
      const auto sc = parse_scenario_or_throw(sweep_scenario);
      std::ofstream file;
      if (!sweep_out.empty()) file = open_out(sweep_out);
      std::ostream& out = sweep_out.empty() ? std::cout : file;
      out << adsdp::kResultsHeader << '\n';
      std::ofstream plot;
      if (!plot_path.empty()) {
        plot = open_out(plot_path);
        plot.precision(17);
        plot << "method," << axis << ",mean_error\n";
      }
      std::optional<adsdp::Dataset> fixed;
      if (axis == "rho") fixed = build_dataset(sweep_flags, sweep_flags.days);
      for (double v : values) {
        auto cfg = base;
        std::optional<adsdp::Dataset> local;
        if (axis == "rho") {
          cfg.mechanism.rho_total = adsdp::Budget(v);
        } else {
          if (!(v >= 1.0)) throw UsageError("n values must be >= 1");
          local = build_dataset(sweep_flags, static_cast<std::uint32_t>(v));
        }
        const adsdp::Dataset& ds = axis == "rho" ? *fixed : *local;
        for (auto m : methods) {
          const auto r = adsdp::run_trials(m, sc, ds, cfg, sweep_trials, sweep_seed);
          adsdp::write_result_rows(out, r, ds, sc, cfg.mechanism.rho_total.rho());
          if (!plot_path.empty()) plot << adsdp::to_string(m) << ',' << v << ',' << r.error << '\n';
        }
      }
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return 0;
}
