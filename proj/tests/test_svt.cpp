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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "adsdp/svt.hpp"
#include "fixtures.hpp"

namespace adsdp {
namespace {

TEST(Svt, AboveThresholdOnExampleHistogram) {
  const auto counts = testing::svt_example_counts();
  EXPECT_EQ(counts.size(), 1863u);
  const std::vector<std::pair<double, std::int64_t>> expected = {
      {1, 351}, {2, 143}, {5, 90}, {8, 40}, {10, 15}, {13, 3}, {20, 0}};
  for (const auto& [tau, n] : expected) EXPECT_EQ(above_threshold(counts, tau), n) << tau;
  ContributionHistogram h;
  h.counts = {{"a", 3}, {"b", 1}, {"c", 7}};
  EXPECT_EQ(above_threshold(h, 2.5), 2);
}

TEST(Svt, WalkthroughLowersBound) {
  SvtConfig config;
  config.T_up = 100;
  config.T_down = 100;
  config.s_up = 1.5;
  config.s_down = 0.5;
  auto noise = NoiseSource::disabled();
  auto state = init_svt_state(config, noise);
  EXPECT_EQ(state.noisy_T_up, 100.0);
  EXPECT_EQ(state.noisy_T_down, -100.0);
  state.bound_list = {10.0};
  const double r = update_bound_svt(testing::svt_example_counts(), config, state, noise);
  // q_up = 15 stays below 100; q_down = 15 - 90 = -75 exceeds -100.
  EXPECT_EQ(r, 5.0);
  EXPECT_EQ(state.count_up, 0u);
  EXPECT_EQ(state.count_down, 1u);
  EXPECT_EQ(state.bound_list.back(), 5.0);
}

TEST(Svt, RaisesBoundWhenManyAbove) {
  SvtConfig config;
  config.T_up = 10;
  auto noise = NoiseSource::disabled();
  auto state = init_svt_state(config, noise);
  state.bound_list = {2.0};
  // 351 users above 1 and 143 above 2; few between 1.6 and 2.
  const double r = update_bound_svt(testing::svt_example_counts(), config, state, noise);
  EXPECT_DOUBLE_EQ(r, 2.0 * 1.3);
}

TEST(Svt, BothFiringKeepsTau) {
  SvtConfig config;
  config.T_up = 1;
  config.T_down = 1000;
  auto noise = NoiseSource::disabled();
  auto state = init_svt_state(config, noise);
  state.bound_list = {4.0, 6.0};
  const double r = update_bound_svt(testing::svt_example_counts(), config, state, noise);
  EXPECT_EQ(r, 5.0);
  EXPECT_EQ(state.count_up, 1u);
  EXPECT_EQ(state.count_down, 1u);
}

TEST(Svt, CheckUpdate) {
  auto noise = NoiseSource::disabled();
  auto fired = check_update(5.0, 1.0, 0, 3.0, 7, 50.0, noise);
  EXPECT_TRUE(fired.update);
  EXPECT_EQ(fired.count, 1u);
  EXPECT_EQ(fired.noisy_threshold, 50.0);
  auto tie = check_update(3.0, 1.0, 0, 3.0, 7, 50.0, noise);
  EXPECT_FALSE(tie.update);
  EXPECT_EQ(tie.noisy_threshold, 3.0);
  auto exhausted = check_update(1e9, 1.0, 7, 3.0, 7, 50.0, noise);
  EXPECT_FALSE(exhausted.update);
  EXPECT_EQ(exhausted.count, 7u);
  EXPECT_THROW(check_update(1.0, 0.0, 0, 0.0, 7, 0.0, noise), std::domain_error);
}

TEST(Svt, DetectorsStopAfterKMax) {
  SvtConfig config;
  config.k_max = 2;
  config.T_up = 1;
  config.T_down = 1e6;
  auto noise = NoiseSource::disabled();
  auto state = init_svt_state(config, noise);
  state.bound_list = {1.0};
  for (int day = 0; day < 5; ++day) {
    // Both detectors fire while they can, which leaves the bound alone.
    EXPECT_EQ(update_bound_svt(testing::svt_example_counts(), config, state, noise), 1.0);
  }
  EXPECT_EQ(state.count_up, 2u);
  EXPECT_EQ(state.count_down, 2u);

  config.T_down = 1e-3;
  state = init_svt_state(config, noise);
  state.bound_list = {1.0};
  std::vector<double> seen;
  for (int day = 0; day < 5; ++day) {
    seen.push_back(update_bound_svt(testing::svt_example_counts(), config, state, noise));
  }
  EXPECT_EQ(state.count_up, 2u);
  EXPECT_DOUBLE_EQ(seen[0], 1.3);
  EXPECT_EQ(seen[3], seen[4]);
}

TEST(Svt, QueryNoiseScale) {
  // P(q + Lap(b) > q + b) = exp(-1) / 2 with b = 4 k / eps.
  NoiseSource noise(17, true);
  const double b = 4.0 * 7 / 0.5;
  int fired = 0;
  const int trials = 100000;
  for (int i = 0; i < trials; ++i) {
    fired += check_update(0.0, 0.5, 0, b, 7, 0.0, noise).update ? 1 : 0;
  }
  const double p = std::exp(-1.0) / 2.0;
  EXPECT_NEAR(fired / static_cast<double>(trials), p, 4.0 * std::sqrt(p * (1 - p) / trials));
}

TEST(Svt, RollingBound) {
  SvtState state;
  EXPECT_THROW(rolling_bound(state, 3), std::logic_error);
  state.bound_list = {1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(rolling_bound(state, 3), 4.0);
  EXPECT_DOUBLE_EQ(rolling_bound(state, 10), 3.0);
}

TEST(Svt, ConfigValidation) {
  SvtConfig c;
  c.s_up = 1.0;
  EXPECT_THROW(c.validate(), std::domain_error);
  c = SvtConfig{};
  c.s_down = 1.0;
  EXPECT_THROW(c.validate(), std::domain_error);
  c = SvtConfig{};
  c.k_max = 0;
  EXPECT_THROW(c.validate(), std::domain_error);
  EXPECT_DOUBLE_EQ(svt_budget(1.0).rho(), puredp_to_zcdp(1.0).rho());
}

double q_up(const std::vector<std::uint32_t>& c, double tau) {
  return static_cast<double>(above_threshold(c, tau));
}
double q_down(const std::vector<std::uint32_t>& c, double tau, double s) {
  return static_cast<double>(above_threshold(c, tau) - above_threshold(c, s * tau));
}

// Replaces each user's count with every alternative and records the largest
// change of both queries.
void check_substitutions(const std::vector<std::uint32_t>& c, std::uint32_t max_count,
                         double& worst_up, double& worst_down) {
  for (double tau : {0.5, 1.0, 2.0, 2.5, 4.0, 6.0}) {
    for (double s : {0.3, 0.5, 0.8}) {
      const double up = q_up(c, tau);
      const double down = q_down(c, tau, s);
      for (std::size_t u = 0; u < c.size(); ++u) {
        auto d = c;
        for (std::uint32_t v = 0; v <= max_count; ++v) {
          d[u] = v;
          worst_up = std::max(worst_up, std::abs(q_up(d, tau) - up));
          worst_down = std::max(worst_down, std::abs(q_down(d, tau, s) - down));
        }
      }
    }
  }
}

TEST(Svt, QuerySensitivityIsOne) {
  double worst_up = 0.0;
  double worst_down = 0.0;
  // Every dataset of up to four users with counts 0..6.
  for (std::size_t users = 1; users <= 4; ++users) {
    std::vector<std::uint32_t> c(users, 0);
    for (;;) {
      check_substitutions(c, 6, worst_up, worst_down);
      std::size_t i = 0;
      while (i < users && ++c[i] > 6) c[i++] = 0;
      if (i == users) break;
    }
  }
  // Random datasets of up to twenty users.
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<std::uint32_t> c(1 + rep % 20);
    for (auto& x : c) x = std::uniform_int_distribution<std::uint32_t>(0, 10)(rng);
    check_substitutions(c, 10, worst_up, worst_down);
  }
  EXPECT_EQ(worst_up, 1.0);
  EXPECT_EQ(worst_down, 1.0);
}

}  // namespace
}  // namespace adsdp
