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

#include <algorithm>
#include <cmath>
#include <map>

#include "adsdp/quantile.hpp"

namespace adsdp {
namespace {

// Law of the returned bound, computed straight from the mechanism's
// definition: pick interval i with weight len_i * exp(-eps |i - p k| / 2),
// draw uniformly inside it, round up and clamp into [1, cap].
std::map<std::uint32_t, double> bound_law(std::vector<std::uint32_t> counts, double p,
                                          double eps, std::uint32_t cap) {
  for (auto& c : counts) c = std::min(c, cap);
  std::sort(counts.begin(), counts.end());
  std::vector<double> edges = {0.0};
  for (auto c : counts) edges.push_back(c);
  edges.push_back(cap);
  const double k = static_cast<double>(counts.size());
  std::vector<double> w(counts.size() + 1);
  double z = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = (edges[i + 1] - edges[i]) * std::exp(-eps * std::abs(i - p * k) / 2.0);
    z += w[i];
  }
  std::map<std::uint32_t, double> law;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double len = edges[i + 1] - edges[i];
    if (len <= 0.0) continue;
    for (std::uint32_t b = 1; b <= cap; ++b) {
      const double overlap =
          std::max(0.0, std::min<double>(b, edges[i + 1]) - std::max<double>(b - 1, edges[i]));
      law[b] += w[i] / z * overlap / len;
    }
  }
  return law;
}

TEST(Quantile, OutputInRange) {
  Engine engine(1);
  const std::vector<std::uint32_t> counts = {1, 1, 3, 50, 2, 7};
  for (int i = 0; i < 2000; ++i) {
    const auto b = private_quantile(counts, {0.9, 0.3, 10}, engine);
    EXPECT_GE(b, 1u);
    EXPECT_LE(b, 10u);
  }
}

TEST(Quantile, DistributionMatchesDefinition) {
  const std::vector<std::uint32_t> counts = {1, 2, 2, 3, 5, 8, 12};
  const QuantileParams params{0.8, 1.5, 10};
  const auto law = bound_law(counts, params.p, params.epsilon, params.lambda_cap);
  Engine engine(99);
  const int trials = 200000;
  std::map<std::uint32_t, int> seen;
  for (int i = 0; i < trials; ++i) ++seen[private_quantile(counts, params, engine)];
  double total = 0.0;
  for (const auto& [b, prob] : law) {
    total += prob;
    const double mean = trials * prob;
    const double sd = std::sqrt(trials * prob * (1.0 - prob));
    EXPECT_LE(std::abs(seen[b] - mean), 3.0 * sd + 1.0) << "bound " << b;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Quantile, IntervalProbabilities) {
  const std::vector<std::uint32_t> counts = {4, 4, 4};
  const auto prob = quantile_interval_probabilities(counts, {0.5, 2.0, 10});
  ASSERT_EQ(prob.size(), 4u);
  // Zero-length intervals between equal counts are never chosen.
  EXPECT_EQ(prob[1], 0.0);
  EXPECT_EQ(prob[2], 0.0);
  const double w0 = 4.0 * std::exp(-2.0 * 1.5 / 2.0);
  const double w3 = 6.0 * std::exp(-2.0 * 1.5 / 2.0);
  EXPECT_NEAR(prob[0], w0 / (w0 + w3), 1e-12);
  EXPECT_NEAR(prob[3], w3 / (w0 + w3), 1e-12);
}

TEST(Quantile, AccurateOnUniformCounts) {
  std::vector<std::uint32_t> counts;
  for (int i = 0; i < 1000; ++i) counts.push_back(1 + i % 100);
  std::vector<std::uint32_t> sorted = counts;
  std::sort(sorted.begin(), sorted.end());
  const double truth = sorted[989];  // ceil(0.99 * 1000)-th smallest
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Engine engine(seed);
    const auto b = private_quantile(counts, {0.99, 10.0, 100}, engine);
    hits += std::abs(static_cast<double>(b) - truth) <= 2.0 ? 1 : 0;
  }
  EXPECT_GE(hits, 95);
}

TEST(Quantile, Budget) {
  EXPECT_DOUBLE_EQ(quantile_budget(1.0).rho(), 0.125);
  EXPECT_NEAR(quantile_budget(10.0).rho(), 9.9991, 1e-4);
  for (double rho : {0.001, 0.0214, 0.125, 1.0, 9.0}) {
    const double eps = quantile_epsilon_for_budget(Budget(rho));
    EXPECT_NEAR(quantile_budget(eps).rho(), rho, 1e-10);
  }
}

TEST(Quantile, Rejections) {
  Engine engine(1);
  const std::vector<std::uint32_t> none;
  EXPECT_THROW(private_quantile(none, {}, engine), std::domain_error);
  const std::vector<std::uint32_t> one = {1};
  EXPECT_THROW(private_quantile(one, {1.0, 1.0, 10}, engine), std::domain_error);
  EXPECT_THROW(private_quantile(one, {0.5, 0.0, 10}, engine), std::domain_error);
  EXPECT_THROW(private_quantile(one, {0.5, 1.0, 0}, engine), std::domain_error);
}

}  // namespace
}  // namespace adsdp
