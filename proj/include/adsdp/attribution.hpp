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

#ifndef ADSDP_ATTRIBUTION_HPP_
#define ADSDP_ATTRIBUTION_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "adsdp/common.hpp"
#include "adsdp/events.hpp"

namespace adsdp {

enum class AttributionModel { kLastTouch, kFirstTouch, kUniform };

// Maps raw timestamps to day indices: day = timestamp / ticks_per_day.
struct DayClock {
  std::int64_t ticks_per_day = 1'000'000'000;

  std::size_t day_of(std::int64_t timestamp) const {
    if (ticks_per_day <= 0) throw ConfigError("ticks_per_day must be > 0");
    return static_cast<std::size_t>(timestamp / ticks_per_day);
  }
};

// Credit one conversion hands out. Weights are in [0, 1] and sum to 1 when
// the conversion has at least one touchpoint, to 0 otherwise.
struct AttributedConversion {
  std::string user_id;
  std::size_t day = 0;
  std::int64_t timestamp = 0;
  std::map<std::string, double> weights;

  double total_weight() const {
    double total = 0.0;
    for (const auto& [publisher, w] : weights) total += w;
    return total;
  }
  bool attributed() const { return !weights.empty(); }
};

// n x k matrix of attributed weight, day-major; column p belongs to
// publishers[p].
struct PublisherMatrix {
  std::vector<std::string> publishers;
  Eigen::MatrixXd values;

  std::size_t days() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t publisher_count() const { return publishers.size(); }
  double at(std::size_t day, const std::string& publisher) const {
    const auto it = std::find(publishers.begin(), publishers.end(), publisher);
    if (it == publishers.end()) throw std::out_of_range("unknown publisher");
    return values(static_cast<Eigen::Index>(day), it - publishers.begin());
  }
};

// Per-user count of attributed conversions on one day.
struct ContributionHistogram {
  std::size_t day = 0;
  std::map<std::string, std::uint32_t> counts;

  std::vector<std::uint32_t> values() const {
    std::vector<std::uint32_t> out;
    out.reserve(counts.size());
    for (const auto& [user, c] : counts) out.push_back(c);
    return out;
  }
};

// One AttributedConversion per input conversion, in input order.
inline std::vector<AttributedConversion> attribute(
    const std::vector<Touchpoint>& touchpoints,
    const std::vector<ImpressionEvent>& impressions,
    const std::vector<ConversionEvent>& conversions, AttributionModel model,
    DayClock clock = {}) {
  std::vector<std::vector<std::size_t>> touched(conversions.size());
  for (const auto& t : touchpoints) {
    if (t.conversion >= conversions.size() ||
        t.impression >= impressions.size()) {
      throw std::out_of_range("touchpoint refers past its inputs");
    }
    touched[t.conversion].push_back(t.impression);
  }

  std::vector<AttributedConversion> out;
  out.reserve(conversions.size());
  for (std::size_t c = 0; c < conversions.size(); ++c) {
    AttributedConversion ac;
    ac.user_id = conversions[c].user_id;
    ac.timestamp = conversions[c].timestamp;
    ac.day = clock.day_of(ac.timestamp);
    auto& imps = touched[c];
    // Join order is already by impression time; re-sort stably so callers
    // may pass touchpoints in any order.
    std::stable_sort(imps.begin(), imps.end(), [&](std::size_t a, std::size_t b) {
      return impressions[a].timestamp < impressions[b].timestamp;
    });
    if (!imps.empty()) {
      switch (model) {
        case AttributionModel::kLastTouch:
          ac.weights[impressions[imps.back()].publisher_id] = 1.0;
          break;
        case AttributionModel::kFirstTouch:
          ac.weights[impressions[imps.front()].publisher_id] = 1.0;
          break;
        case AttributionModel::kUniform: {
          // Divide by touchpoints, not distinct publishers.
          const double share = 1.0 / static_cast<double>(imps.size());
          for (std::size_t i : imps) {
            ac.weights[impressions[i].publisher_id] += share;
          }
          break;
        }
      }
    }
    out.push_back(std::move(ac));
  }
  return out;
}

inline PublisherMatrix aggregate(const std::vector<AttributedConversion>& attributed,
                                 std::size_t n,
                                 const std::vector<std::string>& publishers) {
  PublisherMatrix m;
  m.publishers = publishers;
  m.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                   static_cast<Eigen::Index>(publishers.size()));
  std::unordered_map<std::string, Eigen::Index> column;
  for (std::size_t p = 0; p < publishers.size(); ++p) {
    column.emplace(publishers[p], static_cast<Eigen::Index>(p));
  }
  for (const auto& ac : attributed) {
    if (ac.weights.empty()) continue;
    if (ac.day >= n) {
      throw std::out_of_range("conversion on day " + std::to_string(ac.day) +
                              " outside [0, " + std::to_string(n) + ")");
    }
    for (const auto& [publisher, w] : ac.weights) {
      const auto it = column.find(publisher);
      if (it == column.end()) {
        throw std::out_of_range("publisher '" + publisher +
                                "' missing from publisher order");
      }
      m.values(static_cast<Eigen::Index>(ac.day), it->second) += w;
    }
  }
  return m;
}

inline ContributionHistogram daily_histogram(
    const std::vector<AttributedConversion>& attributed, std::size_t day) {
  ContributionHistogram h;
  h.day = day;
  for (const auto& ac : attributed) {
    if (ac.day == day && ac.attributed()) ++h.counts[ac.user_id];
  }
  return h;
}

// Keeps at most the first `bound` attributed conversions of each user on
// `day` (by timestamp, ties by input order). Dropped conversions lose all of
// their publisher weight. Other days and unattributed rows pass through.
inline std::vector<AttributedConversion> clip(
    const std::vector<AttributedConversion>& attributed, std::size_t day,
    std::uint32_t bound) {
  if (bound == 0) throw std::invalid_argument("clip bound must be positive");
  std::vector<std::size_t> order(attributed.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return attributed[a].timestamp < attributed[b].timestamp;
  });
  std::vector<bool> keep(attributed.size(), true);
  std::unordered_map<std::string, std::uint32_t> seen;
  for (std::size_t idx : order) {
    const auto& ac = attributed[idx];
    if (ac.day != day || !ac.attributed()) continue;
    if (++seen[ac.user_id] > bound) keep[idx] = false;
  }
  std::vector<AttributedConversion> out;
  out.reserve(attributed.size());
  for (std::size_t i = 0; i < attributed.size(); ++i) {
    if (keep[i]) out.push_back(attributed[i]);
  }
  return out;
}

// Sorted distinct publisher ids across the attributed conversions.
inline std::vector<std::string> publishers_of(
    const std::vector<AttributedConversion>& attributed) {
  std::vector<std::string> out;
  std::unordered_map<std::string, bool> seen;
  for (const auto& ac : attributed) {
    for (const auto& [publisher, w] : ac.weights) {
      if (seen.emplace(publisher, true).second) out.push_back(publisher);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace adsdp

#endif  // ADSDP_ATTRIBUTION_HPP_
