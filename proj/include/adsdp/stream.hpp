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

// Dense, index-based form of an attributed conversion stream. Users and
// publishers are interned to integers and each day keeps its conversions in
// timestamp order, which is what the mechanisms iterate over.

#ifndef ADSDP_STREAM_HPP_
#define ADSDP_STREAM_HPP_

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "adsdp/attribution.hpp"

namespace adsdp {

struct WeightEntry {
  std::uint32_t publisher = 0;
  double weight = 0.0;
};

struct ConversionRecord {
  std::uint32_t user = 0;
  std::int64_t timestamp = 0;
  // Half-open range into DayData::weights.
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
};

struct DayData {
  std::vector<ConversionRecord> records;
  std::vector<WeightEntry> weights;

  void add(std::uint32_t user, std::int64_t timestamp,
           std::span<const WeightEntry> entries) {
    ConversionRecord r;
    r.user = user;
    r.timestamp = timestamp;
    r.begin = static_cast<std::uint32_t>(weights.size());
    weights.insert(weights.end(), entries.begin(), entries.end());
    r.end = static_cast<std::uint32_t>(weights.size());
    records.push_back(r);
  }

  std::span<const WeightEntry> weights_of(const ConversionRecord& r) const {
    return {weights.data() + r.begin, weights.data() + r.end};
  }

  // Stable timestamp order; ties keep insertion order.
  void sort_by_time() {
    std::stable_sort(records.begin(), records.end(),
                     [](const ConversionRecord& a, const ConversionRecord& b) {
                       return a.timestamp < b.timestamp;
                     });
  }
};

class StreamData {
 public:
  StreamData() = default;
  StreamData(std::size_t days, std::size_t users,
             std::vector<std::string> publishers)
      : days_(days), users_(users), publishers_(std::move(publishers)) {}

  // Attributed conversions (only those with weight) become records. User ids
  // are interned in first-seen order.
  static StreamData from_attributed(
      const std::vector<AttributedConversion>& attributed, std::size_t n,
      const std::vector<std::string>& publishers) {
    std::unordered_map<std::string, std::uint32_t> user_index;
    std::unordered_map<std::string, std::uint32_t> pub_index;
    for (std::size_t p = 0; p < publishers.size(); ++p) {
      pub_index.emplace(publishers[p], static_cast<std::uint32_t>(p));
    }
    for (const auto& ac : attributed) {
      if (ac.attributed()) {
        user_index.emplace(ac.user_id,
                           static_cast<std::uint32_t>(user_index.size()));
      }
    }
    StreamData s(n, user_index.size(), publishers);
    std::vector<WeightEntry> entries;
    for (const auto& ac : attributed) {
      if (!ac.attributed()) continue;
      if (ac.day >= n) throw std::out_of_range("conversion day outside stream");
      entries.clear();
      for (const auto& [publisher, w] : ac.weights) {
        const auto it = pub_index.find(publisher);
        if (it == pub_index.end()) {
          throw std::out_of_range("publisher '" + publisher + "' not listed");
        }
        entries.push_back({it->second, w});
      }
      s.days_[ac.day].add(user_index.at(ac.user_id), ac.timestamp, entries);
    }
    s.finalize();
    return s;
  }

  std::size_t days() const { return days_.size(); }
  std::size_t users() const { return users_; }
  std::size_t publisher_count() const { return publishers_.size(); }
  const std::vector<std::string>& publishers() const { return publishers_; }

  const DayData& day(std::size_t i) const { return days_.at(i); }
  DayData& mutable_day(std::size_t i) { return days_.at(i); }

  void finalize() {
    for (auto& d : days_) d.sort_by_time();
  }

  std::size_t record_count() const {
    std::size_t total = 0;
    for (const auto& d : days_) total += d.records.size();
    return total;
  }

  // Truth matrix (n x k) of attributed weight.
  Eigen::MatrixXd aggregate() const {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(
        static_cast<Eigen::Index>(days()),
        static_cast<Eigen::Index>(publisher_count()));
    for (std::size_t i = 0; i < days(); ++i) {
      x.row(static_cast<Eigen::Index>(i)) = aggregate_day(days_[i]);
    }
    return x;
  }

  Eigen::RowVectorXd aggregate_day(const DayData& d) const {
    Eigen::RowVectorXd row =
        Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(publisher_count()));
    for (const auto& r : d.records) {
      for (const auto& w : d.weights_of(r)) row(w.publisher) += w.weight;
    }
    return row;
  }

  // Same users and publishers, different day contents.
  StreamData with_days(std::vector<DayData> days) const {
    StreamData out;
    out.users_ = users_;
    out.publishers_ = publishers_;
    out.days_ = std::move(days);
    return out;
  }

 private:
  std::vector<DayData> days_;
  std::size_t users_ = 0;
  std::vector<std::string> publishers_;
};

// Reusable per-user counters sized to the user universe.
class UserCounter {
 public:
  explicit UserCounter(std::size_t users) : counts_(users, 0) {}

  std::uint32_t increment(std::uint32_t user) {
    if (counts_[user]++ == 0) touched_.push_back(user);
    return counts_[user];
  }
  std::uint32_t get(std::uint32_t user) const { return counts_[user]; }

  // Counts of users seen since the last reset, in first-seen order.
  std::vector<std::uint32_t> values() const {
    std::vector<std::uint32_t> out;
    out.reserve(touched_.size());
    for (std::uint32_t u : touched_) out.push_back(counts_[u]);
    return out;
  }

  void reset() {
    for (std::uint32_t u : touched_) counts_[u] = 0;
    touched_.clear();
  }

 private:
  std::vector<std::uint32_t> counts_;
  std::vector<std::uint32_t> touched_;
};

// Per-user conversion counts of one day (users with zero are omitted).
inline std::vector<std::uint32_t> day_counts(const DayData& d,
                                             UserCounter& counter) {
  counter.reset();
  for (const auto& r : d.records) counter.increment(r.user);
  auto out = counter.values();
  counter.reset();
  return out;
}

// Keeps each user's first `bound` records of the day.
inline DayData clip_day(const DayData& d, std::uint64_t bound,
                        UserCounter& counter) {
  counter.reset();
  DayData out;
  out.records.reserve(d.records.size());
  out.weights.reserve(d.weights.size());
  for (const auto& r : d.records) {
    if (counter.increment(r.user) > bound) continue;
    out.add(r.user, r.timestamp, d.weights_of(r));
  }
  counter.reset();
  return out;
}

// Keeps each user's first `bound` records over the whole stream.
inline StreamData clip_global(const StreamData& s, std::uint64_t bound) {
  UserCounter counter(s.users());
  std::vector<DayData> days;
  days.reserve(s.days());
  for (std::size_t i = 0; i < s.days(); ++i) {
    const DayData& d = s.day(i);
    DayData out;
    for (const auto& r : d.records) {
      if (counter.increment(r.user) > bound) continue;
      out.add(r.user, r.timestamp, d.weights_of(r));
    }
    days.push_back(std::move(out));
  }
  return s.with_days(std::move(days));
}

// Largest number of records any user holds in the stream.
inline std::uint64_t max_user_total(const StreamData& s) {
  UserCounter counter(s.users());
  std::uint64_t best = 0;
  for (std::size_t i = 0; i < s.days(); ++i) {
    for (const auto& r : s.day(i).records) {
      best = std::max<std::uint64_t>(best, counter.increment(r.user));
    }
  }
  return best;
}

}  // namespace adsdp

#endif  // ADSDP_STREAM_HPP_
