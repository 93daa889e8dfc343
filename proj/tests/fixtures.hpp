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

// Small worked datasets shared by the tests and the acceptance binary.

#ifndef ADSDP_TESTS_FIXTURES_HPP_
#define ADSDP_TESTS_FIXTURES_HPP_

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "adsdp/adsdp.hpp"

namespace adsdp::testing {

// Two users, two publishers, one advertiser, one day of abstract ticks.
inline constexpr const char* kImpressionsCsv =
    "user_id,publisher_id,advertiser_id,timestamp,interaction\n"
    "u1,P-1,Ad-1,1,view\n"
    "u1,P-1,Ad-1,11,view\n"
    "u2,P-1,Ad-1,15,click\n"
    "u2,P-2,Ad-1,25,view\n";

inline constexpr const char* kConversionsCsv =
    "user_id,advertiser_id,timestamp,value\n"
    "u1,Ad-1,10,1\n"
    "u2,Ad-1,20,1\n"
    "u2,Ad-1,30,1\n";

inline std::vector<ImpressionEvent> example_impressions() {
  std::istringstream in(kImpressionsCsv);
  return read_impressions(in);
}

inline std::vector<ConversionEvent> example_conversions() {
  std::istringstream in(kConversionsCsv);
  return read_conversions(in);
}

// Contribution histogram with Hist[c] users holding exactly c conversions.
inline std::vector<std::uint32_t> svt_example_counts() {
  const std::map<std::uint32_t, std::uint32_t> hist = {
      {1, 1512}, {2, 208}, {5, 53}, {8, 50}, {10, 25}, {13, 12}, {20, 3}};
  std::vector<std::uint32_t> counts;
  for (const auto& [c, users] : hist) counts.insert(counts.end(), users, c);
  return counts;
}

// Builds a stream where day_counts[i][u] is the number of single-publisher
// conversions user u makes on day i, publisher chosen round-robin.
inline StreamData stream_from_counts(
    const std::vector<std::vector<std::uint32_t>>& day_counts,
    std::size_t publishers = 1) {
  std::size_t users = 0;
  for (const auto& d : day_counts) users = std::max(users, d.size());
  std::vector<std::string> names;
  for (std::size_t p = 0; p < publishers; ++p) names.push_back("P-" + std::to_string(p + 1));
  StreamData s(day_counts.size(), users, names);
  std::int64_t ts = 0;
  std::uint32_t next_pub = 0;
  for (std::size_t i = 0; i < day_counts.size(); ++i) {
    for (std::size_t u = 0; u < day_counts[i].size(); ++u) {
      for (std::uint32_t c = 0; c < day_counts[i][u]; ++c) {
        const WeightEntry e{next_pub, 1.0};
        next_pub = static_cast<std::uint32_t>((next_pub + 1) % publishers);
        s.mutable_day(i).add(static_cast<std::uint32_t>(u), ++ts,
                             std::span<const WeightEntry>(&e, 1));
      }
    }
  }
  s.finalize();
  return s;
}

}  // namespace adsdp::testing

#endif  // ADSDP_TESTS_FIXTURES_HPP_
