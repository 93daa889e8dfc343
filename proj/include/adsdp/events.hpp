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

// Raw impression/conversion records, their CSV form, and the
// impression-conversion join that feeds attribution.

#ifndef ADSDP_EVENTS_HPP_
#define ADSDP_EVENTS_HPP_

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "adsdp/common.hpp"

namespace adsdp {

enum class Interaction { kView, kClick };

inline std::string_view to_string(Interaction interaction) {
  return interaction == Interaction::kClick ? "click" : "view";
}

struct ImpressionEvent {
  std::string user_id;
  std::string publisher_id;
  std::string advertiser_id;
  std::int64_t timestamp = 0;
  Interaction interaction = Interaction::kView;

  friend bool operator==(const ImpressionEvent&,
                         const ImpressionEvent&) = default;
};

struct ConversionEvent {
  std::string user_id;
  std::string advertiser_id;
  std::int64_t timestamp = 0;
  double value = 0.0;

  friend bool operator==(const ConversionEvent&,
                         const ConversionEvent&) = default;
};

// One joined (impression, conversion) pair. Indices refer to the input
// vectors handed to join(); the pair is only meaningful alongside them.
struct Touchpoint {
  std::size_t conversion = 0;
  std::size_t impression = 0;

  friend bool operator==(const Touchpoint&, const Touchpoint&) = default;
};

inline constexpr std::string_view kImpressionHeader =
    "user_id,publisher_id,advertiser_id,timestamp,interaction";
inline constexpr std::string_view kConversionHeader =
    "user_id,advertiser_id,timestamp,value";

namespace detail {

template <typename RowFn>
void read_csv(std::istream& in, std::string_view header, std::size_t columns,
              RowFn&& on_row) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  if (strip_cr(line) != header) {
    throw ParseError(1, "expected header '" + std::string(header) + "'");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = strip_cr(line);
    if (row.empty()) continue;
    const auto fields = split_csv_line(row);
    if (fields.size() != columns) {
      throw ParseError(line_no, "expected " + std::to_string(columns) +
                                    " fields, got " +
                                    std::to_string(fields.size()));
    }
    on_row(line_no, fields);
  }
}

inline std::int64_t parse_timestamp(std::size_t line_no,
                                    std::string_view text) {
  std::int64_t ts = 0;
  if (!parse_int64(text, ts)) {
    throw ParseError(line_no, "bad timestamp '" + std::string(text) + "'");
  }
  if (ts < 0) {
    throw ValidationError("line " + std::to_string(line_no) +
                          ": negative timestamp " + std::to_string(ts));
  }
  return ts;
}

inline void require_id(std::size_t line_no, std::string_view text,
                       std::string_view column) {
  if (text.empty()) {
    throw ValidationError("line " + std::to_string(line_no) + ": empty " +
                          std::string(column));
  }
}

inline std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

}  // namespace detail

inline std::vector<ImpressionEvent> read_impressions(std::istream& in) {
  std::vector<ImpressionEvent> events;
  detail::read_csv(
      in, kImpressionHeader, 5,
      [&](std::size_t line_no, const std::vector<std::string_view>& f) {
        ImpressionEvent e;
        detail::require_id(line_no, f[0], "user_id");
        detail::require_id(line_no, f[1], "publisher_id");
        detail::require_id(line_no, f[2], "advertiser_id");
        e.user_id = f[0];
        e.publisher_id = f[1];
        e.advertiser_id = f[2];
        e.timestamp = detail::parse_timestamp(line_no, f[3]);
        if (f[4] == "view") {
          e.interaction = Interaction::kView;
        } else if (f[4] == "click") {
          e.interaction = Interaction::kClick;
        } else {
          throw ParseError(line_no,
                           "bad interaction '" + std::string(f[4]) + "'");
        }
        events.push_back(std::move(e));
      });
  return events;
}

inline std::vector<ConversionEvent> read_conversions(std::istream& in) {
  std::vector<ConversionEvent> events;
  detail::read_csv(
      in, kConversionHeader, 4,
      [&](std::size_t line_no, const std::vector<std::string_view>& f) {
        ConversionEvent e;
        detail::require_id(line_no, f[0], "user_id");
        detail::require_id(line_no, f[1], "advertiser_id");
        e.user_id = f[0];
        e.advertiser_id = f[1];
        e.timestamp = detail::parse_timestamp(line_no, f[2]);
        if (!detail::parse_double(f[3], e.value)) {
          throw ParseError(line_no, "bad value '" + std::string(f[3]) + "'");
        }
        if (e.value < 0.0) {
          throw ValidationError("line " + std::to_string(line_no) +
                                ": negative conversion value");
        }
        events.push_back(std::move(e));
      });
  return events;
}

inline std::vector<ImpressionEvent> load_impressions(const std::string& path) {
  auto in = detail::open_for_read(path);
  return read_impressions(in);
}

inline std::vector<ConversionEvent> load_conversions(const std::string& path) {
  auto in = detail::open_for_read(path);
  return read_conversions(in);
}

inline void write_impressions(std::ostream& out,
                              const std::vector<ImpressionEvent>& events) {
  out << kImpressionHeader << '\n';
  for (const auto& e : events) {
    out << e.user_id << ',' << e.publisher_id << ',' << e.advertiser_id << ','
        << e.timestamp << ',' << to_string(e.interaction) << '\n';
  }
}

inline void write_conversions(std::ostream& out,
                              const std::vector<ConversionEvent>& events) {
  out << kConversionHeader << '\n';
  for (const auto& e : events) {
    out << e.user_id << ',' << e.advertiser_id << ',' << e.timestamp << ','
        << e.value << '\n';
  }
}

// All (impression, conversion) pairs with the same user and advertiser where
// the impression strictly precedes the conversion. Output is ordered by
// conversion timestamp, then impression timestamp, then event contents, so it
// does not depend on the order of either input.
inline std::vector<Touchpoint> join(
    const std::vector<ImpressionEvent>& impressions,
    const std::vector<ConversionEvent>& conversions) {
  struct KeyHash {
    std::size_t operator()(const std::pair<std::string, std::string>& k) const {
      const std::size_t h1 = std::hash<std::string>{}(k.first);
      const std::size_t h2 = std::hash<std::string>{}(k.second);
      return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
    }
  };
  std::unordered_map<std::pair<std::string, std::string>,
                     std::vector<std::size_t>, KeyHash>
      by_key;
  for (std::size_t i = 0; i < impressions.size(); ++i) {
    by_key[{impressions[i].user_id, impressions[i].advertiser_id}].push_back(i);
  }
  for (auto& [key, indices] : by_key) {
    std::stable_sort(indices.begin(), indices.end(),
                     [&](std::size_t a, std::size_t b) {
                       return impressions[a].timestamp <
                              impressions[b].timestamp;
                     });
  }

  std::vector<Touchpoint> out;
  for (std::size_t c = 0; c < conversions.size(); ++c) {
    const auto it =
        by_key.find({conversions[c].user_id, conversions[c].advertiser_id});
    if (it == by_key.end()) continue;
    for (std::size_t i : it->second) {
      if (impressions[i].timestamp >= conversions[c].timestamp) break;
      out.push_back({c, i});
    }
  }

  // Full tie-break on the event contents keeps the order canonical under
  // input permutation.
  auto key = [&](const Touchpoint& t) {
    const auto& c = conversions[t.conversion];
    const auto& i = impressions[t.impression];
    return std::tie(c.timestamp, i.timestamp, c.user_id, c.advertiser_id,
                    i.publisher_id, c.value, i.interaction);
  };
  std::stable_sort(out.begin(), out.end(),
                   [&](const Touchpoint& a, const Touchpoint& b) {
                     return key(a) < key(b);
                   });
  return out;
}

}  // namespace adsdp

#endif  // ADSDP_EVENTS_HPP_
