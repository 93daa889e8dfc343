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

// Synthetic conversion streams. Each user draws a total conversion count
// from the family's law; every conversion then lands on a uniform day and a
// uniform publisher, preceded by one impression from that publisher.

#ifndef ADSDP_SYNTH_HPP_
#define ADSDP_SYNTH_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/special_functions/zeta.hpp>

#include "adsdp/common.hpp"
#include "adsdp/events.hpp"
#include "adsdp/random.hpp"
#include "adsdp/stream.hpp"

namespace adsdp {

enum class SynthFamily { kZipf, kNormal, kUniform, kCriteoLike, kFacebookLike };

inline std::string_view to_string(SynthFamily f) {
  switch (f) {
    case SynthFamily::kZipf: return "zipf";
    case SynthFamily::kNormal: return "normal";
    case SynthFamily::kUniform: return "uniform";
    case SynthFamily::kCriteoLike: return "criteo_like";
    case SynthFamily::kFacebookLike: return "facebook_like";
  }
  return "?";
}

inline SynthFamily parse_family(std::string_view name) {
  for (auto f : {SynthFamily::kZipf, SynthFamily::kNormal, SynthFamily::kUniform,
                 SynthFamily::kCriteoLike, SynthFamily::kFacebookLike}) {
    if (to_string(f) == name) return f;
  }
  throw ConfigError("unknown dataset family '" + std::string(name) + "'");
}

// Largest per-user total, which is also the GS the baselines use.
inline std::uint32_t family_cap(SynthFamily f) {
  switch (f) {
    case SynthFamily::kZipf: return 50;
    case SynthFamily::kNormal: return 150;
    case SynthFamily::kUniform: return 256;
    case SynthFamily::kCriteoLike: return 44;
    case SynthFamily::kFacebookLike: return 60;
  }
  return 1;
}

// Quantile cap used for this family's bounds.
inline std::uint32_t family_lambda_cap(SynthFamily f) {
  return f == SynthFamily::kNormal || f == SynthFamily::kUniform ? 20 : 10;
}

struct SynthSpec {
  SynthFamily family = SynthFamily::kZipf;
  std::uint64_t n_users = 1'000'000;
  std::uint32_t n_publishers = 1000;
  std::uint32_t n_days = 31;
  std::uint64_t seed = 1;
  std::int64_t ticks_per_day = 1'000'000'000;

  void validate() const {
    if (n_publishers < 1 || n_days < 1) {
      throw ConfigError("publishers and days must be positive");
    }
    if (ticks_per_day < 2) throw ConfigError("ticks_per_day too small");
  }
};

// Full-size shape of each family.
inline SynthSpec default_spec(SynthFamily f) {
  SynthSpec s;
  s.family = f;
  if (f == SynthFamily::kCriteoLike) {
    s.n_users = 1'608'081;
    s.n_publishers = 287;
  } else if (f == SynthFamily::kFacebookLike) {
    s.n_users = 1143;
    s.n_publishers = 1;
  }
  return s;
}

inline SynthSpec scale_down(SynthSpec spec, std::uint64_t factor) {
  if (factor < 1) throw ConfigError("scale factor must be >= 1");
  spec.n_users = std::max<std::uint64_t>(1, spec.n_users / factor);
  spec.n_publishers = static_cast<std::uint32_t>(
      std::max<std::uint64_t>(1, spec.n_publishers / factor));
  return spec;
}

namespace detail {

// Inverse-CDF sampler over {1..cap} with P(v) proportional to weight(v).
class TableSampler {
 public:
  explicit TableSampler(std::vector<double> weights) : cdf_(std::move(weights)) {
    for (std::size_t i = 1; i < cdf_.size(); ++i) cdf_[i] += cdf_[i - 1];
    for (double& c : cdf_) c /= cdf_.back();
  }
  std::uint32_t operator()(Engine& engine) const {
    const double u = uniform01(engine);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto idx = std::min<std::size_t>(it - cdf_.begin(), cdf_.size() - 1);
    return static_cast<std::uint32_t>(idx + 1);
  }
  double mean() const {
    double m = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < cdf_.size(); ++i) {
      m += static_cast<double>(i + 1) * (cdf_[i] - prev);
      prev = cdf_[i];
    }
    return m;
  }

 private:
  std::vector<double> cdf_;
};

inline std::vector<double> power_weights(double exponent, std::uint32_t cap) {
  std::vector<double> w(cap);
  for (std::uint32_t v = 1; v <= cap; ++v) w[v - 1] = std::pow(v, -exponent);
  return w;
}

// Exponent of the power law on {1..cap} whose mean is `target`.
inline double power_exponent_for_mean(double target, std::uint32_t cap) {
  double lo = 0.0;
  double hi = 64.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (TableSampler(power_weights(mid, cap)).mean() > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Zipf(3) on {1, 2, ...}, shifted by 10 and capped at 50. Every draw of 40
// or more maps to the cap, so the table stops there.
inline TableSampler shifted_zipf_sampler() {
  constexpr std::uint32_t kShift = 10;
  constexpr std::uint32_t kCap = 50;
  const double zeta3 = boost::math::zeta(3.0);
  std::vector<double> w(kCap, 0.0);
  double head = 0.0;
  for (std::uint32_t v = 1; v + kShift < kCap; ++v) {
    const double p = std::pow(v, -3.0) / zeta3;
    w[v + kShift - 1] = p;
    head += p;
  }
  w[kCap - 1] = 1.0 - head;
  return TableSampler(std::move(w));
}

}  // namespace detail

// Mean per-user totals the two real-data stand-ins are calibrated to.
inline constexpr double kCriteoLikeMean = 1'732'721.0 / 1'608'081.0;
inline constexpr double kFacebookLikeMean = 3264.0 / 1143.0;

// Per-user total conversion counts, one per user.
inline std::vector<std::uint32_t> sample_totals(const SynthSpec& spec,
                                                Engine& engine) {
  spec.validate();
  std::vector<std::uint32_t> totals(spec.n_users);
  const std::uint32_t cap = family_cap(spec.family);
  switch (spec.family) {
    case SynthFamily::kZipf: {
      const auto sampler = detail::shifted_zipf_sampler();
      for (auto& t : totals) t = sampler(engine);
      break;
    }
    case SynthFamily::kNormal:
      for (auto& t : totals) {
        const double v = std::round(50.0 + 30.0 * sample_standard_normal(engine));
        t = static_cast<std::uint32_t>(std::clamp(v, 0.0, static_cast<double>(cap)));
      }
      break;
    case SynthFamily::kUniform:
      for (auto& t : totals) t = 1 + static_cast<std::uint32_t>(uniform_index(engine, cap));
      break;
    case SynthFamily::kCriteoLike:
    case SynthFamily::kFacebookLike: {
      const double mean = spec.family == SynthFamily::kCriteoLike
                              ? kCriteoLikeMean
                              : kFacebookLikeMean;
      const detail::TableSampler sampler(detail::power_weights(
          detail::power_exponent_for_mean(mean, cap), cap));
      for (auto& t : totals) t = sampler(engine);
      break;
    }
  }
  return totals;
}

struct SyntheticConversion {
  std::uint32_t user = 0;
  std::uint32_t day = 0;
  std::uint32_t publisher = 0;
  std::int64_t timestamp = 0;
};

struct SyntheticData {
  SynthSpec spec;
  std::vector<std::uint32_t> totals;
  // Ordered by day, then timestamp.
  std::vector<SyntheticConversion> conversions;

  std::vector<std::string> publisher_names() const {
    std::vector<std::string> out;
    const auto width = std::to_string(spec.n_publishers).size();
    for (std::uint32_t p = 0; p < spec.n_publishers; ++p) {
      std::ostringstream name;
      name << "P-" << std::setw(static_cast<int>(width)) << std::setfill('0') << p + 1;
      out.push_back(name.str());
    }
    return out;
  }
};

inline std::string synthetic_user_name(std::uint32_t user) {
  return "u" + std::to_string(user + 1);
}

// Deterministic in spec (seed included). A conversion's timestamp is
// day * ticks_per_day + 2 * rank + 2 where rank orders the day's
// conversions by generation; its impression sits one tick earlier.
inline SyntheticData generate(const SynthSpec& spec) {
  spec.validate();
  Engine engine(spec.seed);
  SyntheticData data;
  data.spec = spec;
  data.totals = sample_totals(spec, engine);
  std::vector<std::vector<SyntheticConversion>> by_day(spec.n_days);
  for (std::uint64_t u = 0; u < spec.n_users; ++u) {
    for (std::uint32_t c = 0; c < data.totals[u]; ++c) {
      SyntheticConversion conv;
      conv.user = static_cast<std::uint32_t>(u);
      conv.day = static_cast<std::uint32_t>(uniform_index(engine, spec.n_days));
      conv.publisher =
          static_cast<std::uint32_t>(uniform_index(engine, spec.n_publishers));
      by_day[conv.day].push_back(conv);
    }
  }
  for (std::uint32_t d = 0; d < spec.n_days; ++d) {
    std::int64_t rank = 0;
    for (auto& conv : by_day[d]) {
      conv.timestamp = static_cast<std::int64_t>(d) * spec.ticks_per_day + 2 * rank + 2;
      if (conv.timestamp >= static_cast<std::int64_t>(d + 1) * spec.ticks_per_day) {
        throw ConfigError("ticks_per_day too small for this many conversions");
      }
      ++rank;
      data.conversions.push_back(conv);
    }
  }
  return data;
}

// Last-touch stream; every conversion credits its one publisher.
inline StreamData to_stream(const SyntheticData& data) {
  StreamData s(data.spec.n_days, data.spec.n_users, data.publisher_names());
  for (const auto& c : data.conversions) {
    const WeightEntry e{c.publisher, 1.0};
    s.mutable_day(c.day).add(c.user, c.timestamp, std::span<const WeightEntry>(&e, 1));
  }
  s.finalize();
  return s;
}

inline void write_events(const SyntheticData& data, std::ostream& impressions,
                         std::ostream& conversions) {
  const auto names = data.publisher_names();
  impressions << kImpressionHeader << '\n';
  conversions << kConversionHeader << '\n';
  for (const auto& c : data.conversions) {
    const auto user = synthetic_user_name(c.user);
    impressions << user << ',' << names[c.publisher] << ",Ad-1,"
                << c.timestamp - 1 << ",view\n";
    conversions << user << ",Ad-1," << c.timestamp << ",1\n";
  }
}

}  // namespace adsdp

#endif  // ADSDP_SYNTH_HPP_
