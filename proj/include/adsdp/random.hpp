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

#ifndef ADSDP_RANDOM_HPP_
#define ADSDP_RANDOM_HPP_

#include <cmath>
#include <cstdint>
#include <random>

namespace adsdp {

using Engine = std::mt19937_64;

// Uniform double in [0, 1) built from the top 53 bits of one 64-bit draw.
inline double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

// Uniform double in the open interval (0, 1).
inline double uniform_open01(Engine& engine) {
  for (;;) {
    const double u = uniform01(engine);
    if (u > 0.0) return u;
  }
}

// Uniform integer in [0, n) by rejection, free of modulo bias.
inline std::uint64_t uniform_index(Engine& engine, std::uint64_t n) {
  const std::uint64_t limit = Engine::max() - Engine::max() % n;
  for (;;) {
    const std::uint64_t v = engine();
    if (v < limit) return v % n;
  }
}

// Laplace(0, scale) by inverse CDF.
inline double sample_laplace(Engine& engine, double scale) {
  const double u = uniform_open01(engine) - 0.5;
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0.0 ? -magnitude : magnitude;
}

// Standard normal via Box-Muller on two open-interval uniforms. Written out
// (instead of std::normal_distribution) so streams are reproducible across
// standard libraries.
inline double sample_standard_normal(Engine& engine) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  const double u1 = uniform_open01(engine);
  const double u2 = uniform01(engine);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

// Source of DP noise for a single stream. With noise disabled every draw is
// exactly zero (the engine is not advanced), which makes the deterministic
// walkthroughs reproducible. Sampling steps that are part of an algorithm's
// output distribution (e.g. interval selection in the quantile) use engine()
// directly and are unaffected by the switch.
class NoiseSource {
 public:
  explicit NoiseSource(std::uint64_t seed, bool enabled = true)
      : engine_(seed), enabled_(enabled) {}

  static NoiseSource disabled(std::uint64_t seed = 0) {
    return NoiseSource(seed, false);
  }

  bool enabled() const { return enabled_; }
  Engine& engine() { return engine_; }

  double laplace(double scale) {
    return enabled_ ? sample_laplace(engine_, scale) : 0.0;
  }

  double gaussian(double sigma) {
    return enabled_ ? sigma * sample_standard_normal(engine_) : 0.0;
  }

 private:
  Engine engine_;
  bool enabled_;
};

// Seed for trial `trial` of a run seeded with `seed`.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  return seed ^ trial;
}

}  // namespace adsdp

#endif  // ADSDP_RANDOM_HPP_
