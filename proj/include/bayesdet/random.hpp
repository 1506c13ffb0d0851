// Copyright (c) 2026 The bayesdet Authors
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0

#pragma once

// Deterministic, splittable random streams.
//
// Streams are xoshiro256** (Blackman & Vigna) generators whose 256-bit state
// is filled by SplitMix64. The stream for (seed, index) is seeded with
// mix64(seed ^ mix64(index + golden)), so stream contents depend only on
// that pair and never on which thread consumes them.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace bayesdet::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += kGolden;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

// xoshiro256**; satisfies UniformRandomBitGenerator.
class Xoshiro256StarStar {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Xoshiro256StarStar(std::uint64_t seed) noexcept {
    SplitMix64 sm(seed);
    for (auto& word : s_) word = sm.next();
  }

  // Independent stream `index` derived from `seed`.
  static constexpr Xoshiro256StarStar stream(std::uint64_t seed, std::uint64_t index) noexcept {
    return Xoshiro256StarStar(mix64(seed ^ mix64(index + kGolden)));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

// Uniform on [0, 1) with 53 random bits.
template <class Generator>
double uniform_closed_open(Generator& gen) noexcept {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Uniform on the open interval (0, 1): midpoints of the 2^53 grid.
template <class Generator>
double uniform_open(Generator& gen) noexcept {
  return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

// Marsaglia polar method; yields standard normals in pairs.
class PolarNormal {
 public:
  template <class Generator>
  double operator()(Generator& gen) noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform_closed_open(gen) - 1.0;
      v = 2.0 * uniform_closed_open(gen) - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

  void reset() noexcept { has_spare_ = false; }

 private:
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace bayesdet::rng
