// Copyright (c) 2026 The bayesdet Authors
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0

#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <string>
#include <string_view>

#include "bayesdet/errors.hpp"

namespace bayesdet {

// A real number in [0, 1]. Validated once, at construction.
class Probability {
 public:
  constexpr Probability() noexcept = default;

  explicit Probability(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw DomainError("probability must lie in [0, 1], got " + std::to_string(value));
    }
  }

  constexpr double value() const noexcept { return value_; }
  constexpr double complement() const noexcept { return 1.0 - value_; }

  constexpr bool is_interior() const noexcept { return value_ > 0.0 && value_ < 1.0; }

  friend constexpr auto operator<=>(Probability, Probability) noexcept = default;

 private:
  double value_ = 0.0;
};

// Nonnegative extended real; +infinity represents certainty.
class Odds {
 public:
  constexpr Odds() noexcept = default;

  explicit Odds(double value) : value_(value) {
    if (std::isnan(value) || value < 0.0) {
      throw DomainError("odds must be nonnegative, got " + std::to_string(value));
    }
  }

  constexpr double value() const noexcept { return value_; }
  bool is_infinite() const noexcept { return std::isinf(value_); }

  friend constexpr auto operator<=>(Odds, Odds) noexcept = default;

 private:
  double value_ = 0.0;
};

// One measurement at a fixed threshold: P(positive | present) and
// P(positive | absent). pd > pfa is not required.
struct DetectorCharacteristic {
  Probability pd;
  Probability pfa;

  friend constexpr bool operator==(const DetectorCharacteristic&,
                                   const DetectorCharacteristic&) noexcept = default;
};

// Positive means the return was larger than the threshold.
enum class MeasurementOutcome { Positive, Negative };

inline std::string_view to_string(MeasurementOutcome outcome) noexcept {
  return outcome == MeasurementOutcome::Positive ? "positive" : "negative";
}

inline char to_symbol(MeasurementOutcome outcome) noexcept {
  return outcome == MeasurementOutcome::Positive ? '+' : '-';
}

// Accepts "positive"/"negative" and the shorthand "+"/"-".
inline MeasurementOutcome parse_outcome(std::string_view text) {
  if (text == "positive" || text == "+") return MeasurementOutcome::Positive;
  if (text == "negative" || text == "-") return MeasurementOutcome::Negative;
  throw DomainError("outcome must be positive/negative (or +/-), got '" + std::string(text) + "'");
}

}  // namespace bayesdet
