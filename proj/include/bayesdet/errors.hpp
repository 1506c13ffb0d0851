// Copyright (c) 2026 The bayesdet Authors
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace bayesdet {

// Argument outside the mathematical domain of an operation (negative
// amplitude, probability outside [0,1], pfa = 0 for an inverse, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A likelihood ratio of the form 0/0.
class IndeterminateLikelihood : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Conditioning on an outcome whose probability is exactly zero. When the
// update happened inside a fold, look_index() names the offending look.
class IndeterminateUpdate : public std::runtime_error {
 public:
  explicit IndeterminateUpdate(const std::string& what,
                               std::optional<std::size_t> look_index = std::nullopt)
      : std::runtime_error(what), look_index_(look_index) {}

  std::optional<std::size_t> look_index() const noexcept { return look_index_; }

 private:
  std::optional<std::size_t> look_index_;
};

// A requested operating point lies outside what the model can reach.
// [achievable_low(), achievable_high()] is the open range that can be hit.
class Unachievable : public std::runtime_error {
 public:
  Unachievable(const std::string& what, double low, double high)
      : std::runtime_error(what), low_(low), high_(high) {}

  double achievable_low() const noexcept { return low_; }
  double achievable_high() const noexcept { return high_; }

 private:
  double low_;
  double high_;
};

}  // namespace bayesdet
