// Copyright (c) 2026 The bayesdet Authors
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "bayesdet/errors.hpp"

namespace bayesdet::special {

namespace detail {

inline constexpr double kEpsilon = std::numeric_limits<double>::epsilon();

// Series below this argument, asymptotic expansion at and above it.
inline constexpr double kBesselCrossover = 15.0;

// Poisson mass allowed outside the summed window of the Marcum series.
inline constexpr double kPoissonTailMass = 1e-13;

inline void require_nonnegative(double x, const char* what) {
  if (!(x >= 0.0) || std::isinf(x)) {
    throw DomainError(std::string(what) + " must be finite and nonnegative");
  }
}

// sum_k (x^2/4)^k / (k!)^2; all terms positive so no cancellation.
inline double bessel_i0_series(double x) noexcept {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < 0.5 * kEpsilon * sum) break;
  }
  return sum;
}

// e^{-x} I0(x) ~ (2 pi x)^{-1/2} sum_k ((2k-1)!!)^2 / (k! (8x)^k), truncated
// at the smallest term.
inline double bessel_i0_scaled_asymptotic(double x) noexcept {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 500; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * odd * odd / (8.0 * k * x);
    if (next >= term) break;
    term = next;
    sum += term;
    if (term < 0.5 * kEpsilon * sum) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

// ln(n!). Exact summation below 32, Stirling series above (|error| < 1e-16 * ln n!).
inline double log_factorial(std::uint64_t n) noexcept {
  static const std::array<double, 32> table = [] {
    std::array<double, 32> t{};
    t[0] = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] + std::log(static_cast<double>(i));
    return t;
  }();
  if (n < table.size()) return table[n];
  const double z = static_cast<double>(n) + 1.0;
  const double inv = 1.0 / z;
  const double inv2 = inv * inv;
  const double series =
      inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0))));
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

// log of the Poisson(mean) probability mass at k; mean > 0.
inline double log_poisson(std::uint64_t k, double mean, double log_mean) noexcept {
  return -mean + static_cast<double>(k) * log_mean - log_factorial(k);
}

}  // namespace detail

// Modified Bessel function of the first kind, order zero. Overflows to
// +inf beyond x ~ 713; use bessel_i0_scaled there.
inline double bessel_i0(double x) {
  detail::require_nonnegative(x, "bessel_i0 argument");
  if (x < detail::kBesselCrossover) return detail::bessel_i0_series(x);
  return std::exp(x) * detail::bessel_i0_scaled_asymptotic(x);
}

// e^{-x} I0(x); finite for every finite x >= 0.
inline double bessel_i0_scaled(double x) {
  detail::require_nonnegative(x, "bessel_i0_scaled argument");
  if (x < detail::kBesselCrossover) return std::exp(-x) * detail::bessel_i0_series(x);
  return detail::bessel_i0_scaled_asymptotic(x);
}

// Upper regularized incomplete gamma Q(n, x) for integer order n >= 1:
//   Q(n, x) = e^{-x} sum_{j<n} x^j / j!
inline double upper_regularized_gamma(std::uint64_t n, double x) {
  if (n == 0) throw DomainError("upper_regularized_gamma order must be >= 1");
  detail::require_nonnegative(x, "upper_regularized_gamma argument");
  if (x == 0.0) return 1.0;
  const double log_x = std::log(x);
  double sum = 0.0;
  double log_term = -x;
  for (std::uint64_t j = 0; j < n; ++j) {
    if (j > 0) log_term += log_x - std::log(static_cast<double>(j));
    sum += std::exp(log_term);
  }
  return sum < 1.0 ? sum : 1.0;
}

// Marcum Q function of order one:
//   Q1(a, b) = integral_b^inf x exp(-(x^2 + a^2)/2) I0(a x) dx
// computed as the Poisson mixture
//   Q1(a, b) = sum_k Pois(k; a^2/2) Q(k+1, b^2/2),
// summed outward from the Poisson mode until less than 1e-13 of the
// Poisson mass remains outside the window (upward, also relative to the
// running sum once it drops below 1). Within the window Q(k+1, .)
// is advanced by Q(k+2, x) = Q(k+1, x) + x^{k+1} e^{-x} / (k+1)!, which
// only adds positive terms.
inline double marcum_q1(double a, double b) {
  detail::require_nonnegative(a, "marcum_q1 signal parameter");
  detail::require_nonnegative(b, "marcum_q1 threshold parameter");
  if (b == 0.0) return 1.0;
  const double x = 0.5 * b * b;
  if (a == 0.0) return std::exp(-x);

  const double mean = 0.5 * a * a;
  const double log_mean = std::log(mean);
  const double half_tol = 0.5 * detail::kPoissonTailMass;
  const auto mode = static_cast<std::uint64_t>(std::floor(mean));

  // Lower edge: stop once the mass below k is bounded by a geometric tail.
  std::uint64_t k_lo = mode;
  while (k_lo > 0) {
    const double ratio = static_cast<double>(k_lo - 1) / mean;
    const double below = std::exp(detail::log_poisson(k_lo - 1, mean, log_mean));
    if (ratio < 1.0 && below / (1.0 - ratio) < half_tol) break;
    --k_lo;
  }

  const double log_x = std::log(x);
  double gamma_q = upper_regularized_gamma(k_lo + 1, x);
  double log_pois_x = -x + static_cast<double>(k_lo) * log_x - detail::log_factorial(k_lo);

  double sum = 0.0;
  for (std::uint64_t k = k_lo;; ++k) {
    const double weight = std::exp(detail::log_poisson(k, mean, log_mean));
    sum += weight * gamma_q;
    if (k >= mode) {
      const double next_weight = weight * mean / static_cast<double>(k + 1);
      const double ratio = mean / static_cast<double>(k + 2);
      // Q(k+1, x) <= 1 bounds the omitted contribution by the omitted mass.
      const double omitted = next_weight / (1.0 - ratio);
      if (ratio < 1.0 && (omitted <= half_tol * std::min(1.0, sum) || next_weight == 0.0)) break;
    }
    log_pois_x += log_x - std::log(static_cast<double>(k + 1));
    gamma_q += std::exp(log_pois_x);
  }
  if (sum > 1.0) return 1.0;
  return sum;
}

// P(Z > z) for a standard normal Z.
inline double normal_upper_tail(double z) noexcept {
  return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

// z with P(Z > z) = p, for p in (0, 1). Rational initial guess refined by
// Halley steps against erfc.
inline double normal_upper_tail_inverse(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal tail probability must lie in (0, 1)");
  // Acklam's rational approximation of the lower-tail quantile at q = 1 - p.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  const double lower = 1.0 - p;
  const double small = p < 0.5 ? p : lower;
  double z;
  if (small < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(small));
    // Lower-tail quantile of `small` (negative).
    const double r = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
                     ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    z = p < 0.5 ? -r : r;
  } else {
    const double q = lower - 0.5;
    const double r = q * q;
    z = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  for (int i = 0; i < 3; ++i) {
    const double err = normal_upper_tail(z) - p;
    const double density = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    if (density == 0.0) break;
    const double u = -err / density;  // Newton step for the decreasing tail
    z = z - u / (1.0 + 0.5 * z * u);
  }
  return z;
}

}  // namespace bayesdet::special
