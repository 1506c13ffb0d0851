// Copyright (c) 2026 The bayesdet Authors
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0

#pragma once

// Envelope statistics of noise alone (Rayleigh) and signal plus noise
// (Rician), with the noise scale sigma normalized to 1. All amplitudes,
// thresholds and SNRs are in units of sigma; SNR is the amplitude ratio s/sigma.
//
// The equal-variance Gaussian family is the minimal stand-in for fields where
// the decision statistic is normal: noise ~ N(0, 1), signal ~ N(d, 1).

#include <cmath>
#include <numbers>
#include <string>
#include <type_traits>
#include <variant>

#include "bayesdet/errors.hpp"
#include "bayesdet/probability.hpp"
#include "bayesdet/special_functions.hpp"

namespace bayesdet {

namespace detail {

inline double require_finite_nonnegative(double value, const char* what) {
  if (!(value >= 0.0) || std::isinf(value)) {
    throw DomainError(std::string(what) + " must be finite and nonnegative, got " +
                      std::to_string(value));
  }
  return value;
}

}  // namespace detail

// Amplitude signal-to-noise ratio s/sigma.
class Snr {
 public:
  constexpr Snr() noexcept = default;
  explicit Snr(double value) : value_(detail::require_finite_nonnegative(value, "snr")) {}
  constexpr double value() const noexcept { return value_; }
  friend constexpr auto operator<=>(Snr, Snr) noexcept = default;

 private:
  double value_ = 0.0;
};

// Detection threshold on the envelope amplitude, in units of sigma.
class Threshold {
 public:
  constexpr Threshold() noexcept = default;
  explicit Threshold(double value)
      : value_(detail::require_finite_nonnegative(value, "threshold")) {}
  constexpr double value() const noexcept { return value_; }
  friend constexpr auto operator<=>(Threshold, Threshold) noexcept = default;

 private:
  double value_ = 0.0;
};

struct RayleighRician {
  Snr snr;
  friend constexpr bool operator==(const RayleighRician&, const RayleighRician&) = default;
};

struct GaussianEqualVariance {
  double separation = 0.0;
  friend constexpr bool operator==(const GaussianEqualVariance&,
                                   const GaussianEqualVariance&) = default;
};

class SignalModel {
 public:
  using Kind = std::variant<RayleighRician, GaussianEqualVariance>;

  static SignalModel rayleigh_rician(Snr snr) { return SignalModel(RayleighRician{snr}); }

  static SignalModel gaussian_equal_variance(double separation) {
    return SignalModel(GaussianEqualVariance{
        detail::require_finite_nonnegative(separation, "gaussian separation")});
  }

  const Kind& kind() const noexcept { return kind_; }

  bool is_rayleigh_rician() const noexcept {
    return std::holds_alternative<RayleighRician>(kind_);
  }

  // snr for the Rayleigh/Rician family, separation for the Gaussian one.
  double signal_strength() const noexcept {
    return std::visit(
        [](const auto& k) {
          if constexpr (std::is_same_v<std::decay_t<decltype(k)>, RayleighRician>) {
            return k.snr.value();
          } else {
            return k.separation;
          }
        },
        kind_);
  }

  friend bool operator==(const SignalModel&, const SignalModel&) = default;

 private:
  explicit SignalModel(Kind kind) : kind_(kind) {}
  Kind kind_;
};

// x exp(-x^2/2).
inline double rayleigh_pdf(double x) {
  if (!(x >= 0.0)) throw DomainError("rayleigh_pdf amplitude must be nonnegative");
  return x * std::exp(-0.5 * x * x);
}

// x exp(-(x^2 + s^2)/2) I0(x s), evaluated as x exp(-(x - s)^2/2) [e^{-xs} I0(xs)]
// so that large x*s never overflows.
inline double rician_pdf(double x, Snr snr) {
  if (!(x >= 0.0)) throw DomainError("rician_pdf amplitude must be nonnegative");
  if (std::isinf(x)) return 0.0;
  const double s = snr.value();
  const double d = x - s;
  return x * std::exp(-0.5 * d * d) * special::bessel_i0_scaled(x * s);
}

inline double standard_normal_pdf(double z) noexcept {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// Rayleigh tail: exp(-t^2/2).
inline Probability pfa_of_threshold(Threshold t) {
  return Probability(std::exp(-0.5 * t.value() * t.value()));
}

// sqrt(-2 ln pfa), the exact inverse of the Rayleigh tail.
inline Threshold threshold_of_pfa(Probability pfa) {
  if (pfa.value() == 0.0) throw DomainError("threshold is unbounded for pfa = 0");
  if (pfa.value() == 1.0) return Threshold(0.0);
  return Threshold(std::sqrt(-2.0 * std::log(pfa.value())));
}

// Q1(a, b) as a probability.
inline Probability marcum_q1(double a, double b) { return Probability(special::marcum_q1(a, b)); }

// Noise-only density of the decision statistic under `model`.
inline double noise_pdf(double x, const SignalModel& model) {
  if (model.is_rayleigh_rician()) return rayleigh_pdf(x);
  return standard_normal_pdf(x);
}

// Signal-present density of the decision statistic under `model`.
inline double signal_pdf(double x, const SignalModel& model) {
  if (model.is_rayleigh_rician()) return rician_pdf(x, Snr(model.signal_strength()));
  return standard_normal_pdf(x - model.signal_strength());
}

// Probability that noise alone exceeds t under `model`.
inline Probability pfa_of_threshold(Threshold t, const SignalModel& model) {
  if (model.is_rayleigh_rician()) return pfa_of_threshold(t);
  return Probability(special::normal_upper_tail(t.value()));
}

// Probability that signal plus noise exceeds t under `model`.
inline Probability pd_of_threshold(Threshold t, const SignalModel& model) {
  if (t.value() == 0.0 && model.is_rayleigh_rician()) return Probability(1.0);
  if (model.is_rayleigh_rician()) return marcum_q1(model.signal_strength(), t.value());
  return Probability(special::normal_upper_tail(t.value() - model.signal_strength()));
}

// Threshold whose noise tail equals pfa. The Gaussian family only reaches
// pfa <= 1/2 with a nonnegative threshold.
inline Threshold threshold_of_pfa(Probability pfa, const SignalModel& model) {
  if (model.is_rayleigh_rician()) return threshold_of_pfa(pfa);
  if (pfa.value() == 0.0) throw DomainError("threshold is unbounded for pfa = 0");
  if (pfa.value() > 0.5) {
    throw DomainError("gaussian model needs pfa <= 0.5 for a nonnegative threshold");
  }
  if (pfa.value() == 0.5) return Threshold(0.0);
  const double z = special::normal_upper_tail_inverse(pfa.value());
  return Threshold(z > 0.0 ? z : 0.0);
}

// (pd, pfa) of a threshold test on `model`.
inline DetectorCharacteristic detector_at(Threshold t, const SignalModel& model) {
  return DetectorCharacteristic{pd_of_threshold(t, model), pfa_of_threshold(t, model)};
}

// Smallest pfa the curve and root-finding machinery works with; the
// corresponding threshold bounds every threshold search.
inline constexpr double kMinimumSearchPfa = 1e-12;

// SNR at which a Rician envelope exceeds `t` with probability `pd`. Requires
// pfa_of_threshold(t) <= pd < 1. Bisection on the monotone map snr -> Q1(snr, t).
inline Snr snr_for_pd(Threshold t, Probability pd) {
  const double floor_pd = pfa_of_threshold(t).value();
  if (pd.value() < floor_pd || pd.value() >= 1.0) {
    throw Unachievable("pd must lie in [pfa(threshold), 1) to be reachable by an snr",
                       floor_pd, 1.0);
  }
  double lo = 0.0;
  double hi = 1.0;
  while (special::marcum_q1(hi, t.value()) < pd.value()) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw Unachievable("pd not reachable within snr <= 1e6", floor_pd, 1.0);
  }
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (special::marcum_q1(mid, t.value()) < pd.value()) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return Snr(0.5 * (lo + hi));
}

}  // namespace bayesdet
