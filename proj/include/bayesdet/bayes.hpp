// Copyright (c) 2026 The bayesdet Authors
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0

#pragma once

// Bayesian belief arithmetic over (Pd, Pfa) detector characteristics.
//
// Single looks use the direct posterior formulas
//
//   positive:  Pd*prior / [Pd*prior + Pfa*(1-prior)]
//   negative:  (1-Pd)*prior / [(1-Pd)*prior + (1-Pfa)*(1-prior)]
//
// and sequences are accumulated in log-odds, where each look adds
// log(Pd/Pfa) or log((1-Pd)/(1-Pfa)). Priors of exactly 0 or 1 are fixed
// points of every update. Likelihoods are extended reals: Pfa = 0 drives a
// positive look to certainty rather than being clamped, and 0/0 cases throw.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bayesdet/errors.hpp"
#include "bayesdet/probability.hpp"

namespace bayesdet {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// p / (1 - p); +infinity at p = 1.
inline Odds odds_from_prob(Probability p) {
  if (p.value() == 1.0) return Odds(kInfinity);
  return Odds(p.value() / (1.0 - p.value()));
}

// o / (1 + o); 1 at o = +infinity.
inline Probability prob_from_odds(Odds o) {
  if (o.is_infinite()) return Probability(1.0);
  return Probability(o.value() / (1.0 + o.value()));
}

// log(p / (1 - p)), with -inf and +inf at the endpoints.
inline double log_odds(Probability p) noexcept {
  if (p.value() == 0.0) return -kInfinity;
  if (p.value() == 1.0) return kInfinity;
  return std::log(p.value()) - std::log1p(-p.value());
}

inline Probability prob_from_log_odds(double lo) {
  if (std::isnan(lo)) throw DomainError("log-odds is NaN");
  if (lo >= 0.0) return Probability(1.0 / (1.0 + std::exp(-lo)));
  const double e = std::exp(lo);
  return Probability(e / (1.0 + e));
}

// Pd / Pfa.
inline double likelihood(const DetectorCharacteristic& det) {
  const double pd = det.pd.value();
  const double pfa = det.pfa.value();
  if (pd == 0.0 && pfa == 0.0) {
    throw IndeterminateLikelihood("likelihood Pd/Pfa is 0/0 (pd = pfa = 0)");
  }
  if (pfa == 0.0) return kInfinity;
  return pd / pfa;
}

// (1 - Pd) / (1 - Pfa).
inline double complementary_likelihood(const DetectorCharacteristic& det) {
  const double miss = det.pd.complement();
  const double reject = det.pfa.complement();
  if (miss == 0.0 && reject == 0.0) {
    throw IndeterminateLikelihood(
        "complementary likelihood (1-Pd)/(1-Pfa) is 0/0 (pd = pfa = 1)");
  }
  if (reject == 0.0) return kInfinity;
  return miss / reject;
}

// Log of the likelihood that applies to `outcome`; may be +/-infinity.
inline double log_likelihood(MeasurementOutcome outcome, const DetectorCharacteristic& det) {
  const double pd = det.pd.value();
  const double pfa = det.pfa.value();
  if (outcome == MeasurementOutcome::Positive) {
    if (pd == 0.0 && pfa == 0.0) {
      throw IndeterminateLikelihood("likelihood Pd/Pfa is 0/0 (pd = pfa = 0)");
    }
    if (pd == pfa) return 0.0;
    return std::log(pd) - std::log(pfa);
  }
  if (pd == 1.0 && pfa == 1.0) {
    throw IndeterminateLikelihood(
        "complementary likelihood (1-Pd)/(1-Pfa) is 0/0 (pd = pfa = 1)");
  }
  if (pd == pfa) return 0.0;
  return std::log1p(-pd) - std::log1p(-pfa);
}

namespace detail {

// hit*prior / [hit*prior + false_hit*(1-prior)], where (hit, false_hit) are
// the probabilities of the observed outcome under presence and absence.
inline Probability conditional_presence(Probability prior, double hit, double false_hit,
                                        MeasurementOutcome outcome,
                                        const DetectorCharacteristic& det) {
  if (!prior.is_interior()) return prior;
  if (hit == 0.0 && false_hit == 0.0) {
    throw IndeterminateUpdate(outcome == MeasurementOutcome::Positive
                                  ? "positive outcome has probability zero (pd = pfa = 0)"
                                  : "negative outcome has probability zero (pd = pfa = 1)");
  }
  if (hit == false_hit) return prior;
  const double num = hit * prior.value();
  const double den = num + false_hit * prior.complement();
  if (std::isnormal(den) && (num == 0.0 || std::isnormal(num))) {
    return Probability(num / den);
  }
  // Products underflowed; the log-odds route has no such problem.
  return prob_from_log_odds(log_odds(prior) + log_likelihood(outcome, det));
}

}  // namespace detail

// Posterior probability of presence after an above-threshold return.
inline Probability update_positive(Probability prior, const DetectorCharacteristic& det) {
  return detail::conditional_presence(prior, det.pd.value(), det.pfa.value(),
                                      MeasurementOutcome::Positive, det);
}

// Posterior probability of presence after a below-threshold return.
inline Probability update_negative(Probability prior, const DetectorCharacteristic& det) {
  return detail::conditional_presence(prior, det.pd.complement(), det.pfa.complement(),
                                      MeasurementOutcome::Negative, det);
}

inline Probability update(Probability prior, MeasurementOutcome outcome,
                          const DetectorCharacteristic& det) {
  return outcome == MeasurementOutcome::Positive ? update_positive(prior, det)
                                                 : update_negative(prior, det);
}

// Log posterior odds after n_positive above-threshold and n_negative
// below-threshold looks with a constant detector. Endpoint priors map to
// -inf/+inf unchanged.
inline double log_odds_after_n_looks(Probability prior, const DetectorCharacteristic& det,
                                     std::uint64_t n_positive, std::uint64_t n_negative) {
  const double start = log_odds(prior);
  if (!prior.is_interior()) return start;

  double total = start;
  try {
    if (n_positive > 0) {
      total += static_cast<double>(n_positive) *
               log_likelihood(MeasurementOutcome::Positive, det);
    }
    if (n_negative > 0) {
      total += static_cast<double>(n_negative) *
               log_likelihood(MeasurementOutcome::Negative, det);
    }
  } catch (const IndeterminateLikelihood& e) {
    throw IndeterminateUpdate(e.what());
  }
  if (std::isnan(total)) {
    throw IndeterminateUpdate(
        "positive and negative looks are each certain of opposite states (0 * infinity)");
  }
  return total;
}

// Closed-form posterior after N looks with a constant detector:
//   1 / (1 + (Pfa/Pd)^Np * ((1-Pfa)/(1-Pd))^Nn * (1/prior - 1))
// evaluated in log-odds so counts in the millions stay finite.
inline Probability posterior_after_n_looks(Probability prior, const DetectorCharacteristic& det,
                                           std::uint64_t n_positive, std::uint64_t n_negative) {
  if (!prior.is_interior()) return prior;
  return prob_from_log_odds(log_odds_after_n_looks(prior, det, n_positive, n_negative));
}

struct Look {
  MeasurementOutcome outcome;
  DetectorCharacteristic detector;
};

struct LookRecord {
  MeasurementOutcome outcome;
  DetectorCharacteristic detector;
  Probability posterior_after;
  double log_odds_after;
};

// The operator's evolving belief. Immutable: observe() returns a new state.
class BeliefState {
 public:
  explicit BeliefState(Probability initial_prior)
      : initial_prior_(initial_prior), current_(initial_prior), log_odds_(log_odds(initial_prior)) {}

  Probability initial_prior() const noexcept { return initial_prior_; }
  Probability current() const noexcept { return current_; }
  double current_log_odds() const noexcept { return log_odds_; }
  const std::vector<LookRecord>& looks() const noexcept { return looks_; }

  BeliefState observe(MeasurementOutcome outcome, const DetectorCharacteristic& det) const& {
    BeliefState next = *this;
    next.append(outcome, det);
    return next;
  }

  BeliefState observe(MeasurementOutcome outcome, const DetectorCharacteristic& det) && {
    append(outcome, det);
    return std::move(*this);
  }

 private:
  void append(MeasurementOutcome outcome, const DetectorCharacteristic& det) {
    double step = 0.0;
    try {
      step = log_likelihood(outcome, det);
    } catch (const IndeterminateLikelihood& e) {
      // Endpoint beliefs absorb even indeterminate looks.
      if (std::isfinite(log_odds_)) throw IndeterminateUpdate(e.what(), looks_.size());
    }
    if (std::isfinite(log_odds_)) {
      log_odds_ += step;
      current_ = prob_from_log_odds(log_odds_);
    }
    looks_.push_back(LookRecord{outcome, det, current_, log_odds_});
  }

  Probability initial_prior_;
  Probability current_;
  double log_odds_;
  std::vector<LookRecord> looks_;
};

// Applies each look left to right. Detectors may differ per look. An
// IndeterminateUpdate carries the index of the offending look.
inline BeliefState fold_sequence(Probability prior, std::span<const Look> looks) {
  BeliefState state(prior);
  for (const auto& look : looks) {
    state = std::move(state).observe(look.outcome, look.detector);
  }
  return state;
}

}  // namespace bayesdet
