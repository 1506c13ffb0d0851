// Copyright (c) 2026 The bayesdet Authors
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0

#pragma once

// ROC curves enhanced with positive predictive value (PPV), operating-point
// lookup and threshold solving.
//
// PPV is the posterior probability of presence given a detection,
//   PPV = Pd*prior / [Pd*prior + Pfa*(1-prior)],
// i.e. the same function as update_positive. For the Rayleigh/Rician pair the
// likelihood ratio is monotone in the threshold, so PPV rises from the prior
// at threshold 0 toward 1 as the threshold grows.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "bayesdet/bayes.hpp"
#include "bayesdet/errors.hpp"
#include "bayesdet/probability.hpp"
#include "bayesdet/signal_models.hpp"

namespace bayesdet {

struct OperatingPoint {
  Threshold threshold;
  Probability pd;
  Probability pfa;
  Probability ppv;
};

struct RocCurve {
  SignalModel model;
  Probability prior;
  std::vector<OperatingPoint> points;  // strictly increasing threshold
};

inline constexpr std::size_t kDefaultRocPoints = 200;
inline constexpr double kRocHighPfa = 0.999;
inline constexpr double kRocLowPfa = 0.001;

inline Probability ppv(Probability pd, Probability pfa, Probability prior) {
  return update_positive(prior, DetectorCharacteristic{pd, pfa});
}

inline OperatingPoint operating_point(const SignalModel& model, Probability prior, Threshold t) {
  const Probability pd = pd_of_threshold(t, model);
  const Probability pfa = pfa_of_threshold(t, model);
  return OperatingPoint{t, pd, pfa, ppv(pd, pfa, prior)};
}

// Samples the curve uniformly in pfa from 0.999 down to 0.001 (from 0.5 for
// the Gaussian family, whose nonnegative thresholds stop there).
inline RocCurve roc_curve(const SignalModel& model, Probability prior,
                          std::size_t n_points = kDefaultRocPoints) {
  if (!prior.is_interior()) throw DomainError("roc_curve prior must lie in (0, 1)");
  if (n_points < 2) throw DomainError("roc_curve needs at least 2 points");
  const double high = model.is_rayleigh_rician() ? kRocHighPfa : 0.5;
  const double step = (high - kRocLowPfa) / static_cast<double>(n_points - 1);

  RocCurve curve{model, prior, {}};
  curve.points.reserve(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double grid_pfa = i + 1 == n_points ? kRocLowPfa : high - step * static_cast<double>(i);
    curve.points.push_back(
        operating_point(model, prior, threshold_of_pfa(Probability(grid_pfa), model)));
  }
  return curve;
}

// The operating point whose threshold gives exactly `pfa`.
inline OperatingPoint operating_point_at_pfa(const SignalModel& model, Probability prior,
                                             Probability pfa) {
  return operating_point(model, prior, threshold_of_pfa(pfa, model));
}

inline constexpr double kPpvTolerance = 1e-9;
inline constexpr double kThresholdBracketTolerance = 1e-12;

// Bisection on the threshold over [0, t_max], t_max being where pfa = 1e-12,
// until |ppv - target| <= 1e-9 or the bracket is narrower than 1e-12.
// Throws Unachievable when the target lies outside the open PPV range the
// model spans on that interval.
inline OperatingPoint threshold_for_ppv(const SignalModel& model, Probability prior,
                                        Probability target_ppv) {
  if (!prior.is_interior()) throw DomainError("threshold_for_ppv prior must lie in (0, 1)");
  double lo = 0.0;
  double hi = threshold_of_pfa(Probability(kMinimumSearchPfa), model).value();
  const double floor_ppv = operating_point(model, prior, Threshold(lo)).ppv.value();
  const double ceiling_ppv = operating_point(model, prior, Threshold(hi)).ppv.value();

  const double target = target_ppv.value();
  if (model.signal_strength() == 0.0) {
    throw Unachievable("ppv is pinned at the prior when there is no signal", floor_ppv,
                       floor_ppv);
  }
  if (!(target > floor_ppv && target < ceiling_ppv)) {
    throw Unachievable("target ppv lies outside the achievable range", floor_ppv, ceiling_ppv);
  }

  OperatingPoint best = operating_point(model, prior, Threshold(0.5 * (lo + hi)));
  while (true) {
    const double mid = 0.5 * (lo + hi);
    best = operating_point(model, prior, Threshold(mid));
    const double err = best.ppv.value() - target;
    if (std::abs(err) <= kPpvTolerance || hi - lo <= kThresholdBracketTolerance) break;
    if (err < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return best;
}

// Posterior after a positive look as a function of Pd, one column per Pfa.
struct PosteriorSweep {
  Probability prior;
  std::vector<Probability> pfa;
  std::vector<Probability> pd;
  std::vector<std::vector<Probability>> posterior;  // [pd index][pfa index]
};

inline PosteriorSweep posterior_sweep(std::span<const Probability> pfa_values, Probability prior,
                                      std::size_t n_points) {
  if (!prior.is_interior()) throw DomainError("posterior_sweep prior must lie in (0, 1)");
  if (n_points < 2) throw DomainError("posterior_sweep needs at least 2 points");
  for (const auto& pfa : pfa_values) {
    if (pfa.value() == 0.0) throw DomainError("posterior_sweep pfa must lie in (0, 1]");
  }

  PosteriorSweep sweep{prior, {pfa_values.begin(), pfa_values.end()}, {}, {}};
  sweep.pd.reserve(n_points);
  sweep.posterior.reserve(n_points);
  const double denom = static_cast<double>(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i) {
    const Probability pd(static_cast<double>(i) / denom);
    std::vector<Probability> row;
    row.reserve(pfa_values.size());
    for (const auto& pfa : pfa_values) row.push_back(update_positive(prior, {pd, pfa}));
    sweep.pd.push_back(pd);
    sweep.posterior.push_back(std::move(row));
  }
  return sweep;
}

}  // namespace bayesdet
