// Copyright (c) 2026 The bayesdet Authors
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "bayesdet/signal_models.hpp"
#include "oracles.hpp"

namespace bayesdet {
namespace {

const SignalModel kSnr2 = SignalModel::rayleigh_rician(Snr(2.0));

TEST(DomainTypes, RejectInvalidValues) {
  EXPECT_THROW(Snr(-1.0), DomainError);
  EXPECT_THROW(Snr{INFINITY}, DomainError);
  EXPECT_THROW(Threshold(-0.5), DomainError);
  EXPECT_THROW(Threshold{NAN}, DomainError);
  EXPECT_THROW(SignalModel::gaussian_equal_variance(-1.0), DomainError);
}

TEST(RayleighPdf, Examples) {
  EXPECT_EQ(rayleigh_pdf(0.0), 0.0);
  EXPECT_NEAR(rayleigh_pdf(1.0), 0.6065306597126334, 1e-15);
  const long double area =
      oracle::integrate([](long double x) { return rayleigh_pdf(static_cast<double>(x)); }, 0, 12);
  EXPECT_NEAR(static_cast<double>(area), 1.0, 1e-9);
  EXPECT_THROW(rayleigh_pdf(-0.1), DomainError);
}

TEST(RicianPdf, ReducesToRayleighAtZeroSnr) {
  for (double x = 0.0; x < 10.0; x += 0.25) ASSERT_EQ(rician_pdf(x, Snr(0.0)), rayleigh_pdf(x));
}

TEST(RicianPdf, MatchesSeriesOracle) {
  EXPECT_NEAR(rician_pdf(2.0, Snr(2.0)), 0.41400384244797339579, 1e-12);
  for (double s : {0.5, 1.0, 3.0, 6.0}) {
    for (double x = 0.1; x < s + 8.0; x += 0.3) {
      const double ref = static_cast<double>(oracle::rician_density(x, s));
      ASSERT_NEAR(rician_pdf(x, Snr(s)), ref, 1e-12 * std::max(ref, 1e-3)) << s << ' ' << x;
    }
  }
}

TEST(RicianPdf, NoOverflowAtLargeArguments) {
  const double v = rician_pdf(1000.0, Snr(1000.0));
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, 1.0 / std::sqrt(2.0 * M_PI), 1e-3);
}

TEST(RicianPdf, Normalization) {
  for (double s : {0.0, 1.0, 2.0, 3.0, 5.0}) {
    const long double area = oracle::integrate(
        [s](long double x) { return rician_pdf(static_cast<double>(x), Snr(s)); }, 0, s + 12,
        1e-14L);
    EXPECT_NEAR(static_cast<double>(area), 1.0, 1e-8) << s;
  }
}

TEST(PfaOfThreshold, Examples) {
  EXPECT_EQ(pfa_of_threshold(Threshold(0.0)).value(), 1.0);
  EXPECT_NEAR(pfa_of_threshold(Threshold(1.4490)).value(), 0.3500, 1e-4);
  EXPECT_NEAR(pfa_of_threshold(Threshold(3.0349)).value(), 0.0100, 1e-4);
}

TEST(ThresholdOfPfa, Examples) {
  EXPECT_EQ(threshold_of_pfa(Probability(1.0)).value(), 0.0);
  EXPECT_NEAR(threshold_of_pfa(Probability(0.35)).value(), 1.4490149236627466, 1e-14);
  // sqrt(-2 ln 0.08) = 2.2475447...
  EXPECT_NEAR(threshold_of_pfa(Probability(0.08)).value(), 2.247544724497492815, 1e-14);
  EXPECT_THROW(threshold_of_pfa(Probability(0.0)), DomainError);
}

TEST(ThresholdOfPfa, InverseConsistency) {
  for (double p = 1e-12; p <= 1.0; p *= 1.37) {
    const double back = pfa_of_threshold(threshold_of_pfa(Probability(p))).value();
    ASSERT_NEAR(back, p, 1e-14 * p) << p;
  }
  // t -> pfa -> t. Near t = 0 the stored pfa = 1 - t^2/2 only carries
  // ulp(1) / (t^2/2) relative information about t^2, which bounds the
  // attainable accuracy; elsewhere the 1e-14 relative target applies.
  for (double t = 0.01; t <= 6.0; t += 0.01) {
    const double back = threshold_of_pfa(pfa_of_threshold(Threshold(t))).value();
    const double conditioning = 2.2e-16 / (t * t);
    ASSERT_NEAR(back, t, std::max(1e-14, conditioning) * t) << t;
  }
}

TEST(PdOfThreshold, Examples) {
  EXPECT_EQ(pd_of_threshold(Threshold(0.0), kSnr2).value(), 1.0);
  for (double t = 0.0; t < 6.0; t += 0.1) {
    const SignalModel silent = SignalModel::rayleigh_rician(Snr(0.0));
    ASSERT_NEAR(pd_of_threshold(Threshold(t), silent).value(), pfa_of_threshold(Threshold(t)).value(),
                1e-15);
  }
  EXPECT_NEAR(pd_of_threshold(Threshold(1.4490), kSnr2).value(), 0.80, 0.02);
  EXPECT_NEAR(pd_of_threshold(Threshold(1.4490), kSnr2).value(), 0.80684032230633755969, 1e-12);
}

TEST(PdOfThreshold, DominatesPfa) {
  for (double s : {0.1, 1.0, 2.0, 3.0, 5.0}) {
    const auto model = SignalModel::rayleigh_rician(Snr(s));
    for (double t = 0.05; t < 8.0; t += 0.05) {
      ASSERT_GT(pd_of_threshold(Threshold(t), model).value(), pfa_of_threshold(Threshold(t)).value())
          << s << ' ' << t;
    }
  }
}

TEST(GaussianModel, TailsAndInverse) {
  const auto model = SignalModel::gaussian_equal_variance(1.5);
  EXPECT_NEAR(pfa_of_threshold(Threshold(0.0), model).value(), 0.5, 1e-16);
  EXPECT_NEAR(pd_of_threshold(Threshold(1.5), model).value(), 0.5, 1e-16);
  EXPECT_NEAR(pd_of_threshold(Threshold(0.0), model).value(), 0.9331927987311419, 1e-15);
  const auto t = threshold_of_pfa(Probability(0.05), model);
  EXPECT_NEAR(t.value(), 1.6448536269514722, 1e-12);
  EXPECT_NEAR(pfa_of_threshold(t, model).value(), 0.05, 1e-15);
  EXPECT_THROW(threshold_of_pfa(Probability(0.7), model), DomainError);
  EXPECT_NEAR(signal_pdf(1.5, model), noise_pdf(0.0, model), 1e-16);
}

TEST(SnrForPd, HitsRequestedDetector) {
  const auto t = threshold_of_pfa(Probability(0.01));
  const auto snr = snr_for_pd(t, Probability(0.9));
  EXPECT_NEAR(pd_of_threshold(t, SignalModel::rayleigh_rician(snr)).value(), 0.9, 1e-12);
  EXPECT_THROW(snr_for_pd(t, Probability(0.005)), Unachievable);
  EXPECT_THROW(snr_for_pd(t, Probability(1.0)), Unachievable);
}

TEST(DetectorAt, BundlesBothTails) {
  const auto d = detector_at(Threshold(1.449), kSnr2);
  EXPECT_NEAR(d.pd.value(), 0.80684032230633755969, 1e-12);
  EXPECT_NEAR(d.pfa.value(), 0.35000756865637109582, 1e-15);
}

}  // namespace
}  // namespace bayesdet
