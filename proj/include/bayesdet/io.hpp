// Copyright (c) 2026 The bayesdet Authors
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0

#pragma once

// CSV and JSON renderings shared by the CLI and the HTTP service.
// CSV uses fixed 9-decimal values with a mandatory header row; JSON numbers
// are shortest round-trip doubles, keys in declaration order.

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "bayesdet/bayes.hpp"
#include "bayesdet/monte_carlo.hpp"
#include "bayesdet/roc.hpp"
#include "bayesdet/signal_models.hpp"

namespace bayesdet::io {

using Json = nlohmann::ordered_json;

inline constexpr int kCsvDecimals = 9;
inline constexpr int kTableDecimals = 4;

inline std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

// Shortest %g rendering that parses back to the same double.
inline std::string shortest(double value) {
  char buf[64];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

// A JSON document as emitted by the CLI and the service: 2-space indent,
// newline-terminated.
inline std::string document(const Json& j) { return j.dump(2) + "\n"; }

inline Json to_json(const SignalModel& model) {
  if (model.is_rayleigh_rician()) {
    return Json{{"kind", "rayleigh_rician"}, {"snr", model.signal_strength()}};
  }
  return Json{{"kind", "gaussian_equal_variance"}, {"separation", model.signal_strength()}};
}

inline Json to_json(const DetectorCharacteristic& det) {
  return Json{{"pd", det.pd.value()}, {"pfa", det.pfa.value()}};
}

inline Json to_json(const OperatingPoint& op) {
  return Json{{"threshold", op.threshold.value()},
              {"pfa", op.pfa.value()},
              {"pd", op.pd.value()},
              {"ppv", op.ppv.value()}};
}

// Array of {threshold, pfa, pd, ppv} objects.
inline Json to_json(const RocCurve& curve) {
  Json points = Json::array();
  for (const auto& op : curve.points) points.push_back(to_json(op));
  return points;
}

inline void write_csv(std::ostream& out, const RocCurve& curve) {
  out << "threshold,pfa,pd,ppv\n";
  for (const auto& op : curve.points) {
    out << fixed(op.threshold.value(), kCsvDecimals) << ',' << fixed(op.pfa.value(), kCsvDecimals)
        << ',' << fixed(op.pd.value(), kCsvDecimals) << ',' << fixed(op.ppv.value(), kCsvDecimals)
        << '\n';
  }
}

// `index` is the 1-based look number.
inline Json to_json(const LookRecord& look, std::size_t index) {
  return Json{{"index", index},
              {"outcome", std::string(to_string(look.outcome))},
              {"pd", look.detector.pd.value()},
              {"pfa", look.detector.pfa.value()},
              {"posterior", look.posterior_after.value()}};
}

inline Json to_json(const BeliefState& belief) {
  Json looks = Json::array();
  for (std::size_t i = 0; i < belief.looks().size(); ++i) looks.push_back(to_json(belief.looks()[i], i + 1));
  return Json{{"initial_prior", belief.initial_prior().value()},
              {"current", belief.current().value()},
              {"looks", std::move(looks)}};
}

inline Json to_json(const Estimate& estimate) {
  const auto value = estimate.value();
  const auto half = estimate.ci_halfwidth_3sigma();
  return Json{{"value", value ? Json(value->value()) : Json(nullptr)},
              {"ci_halfwidth_3sigma", half ? Json(*half) : Json(nullptr)},
              {"successes", estimate.successes},
              {"sample_size", estimate.sample_size}};
}

inline Json to_json(const SimulationConfig& config) {
  return Json{{"model", to_json(config.model)},
              {"threshold", config.threshold.value()},
              {"prior", config.prior.value()},
              {"trials", config.trials},
              {"seed", config.seed}};
}

inline Json to_json(const SimulationReport& report) {
  const auto& c = report.counts;
  return Json{{"config", to_json(report.config)},
              {"seed", report.config.seed},
              {"counts",
               {{"true_positives", c.true_positives},
                {"false_positives", c.false_positives},
                {"missed_detections", c.missed_detections},
                {"true_negatives", c.true_negatives}}},
              {"empirical_pd", to_json(report.empirical_pd())},
              {"empirical_pfa", to_json(report.empirical_pfa())},
              {"empirical_ppv", to_json(report.empirical_ppv())}};
}

inline Json to_json(const SequenceReport& report) {
  Json patterns = Json::array();
  for (const auto& [key, tally] : report.patterns) {
    patterns.push_back(Json{{"n_positive", key.n_positive},
                            {"n_negative", key.n_negative},
                            {"episodes", tally.episodes},
                            {"target_present", tally.target_present},
                            {"fraction_target_present", tally.fraction_target_present()}});
  }
  return Json{{"looks_per_episode", report.looks_per_episode},
              {"episodes", report.episodes},
              {"seed", report.seed},
              {"patterns", std::move(patterns)}};
}

// Header: pd, then one posterior column per pfa named "pfa=<value>".
inline void write_csv(std::ostream& out, const PosteriorSweep& sweep) {
  out << "pd";
  for (const auto& pfa : sweep.pfa) out << ",pfa=" << shortest(pfa.value());
  out << '\n';
  for (std::size_t i = 0; i < sweep.pd.size(); ++i) {
    out << fixed(sweep.pd[i].value(), kCsvDecimals);
    for (const auto& post : sweep.posterior[i]) out << ',' << fixed(post.value(), kCsvDecimals);
    out << '\n';
  }
}

inline Json to_json(const PosteriorSweep& sweep) {
  Json columns = Json::array();
  for (std::size_t j = 0; j < sweep.pfa.size(); ++j) {
    Json posterior = Json::array();
    for (const auto& row : sweep.posterior) posterior.push_back(row[j].value());
    columns.push_back(Json{{"pfa", sweep.pfa[j].value()}, {"posterior", std::move(posterior)}});
  }
  Json pd = Json::array();
  for (const auto& p : sweep.pd) pd.push_back(p.value());
  return Json{{"prior", sweep.prior.value()}, {"pd", std::move(pd)}, {"curves", std::move(columns)}};
}

}  // namespace bayesdet::io
