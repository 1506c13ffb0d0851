// Copyright (c) 2026 The bayesdet Authors
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0

#include "bayesdet/app/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "bayesdet/bayesdet.hpp"
#include "bayesdet/io.hpp"

namespace bayesdet::app {
namespace {

using io::Json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { Csv, Json, Table };

struct GlobalOptions {
  std::string format;
  std::string out_path;
  std::uint64_t seed = 0;
};

Format resolve_format(const GlobalOptions& g, Format fallback) {
  if (g.format.empty()) return fallback;
  if (g.format == "csv") return Format::Csv;
  if (g.format == "json") return Format::Json;
  return Format::Table;
}

std::string dump(const Json& j) { return io::document(j); }

std::string table_value(double v) { return io::fixed(v, io::kTableDecimals); }
std::string csv_value(double v) { return io::fixed(v, io::kCsvDecimals); }

// Left-aligned columns separated by two spaces.
std::string render_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& row) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line += std::string(width[c] - row[c].size() + 2, ' ');
    }
    out << line << '\n';
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  return out.str();
}

std::string render_key_values(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::size_t width = 0;
  for (const auto& [k, v] : rows) width = std::max(width, k.size());
  std::ostringstream out;
  for (const auto& [k, v] : rows) out << k << std::string(width - k.size() + 2, ' ') << v << '\n';
  return out.str();
}

struct ModelOptions {
  std::optional<double> snr;
  std::optional<double> separation;

  void attach(CLI::App* cmd) {
    cmd->add_option("--snr", snr, "Rician signal-to-noise amplitude (noise sigma 1)");
    cmd->add_option("--separation", separation, "Equal-variance Gaussian mean separation");
  }

  SignalModel resolve() const {
    if (snr.has_value() == separation.has_value()) {
      throw UsageError("exactly one of --snr or --separation is required");
    }
    if (snr) return SignalModel::rayleigh_rician(Snr(*snr));
    return SignalModel::gaussian_equal_variance(*separation);
  }
};

std::vector<Probability> parse_probability_list(const std::string& text) {
  std::vector<Probability> values;
  std::istringstream in(text);
  for (std::string cell; std::getline(in, cell, ',');) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      throw UsageError("not a number in list: '" + cell + "'");
    }
    if (used != cell.size()) throw UsageError("not a number in list: '" + cell + "'");
    values.emplace_back(v);
  }
  if (values.empty()) throw UsageError("empty list");
  return values;
}

std::vector<MeasurementOutcome> parse_outcomes(const std::string& text) {
  if (text.empty()) throw UsageError("--outcomes must be a nonempty string over {+,-}");
  std::vector<MeasurementOutcome> outcomes;
  for (char c : text) {
    if (c == '+') {
      outcomes.push_back(MeasurementOutcome::Positive);
    } else if (c == '-') {
      outcomes.push_back(MeasurementOutcome::Negative);
    } else {
      throw UsageError(std::string("bad outcome character '") + c + "'; use + or -");
    }
  }
  return outcomes;
}

MeasurementOutcome parse_single_outcome(const std::string& text) {
  try {
    return parse_outcome(text);
  } catch (const DomainError&) {
    throw UsageError("--outcome must be positive, negative, + or -");
  }
}

std::string render_operating_point(const OperatingPoint& op, Format format) {
  switch (format) {
    case Format::Json:
      return dump(io::to_json(op));
    case Format::Csv:
      return "threshold,pfa,pd,ppv\n" + csv_value(op.threshold.value()) + ',' +
             csv_value(op.pfa.value()) + ',' + csv_value(op.pd.value()) + ',' +
             csv_value(op.ppv.value()) + '\n';
    case Format::Table:
      break;
  }
  return render_key_values({{"threshold", table_value(op.threshold.value())},
                            {"pfa", table_value(op.pfa.value())},
                            {"pd", table_value(op.pd.value())},
                            {"ppv", table_value(op.ppv.value())}});
}

std::string render_roc(const RocCurve& curve, Format format) {
  switch (format) {
    case Format::Json:
      return dump(io::to_json(curve));
    case Format::Csv: {
      std::ostringstream out;
      io::write_csv(out, curve);
      return out.str();
    }
    case Format::Table:
      break;
  }
  std::vector<std::vector<std::string>> rows;
  for (const auto& op : curve.points) {
    rows.push_back({table_value(op.threshold.value()), table_value(op.pfa.value()),
                    table_value(op.pd.value()), table_value(op.ppv.value())});
  }
  return render_table({"threshold", "pfa", "pd", "ppv"}, rows);
}

std::string render_sweep(const PosteriorSweep& sweep, Format format) {
  switch (format) {
    case Format::Json:
      return dump(io::to_json(sweep));
    case Format::Csv: {
      std::ostringstream out;
      io::write_csv(out, sweep);
      return out.str();
    }
    case Format::Table:
      break;
  }
  std::vector<std::string> header{"pd"};
  for (const auto& pfa : sweep.pfa) header.push_back("pfa=" + io::shortest(pfa.value()));
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < sweep.pd.size(); ++i) {
    std::vector<std::string> row{table_value(sweep.pd[i].value())};
    for (const auto& p : sweep.posterior[i]) row.push_back(table_value(p.value()));
    rows.push_back(std::move(row));
  }
  return render_table(header, rows);
}

std::string render_belief(const BeliefState& belief, Format format) {
  if (format == Format::Json) return dump(io::to_json(belief));
  const auto& looks = belief.looks();
  if (format == Format::Csv) {
    std::ostringstream out;
    out << "index,outcome,posterior\n";
    for (std::size_t i = 0; i < looks.size(); ++i) {
      out << i + 1 << ',' << to_symbol(looks[i].outcome) << ','
          << csv_value(looks[i].posterior_after.value()) << '\n';
    }
    return out.str();
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < looks.size(); ++i) {
    rows.push_back({std::to_string(i + 1), std::string(1, to_symbol(looks[i].outcome)),
                    table_value(looks[i].posterior_after.value())});
  }
  return render_table({"index", "outcome", "posterior"}, rows);
}

std::string estimate_text(const Estimate& e, int decimals) {
  const auto v = e.value();
  if (!v) return "n/a";
  return io::fixed(v->value(), decimals) + " +/- " + io::fixed(*e.ci_halfwidth_3sigma(), decimals);
}

std::string render_simulation(const SimulationReport& report, Format format) {
  const auto& c = report.counts;
  if (format == Format::Json) return dump(io::to_json(report));
  if (format == Format::Csv) {
    std::ostringstream out;
    out << "true_positives,false_positives,missed_detections,true_negatives,"
           "empirical_pd,empirical_pfa,empirical_ppv\n";
    out << c.true_positives << ',' << c.false_positives << ',' << c.missed_detections << ','
        << c.true_negatives;
    for (const auto& e : {report.empirical_pd(), report.empirical_pfa(), report.empirical_ppv()}) {
      const auto v = e.value();
      out << ',' << (v ? csv_value(v->value()) : std::string());
    }
    out << '\n';
    return out.str();
  }
  return render_key_values({{"true_positives", std::to_string(c.true_positives)},
                            {"false_positives", std::to_string(c.false_positives)},
                            {"missed_detections", std::to_string(c.missed_detections)},
                            {"true_negatives", std::to_string(c.true_negatives)},
                            {"empirical_pd", estimate_text(report.empirical_pd(), 4)},
                            {"empirical_pfa", estimate_text(report.empirical_pfa(), 4)},
                            {"empirical_ppv", estimate_text(report.empirical_ppv(), 4)}});
}

std::string render_sequences(const SequenceReport& report, Format format) {
  if (format == Format::Json) return dump(io::to_json(report));
  std::vector<std::vector<std::string>> rows;
  for (const auto& [key, tally] : report.patterns) {
    const int decimals = format == Format::Csv ? io::kCsvDecimals : io::kTableDecimals;
    rows.push_back({std::to_string(key.n_positive), std::to_string(key.n_negative),
                    std::to_string(tally.episodes), std::to_string(tally.target_present),
                    io::fixed(tally.fraction_target_present(), decimals)});
  }
  const std::vector<std::string> header{"n_positive", "n_negative", "episodes", "target_present",
                                        "fraction_target_present"};
  if (format == Format::Table) return render_table(header, rows);
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  return out.str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian detection arithmetic, PPV-enhanced ROC curves and simulation", "bayesdet"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--format", global.format, "Output format")
      ->check(CLI::IsMember({"csv", "json", "table"}));
  app.add_option("--out", global.out_path, "Write output to FILE instead of stdout");
  app.add_option("--seed", global.seed, "Random seed for simulate");

  // Set by the chosen subcommand's callback; renders that command's output.
  std::function<std::string()> command;

  // posterior
  double pd = 0.0, pfa = 0.0, prior = 0.0;
  std::string outcome;
  auto* posterior = app.add_subcommand("posterior", "Posterior after one look");
  posterior->add_option("--pd", pd, "Probability of detection")->required();
  posterior->add_option("--pfa", pfa, "Probability of false alarm")->required();
  posterior->add_option("--prior", prior, "Prior probability of presence")->required();
  posterior->add_option("--outcome", outcome, "positive | negative (or + | -)")->required();
  posterior->callback([&] {
    command = [&] {
      const auto o = parse_single_outcome(outcome);
      const Probability p = update(Probability(prior), o, {Probability(pd), Probability(pfa)});
      switch (resolve_format(global, Format::Table)) {
        case Format::Json:
          return dump(Json{{"prior", prior},
                           {"pd", pd},
                           {"pfa", pfa},
                           {"outcome", std::string(to_string(o))},
                           {"posterior", p.value()}});
        case Format::Csv:
          return "posterior\n" + csv_value(p.value()) + "\n";
        case Format::Table:
          break;
      }
      return table_value(p.value()) + "\n";
    };
  });

  // sequence
  std::string outcomes;
  auto* sequence = app.add_subcommand("sequence", "Fold a string of outcomes, one row per look");
  sequence->add_option("--pd", pd, "Probability of detection")->required();
  sequence->add_option("--pfa", pfa, "Probability of false alarm")->required();
  sequence->add_option("--prior", prior, "Prior probability of presence")->required();
  sequence->add_option("--outcomes", outcomes, "Outcomes over {+,-}, e.g. ++-")
      ->required();
  sequence->callback([&] {
    command = [&] {
      const DetectorCharacteristic det{Probability(pd), Probability(pfa)};
      BeliefState belief{Probability(prior)};
      for (auto o : parse_outcomes(outcomes)) belief = std::move(belief).observe(o, det);
      return render_belief(belief, resolve_format(global, Format::Table));
    };
  });

  // roc
  ModelOptions model;
  std::size_t points = kDefaultRocPoints;
  double curve_prior = 0.5;
  auto* roc = app.add_subcommand("roc", "PPV-enhanced ROC curve");
  model.attach(roc);
  roc->add_option("--prior", curve_prior, "Prior probability of presence")->capture_default_str();
  roc->add_option("--points", points, "Number of curve points")->capture_default_str();
  roc->callback([&] {
    command = [&] {
      return render_roc(roc_curve(model.resolve(), Probability(curve_prior), points),
                        resolve_format(global, Format::Csv));
    };
  });

  // threshold
  double target_ppv = 0.0;
  auto* threshold = app.add_subcommand("threshold", "Threshold achieving a target PPV");
  model.attach(threshold);
  threshold->add_option("--prior", curve_prior, "Prior probability of presence")->capture_default_str();
  threshold->add_option("--target-ppv", target_ppv, "Required PPV")->required();
  threshold->callback([&] {
    command = [&] {
      return render_operating_point(
          threshold_for_ppv(model.resolve(), Probability(curve_prior), Probability(target_ppv)),
          resolve_format(global, Format::Table));
    };
  });

  // sweep
  std::string pfa_list;
  std::size_t sweep_points = 101;
  auto* sweep = app.add_subcommand("sweep", "Posterior after a positive look versus Pd");
  sweep->add_option("--pfa", pfa_list, "Comma-separated Pfa values")->required();
  sweep->add_option("--prior", curve_prior, "Prior probability of presence")->capture_default_str();
  sweep->add_option("--points", sweep_points, "Pd grid points on [0, 1]")->capture_default_str();
  sweep->callback([&] {
    command = [&] {
      return render_sweep(posterior_sweep(parse_probability_list(pfa_list), Probability(curve_prior),
                                          sweep_points),
                          resolve_format(global, Format::Csv));
    };
  });

  // simulate
  std::optional<double> sim_threshold, target_pfa, abstract_pd, abstract_pfa;
  std::uint64_t trials = 1000000;
  std::uint64_t looks = 0;
  unsigned workers = 0;
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo tallies of the confusion matrix");
  model.attach(simulate_cmd);
  simulate_cmd->add_option("--threshold", sim_threshold, "Detection threshold");
  simulate_cmd->add_option("--target-pfa", target_pfa, "Pick the threshold giving this Pfa");
  simulate_cmd->add_option("--pd", abstract_pd, "Abstract detector Pd (with --looks)");
  simulate_cmd->add_option("--pfa", abstract_pfa, "Abstract detector Pfa (with --looks)");
  simulate_cmd->add_option("--prior", curve_prior, "Prior probability of presence")->capture_default_str();
  simulate_cmd->add_option("--trials", trials, "Trials (episodes with --looks)")->capture_default_str();
  simulate_cmd->add_option("--looks", looks, "Looks per episode; tallies outcome patterns");
  simulate_cmd->add_option("--workers", workers, "Worker threads (0 = hardware)");
  simulate_cmd->callback([&] {
    command = [&] {
      const Format format = resolve_format(global, Format::Json);
      const Probability p(curve_prior);
      if (abstract_pd || abstract_pfa) {
        if (!abstract_pd || !abstract_pfa || looks == 0) {
          throw UsageError("--pd/--pfa need each other and --looks");
        }
        if (model.snr || model.separation || sim_threshold || target_pfa) {
          throw UsageError("--pd/--pfa cannot be combined with a signal model");
        }
        const AbstractDetectorConfig config{{Probability(*abstract_pd), Probability(*abstract_pfa)},
                                            p, trials, global.seed};
        return render_sequences(simulate_sequences(config, looks, workers), format);
      }
      const SignalModel m = model.resolve();
      if (sim_threshold.has_value() == target_pfa.has_value()) {
        throw UsageError("exactly one of --threshold or --target-pfa is required");
      }
      const Threshold t =
          sim_threshold ? Threshold(*sim_threshold) : threshold_of_pfa(Probability(*target_pfa), m);
      const SimulationConfig config{m, t, p, trials, global.seed};
      if (looks > 0) return render_sequences(simulate_sequences(config, looks, workers), format);
      return render_simulation(simulate(config, workers), format);
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::string rendered;
  try {
    rendered = command();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IndeterminateUpdate& e) {
    err << "error: indeterminate update (0/0): " << e.what() << "\n";
    return kExitIndeterminate;
  } catch (const IndeterminateLikelihood& e) {
    err << "error: indeterminate likelihood (0/0): " << e.what() << "\n";
    return kExitIndeterminate;
  } catch (const Unachievable& e) {
    err << "error: " << e.what() << "; achievable ppv range is (" << io::shortest(e.achievable_low())
        << ", " << io::shortest(e.achievable_high()) << ")\n";
    return kExitUnachievable;
  }

  if (global.out_path.empty()) {
    out << rendered;
  } else {
    std::ofstream file(global.out_path, std::ios::binary);
    file << rendered;
    if (!file) {
      err << "error: cannot write " << global.out_path << "\n";
      return kExitUsage;
    }
  }
  return kExitOk;
}

}  // namespace bayesdet::app
