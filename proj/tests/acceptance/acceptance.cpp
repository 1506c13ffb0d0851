// Copyright (c) 2026 The bayesdet Authors
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <barrier>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "bayesdet/bayesdet.hpp"
#include "bayesdet/io.hpp"
#include "bayesdet/service/http_api.hpp"
#include "bayesdet/service/session_store.hpp"
#include "oracles.hpp"

namespace {

using namespace bayesdet;
namespace fs = std::filesystem;

struct Result {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& text) { detail += (detail.empty() ? "" : "; ") + text; }
};

std::string fmt(double v, int digits = 5) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

DetectorCharacteristic det(double pd, double pfa) { return {Probability(pd), Probability(pfa)}; }

const DetectorCharacteristic kDetectors[] = {det(0.9, 0.01), det(0.7, 0.01), det(0.7, 0.1)};

Result single_positive_look() {
  Result r;
  const double expected[] = {0.989, 0.986, 0.875};
  for (int i = 0; i < 3; ++i) {
    const double p = update_positive(Probability(0.5), kDetectors[i]).value();
    r.check(std::abs(p - expected[i]) <= 0.0005, fmt(p) + " vs " + fmt(expected[i], 3));
    r.note(fmt(p));
  }
  return r;
}

Result negative_from_rounded_priors() {
  Result r;
  const double priors[] = {0.994, 0.993, 0.925};
  const double expected[] = {0.944, 0.977, 0.804};
  for (int i = 0; i < 3; ++i) {
    const double p = update_negative(Probability(priors[i]), kDetectors[i]).value();
    r.check(std::abs(p - expected[i]) <= 0.0005, fmt(p) + " vs " + fmt(expected[i], 3));
    r.note(fmt(p));
  }
  return r;
}

Result two_positive_chain() {
  Result r;
  const double pinned[] = {0.99988, 0.99980, 0.98};
  for (int i = 0; i < 3; ++i) {
    const auto after_one = update_positive(Probability(0.5), kDetectors[i]);
    const double chain = update_positive(after_one, kDetectors[i]).value();
    r.check(std::abs(chain - pinned[i]) <= 5e-6, "chain " + fmt(chain, 6));
    // Episodes of two looks; the (2, 0) pattern estimates the same quantity.
    const AbstractDetectorConfig config{kDetectors[i], Probability(0.5), 1000000,
                                        static_cast<std::uint64_t>(1000 + i)};
    const auto report = simulate_sequences(config, 2);
    const auto& tally = report.patterns.at(PatternKey{2, 0});
    const double sigma =
        std::sqrt(chain * (1 - chain) / static_cast<double>(tally.episodes));
    const double got = tally.fraction_target_present();
    r.check(tally.episodes >= 100000, "episodes in pattern");
    r.check(std::abs(got - chain) <= 3 * sigma, "simulated " + fmt(got, 6));
    r.note(fmt(chain) + " sim " + fmt(got) + " (3 sd " + fmt(3 * sigma, 5) + ", n " +
           std::to_string(tally.episodes) + ")");
  }
  return r;
}

Result fold_equals_closed_form() {
  Result r;
  std::mt19937_64 gen(20240611);
  std::uniform_real_distribution<double> u(0.001, 0.999);
  std::uniform_int_distribution<int> count(0, 50);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Probability prior(u(gen));
    const auto d = det(u(gen), u(gen));
    const int np = count(gen);
    const int nn = count(gen);
    std::vector<Look> looks;
    for (int k = 0; k < np; ++k) looks.push_back({MeasurementOutcome::Positive, d});
    for (int k = 0; k < nn; ++k) looks.push_back({MeasurementOutcome::Negative, d});
    std::shuffle(looks.begin(), looks.end(), gen);
    const double fold = fold_sequence(prior, looks).current_log_odds();
    const double closed = log_odds_after_n_looks(prior, d, np, nn);
    worst = std::max(worst, std::abs(fold - closed));
  }
  r.check(worst <= 1e-10, "worst " + std::to_string(worst));
  r.note("1000 cases, worst |dlog-odds| " + fmt(worst * 1e12, 3) + "e-12");
  return r;
}

bool in(double v, double lo, double hi) { return v >= lo && v <= hi; }

Result operating_points_snr2() {
  Result r;
  const auto model = SignalModel::rayleigh_rician(Snr(2.0));
  const auto a = operating_point_at_pfa(model, Probability(0.5), Probability(0.35));
  const auto b = operating_point_at_pfa(model, Probability(0.5), Probability(0.08));
  r.check(in(a.pd.value(), 0.78, 0.82), "pd at 0.35");
  r.check(in(a.ppv.value(), 0.69, 0.71), "ppv at 0.35");
  r.check(in(b.pd.value(), 0.48, 0.52), "pd at 0.08");
  r.check(in(b.ppv.value(), 0.85, 0.87), "ppv at 0.08");
  // Against direct quadrature of the signal density.
  for (const auto& op : {a, b}) {
    const double q = static_cast<double>(oracle::marcum_q1_quadrature(2.0L, op.threshold.value()));
    r.check(std::abs(q - op.pd.value()) <= 1e-8, "quadrature pd");
  }
  r.note("pfa 0.35: pd " + fmt(a.pd.value()) + " ppv " + fmt(a.ppv.value()) + "; pfa 0.08: pd " +
         fmt(b.pd.value()) + " ppv " + fmt(b.ppv.value()));
  return r;
}

Result ppv_target_trade_off() {
  Result r;
  const auto s2 = threshold_for_ppv(SignalModel::rayleigh_rician(Snr(2.0)), Probability(0.5),
                                    Probability(0.8));
  const auto s3 = threshold_for_ppv(SignalModel::rayleigh_rician(Snr(3.0)), Probability(0.5),
                                    Probability(0.8));
  r.check(in(s2.pfa.value(), 0.13, 0.17), "snr 2 pfa");
  r.check(in(s2.pd.value(), 0.61, 0.65), "snr 2 pd");
  r.check(in(s3.pfa.value(), 0.21, 0.25), "snr 3 pfa");
  r.check(in(s3.pd.value(), 0.92, 0.96), "snr 3 pd");
  r.check(std::abs(s2.ppv.value() - 0.8) <= 1e-9 && std::abs(s3.ppv.value() - 0.8) <= 1e-9,
          "ppv reproduces target");
  r.note("snr 2: pfa " + fmt(s2.pfa.value()) + " pd " + fmt(s2.pd.value()) + "; snr 3: pfa " +
         fmt(s3.pfa.value()) + " pd " + fmt(s3.pd.value()));
  return r;
}

Result special_functions() {
  Result r;
  double worst_zero = 0.0;
  for (int i = 0; i <= 600; ++i) {
    const double b = i * 0.01;
    worst_zero = std::max(worst_zero, std::abs(special::marcum_q1(0.0, b) - std::exp(-0.5 * b * b)));
  }
  r.check(worst_zero <= 1e-10, "Q1(0,b) vs exp");
  bool at_zero = true;
  for (int i = 0; i <= 60; ++i) at_zero = at_zero && special::marcum_q1(i * 0.1, 0.0) == 1.0;
  r.check(at_zero, "Q1(a,0) == 1");
  double worst_grid = 0.0;
  for (int i = 0; i <= 12; ++i) {
    for (int j = 0; j <= 12; ++j) {
      const double a = 0.5 * i;
      const double b = 0.5 * j;
      const double q = special::marcum_q1(a, b);
      const double ref = static_cast<double>(oracle::marcum_q1_quadrature(a, b));
      worst_grid = std::max(worst_grid, std::abs(q - ref));
    }
  }
  r.check(worst_grid <= 1e-8, "13x13 grid");
  double worst_norm = 0.0;
  for (double s : {0.0, 1.0, 2.0, 3.0, 5.0}) {
    const long double area = oracle::integrate(
        [s](long double x) { return rician_pdf(static_cast<double>(x), Snr(s)); }, 0.0L, s + 12.0,
        1e-14L);
    worst_norm = std::max(worst_norm, std::abs(static_cast<double>(area) - 1.0));
  }
  r.check(worst_norm <= 1e-8, "normalization");
  char buf[160];
  std::snprintf(buf, sizeof buf, "Q1(0,b) err %.1e; 13x13 grid err %.1e; pdf area err %.1e",
                worst_zero, worst_grid, worst_norm);
  r.note(buf);
  return r;
}

Result monte_carlo_agreement() {
  Result r;
  const auto model = SignalModel::rayleigh_rician(Snr(2.0));
  const Threshold t = threshold_of_pfa(Probability(0.35));
  const SimulationConfig config{model, t, Probability(0.5), 1000000, 42};
  const auto report = simulate(config, 1);
  const double pd = pd_of_threshold(t, model).value();
  const double pfa = 0.35;
  const double ppv_value = ppv(Probability(pd), Probability(pfa), config.prior).value();
  auto within = [](const Estimate& e, double p) {
    const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(e.sample_size));
    return std::abs(e.value()->value() - p) <= 3 * sigma;
  };
  r.check(report.counts.total() == config.trials, "closure");
  r.check(within(report.empirical_pd(), pd), "pd");
  r.check(within(report.empirical_pfa(), pfa), "pfa");
  r.check(within(report.empirical_ppv(), ppv_value), "ppv");
  const std::string reference = io::to_json(report).dump();
  r.check(io::to_json(simulate(config, 1)).dump() == reference, "rerun identical");
  for (unsigned workers : {2u, 4u, 7u}) {
    r.check(io::to_json(simulate(config, workers)).dump() == reference,
            "identical with " + std::to_string(workers) + " workers");
  }
  r.note("pd " + fmt(report.empirical_pd().value()->value()) + " (" + fmt(pd) + "), pfa " +
         fmt(report.empirical_pfa().value()->value()) + ", ppv " +
         fmt(report.empirical_ppv().value()->value()) + " (" + fmt(ppv_value) +
         "); identical across reruns and 1/2/4/7 workers");
  return r;
}

Result curve_monotonicity() {
  Result r;
  for (double snr : {1.0, 2.0, 3.0}) {
    const auto curve = roc_curve(SignalModel::rayleigh_rician(Snr(snr)), Probability(0.5), 200);
    bool ok = curve.points.size() == 200;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
      const auto& a = curve.points[i - 1];
      const auto& b = curve.points[i];
      ok = ok && a.pd.value() > b.pd.value() && a.pfa.value() > b.pfa.value() &&
           a.ppv.value() < b.ppv.value();
    }
    for (const auto& p : curve.points) ok = ok && p.pd.value() >= p.pfa.value();
    const double end_gap = std::abs(curve.points.front().ppv.value() - 0.5);
    ok = ok && end_gap <= 0.01;
    r.check(ok, "snr " + fmt(snr, 0));
    r.note("snr " + fmt(snr, 0) + " ppv at pfa 0.999 " + fmt(curve.points.front().ppv.value()));
  }
  return r;
}

// Independent replay of one session log.
double replay_log(const fs::path& log, Probability prior) {
  BeliefState belief(prior);
  std::ifstream in(log);
  for (std::string line; std::getline(in, line);) {
    const auto rec = nlohmann::json::parse(line, nullptr, false);
    if (rec.is_discarded()) break;
    belief = belief.observe(parse_outcome(rec["outcome"].get<std::string>()),
                            det(rec["pd"].get<double>(), rec["pfa"].get<double>()));
  }
  return belief.current().value();
}

Result service_replay_and_race() {
  Result r;
  const fs::path dir =
      fs::temp_directory_path() / ("bayesdet_acceptance_" + std::to_string(std::random_device{}()));
  fs::remove_all(dir);
  using nlohmann::json;

  struct Server {
    explicit Server(const fs::path& d) : store(d), service(store) {
      port = service.bind("127.0.0.1", 0);
      thread = std::jthread([this] { service.run(); });
      service.wait_until_ready();
    }
    ~Server() {
      service.stop();
      thread.join();
    }
    service::SessionStore store;
    service::HttpService service;
    int port = 0;
    std::jthread thread;
  };

  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  std::vector<std::string> ids;
  std::map<std::string, double> priors, before;
  {
    Server server(dir);
    httplib::Client client("127.0.0.1", server.port);
    for (int i = 0; i < 5; ++i) {
      const double prior = u(gen);
      auto res = client.Post("/sessions",
                             json{{"prior", prior}, {"detector", {{"pd", u(gen)}, {"pfa", u(gen)}}}}.dump(),
                             "application/json");
      if (!res || res->status != 201) {
        r.check(false, "create session");
        return r;
      }
      ids.push_back(json::parse(res->body)["id"]);
      priors[ids.back()] = prior;
    }
    std::map<std::string, int> revision;
    for (int i = 0; i < 100; ++i) {
      const auto& id = ids[gen() % ids.size()];
      json body{{"outcome", gen() % 2 ? "+" : "-"}, {"expected_revision", revision[id]}};
      if (gen() % 3 == 0) body["detector"] = {{"pd", u(gen)}, {"pfa", u(gen)}};
      if (gen() % 5 == 0) body["model"] = {{"snr", 4 * u(gen)}, {"threshold", 3 * u(gen)}}, body.erase("detector");
      auto res = client.Post("/sessions/" + id + "/measurements", body.dump(), "application/json");
      r.check(res && res->status == 200, "measurement accepted");
      ++revision[id];
    }
    for (const auto& id : ids) before[id] = json::parse(client.Get("/sessions/" + id)->body)["current"];
  }
  // A write torn by the crash must not disturb the replay.
  {
    std::ofstream torn(dir / "sessions" / (ids.front() + ".jsonl"), std::ios::app);
    torn << "{\"revision\":";
  }
  int exact = 0;
  {
    Server server(dir);
    httplib::Client client("127.0.0.1", server.port);
    for (const auto& id : ids) {
      const double now = json::parse(client.Get("/sessions/" + id)->body)["current"];
      const double log = replay_log(dir / "sessions" / (id + ".jsonl"), Probability(priors[id]));
      const bool same = std::bit_cast<std::uint64_t>(now) == std::bit_cast<std::uint64_t>(log) &&
                        std::bit_cast<std::uint64_t>(now) == std::bit_cast<std::uint64_t>(before[id]);
      exact += same;
    }
    r.check(exact == static_cast<int>(ids.size()), "replay exact");

    // Racing posts at one revision.
    const std::string id = ids.front();
    int races_ok = 0;
    const int rounds = 20;
    for (int round = 0; round < rounds; ++round) {
      const int rev = json::parse(client.Get("/sessions/" + id)->body)["revision"];
      std::barrier sync(2);
      std::atomic<int> ok{0}, conflict{0};
      auto racer = [&] {
        httplib::Client c("127.0.0.1", server.port);
        const std::string body = json{{"outcome", "+"}, {"expected_revision", rev}}.dump();
        sync.arrive_and_wait();
        auto res = c.Post("/sessions/" + id + "/measurements", body, "application/json");
        if (res && res->status / 100 == 2) ++ok;
        if (res && res->status == 409) ++conflict;
      };
      {
        std::jthread a(racer), b(racer);
      }
      races_ok += ok == 1 && conflict == 1;
    }
    r.check(races_ok == rounds, "race outcome");
    r.note(std::to_string(exact) + "/" + std::to_string(ids.size()) +
           " sessions replay bit-exactly after 100 measurements and restart; " +
           std::to_string(races_ok) + "/" + std::to_string(rounds) + " races gave one 2xx + one 409");
  }
  fs::remove_all(dir);
  return r;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria = {
      {"single positive look from prior 0.5", single_positive_look},
      {"negative look from rounded priors", negative_from_rounded_priors},
      {"two positive looks, closed chain vs simulation", two_positive_chain},
      {"sequence fold equals closed form", fold_equals_closed_form},
      {"operating points at snr 2", operating_points_snr2},
      {"threshold for ppv 0.80 at snr 2 and 3", ppv_target_trade_off},
      {"special functions", special_functions},
      {"monte carlo agreement and determinism", monte_carlo_agreement},
      {"curve monotonicity", curve_monotonicity},
      {"service replay and racing posts", service_replay_and_race},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& [name, run] = criteria[i];
    Result result;
    try {
      result = run();
    } catch (const std::exception& e) {
      result = {false, std::string("exception: ") + e.what()};
    }
    failures += !result.pass;
    std::cout << (result.pass ? "PASS" : "FAIL") << "  [" << i + 1 << "] " << name << ": "
              << result.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
