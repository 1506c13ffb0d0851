// Copyright (c) 2026 The bayesdet Authors
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0

#pragma once

// Seeded simulation of the detection confusion matrix and of multi-look
// episodes, used as an oracle for the analytic Pd/Pfa/PPV and the N-look
// posterior.
//
// Trials are split into fixed blocks of kBlockTrials. Block b always draws
// from rng stream (seed, b), and tallies are integer sums, so reports are
// identical for any worker count. Looks within an episode are independent
// given presence.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "bayesdet/bayes.hpp"
#include "bayesdet/errors.hpp"
#include "bayesdet/probability.hpp"
#include "bayesdet/random.hpp"
#include "bayesdet/signal_models.hpp"

namespace bayesdet {

inline constexpr std::uint64_t kBlockTrials = 1ULL << 16;

// Generator plus the polar-method spare normal.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t index)
      : gen_(rng::Xoshiro256StarStar::stream(seed, index)) {}

  double uniform() noexcept { return rng::uniform_closed_open(gen_); }
  double uniform_open() noexcept { return rng::uniform_open(gen_); }
  double normal() noexcept { return normal_(gen_); }

 private:
  rng::Xoshiro256StarStar gen_;
  rng::PolarNormal normal_;
};

// sqrt(-2 ln U), U uniform on (0, 1).
inline double sample_rayleigh(RandomStream& stream) {
  return std::sqrt(-2.0 * std::log(stream.uniform_open()));
}

// sqrt((s + Z1)^2 + Z2^2) with Z1, Z2 independent standard normals.
inline double sample_rician(RandomStream& stream, Snr snr) {
  const double in_phase = snr.value() + stream.normal();
  const double quadrature = stream.normal();
  return std::sqrt(in_phase * in_phase + quadrature * quadrature);
}

inline double sample_noise(RandomStream& stream, const SignalModel& model) {
  if (model.is_rayleigh_rician()) return sample_rayleigh(stream);
  return stream.normal();
}

inline double sample_signal(RandomStream& stream, const SignalModel& model) {
  if (model.is_rayleigh_rician()) return sample_rician(stream, Snr(model.signal_strength()));
  return model.signal_strength() + stream.normal();
}

struct SimulationConfig {
  SignalModel model;
  Threshold threshold;
  Probability prior;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

struct ConfusionCounts {
  std::uint64_t true_positives = 0;
  std::uint64_t false_positives = 0;
  std::uint64_t missed_detections = 0;
  std::uint64_t true_negatives = 0;

  std::uint64_t total() const noexcept {
    return true_positives + false_positives + missed_detections + true_negatives;
  }

  ConfusionCounts& operator+=(const ConfusionCounts& other) noexcept {
    true_positives += other.true_positives;
    false_positives += other.false_positives;
    missed_detections += other.missed_detections;
    true_negatives += other.true_negatives;
    return *this;
  }

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// A binomial proportion with its 3-sigma half-width. Empty when no trial
// fell into the conditioning set.
struct Estimate {
  std::uint64_t successes = 0;
  std::uint64_t sample_size = 0;

  std::optional<Probability> value() const {
    if (sample_size == 0) return std::nullopt;
    return Probability(static_cast<double>(successes) / static_cast<double>(sample_size));
  }

  std::optional<double> ci_halfwidth_3sigma() const {
    const auto p = value();
    if (!p) return std::nullopt;
    return 3.0 * std::sqrt(p->value() * p->complement() / static_cast<double>(sample_size));
  }
};

struct SimulationReport {
  SimulationConfig config;
  ConfusionCounts counts;

  Estimate empirical_pd() const {
    return {counts.true_positives, counts.true_positives + counts.missed_detections};
  }
  Estimate empirical_pfa() const {
    return {counts.false_positives, counts.false_positives + counts.true_negatives};
  }
  // TP / (TP + FP).
  Estimate empirical_ppv() const {
    return {counts.true_positives, counts.true_positives + counts.false_positives};
  }
};

namespace detail {

inline unsigned resolve_workers(unsigned workers, std::uint64_t blocks) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(blocks, 1)));
}

// Runs body(block_index, trials_in_block) for every block, spreading blocks
// across workers; results land in per-block slots.
template <class Result, class Body>
std::vector<Result> run_blocks(std::uint64_t trials, unsigned workers, Body body) {
  const std::uint64_t blocks = (trials + kBlockTrials - 1) / kBlockTrials;
  std::vector<Result> results(blocks);
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (std::uint64_t b = next++; b < blocks; b = next++) {
      const std::uint64_t n = std::min(kBlockTrials, trials - b * kBlockTrials);
      results[b] = body(b, n);
    }
  };
  const unsigned n_workers = resolve_workers(workers, blocks);
  if (n_workers <= 1) {
    work();
    return results;
  }
  std::vector<std::jthread> pool;
  pool.reserve(n_workers);
  for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(work);
  pool.clear();
  return results;
}

}  // namespace detail

// One trial per confusion-matrix draw: presence ~ Bernoulli(prior), amplitude from
// the signal or noise law, positive iff the amplitude exceeds the threshold.
// workers = 0 uses the hardware concurrency; the report does not depend on it.
inline SimulationReport simulate(const SimulationConfig& config, unsigned workers = 0) {
  if (config.trials == 0) throw DomainError("simulate needs at least one trial");
  const double prior = config.prior.value();
  const double t = config.threshold.value();
  auto blocks = detail::run_blocks<ConfusionCounts>(
      config.trials, workers, [&](std::uint64_t block, std::uint64_t n) {
        RandomStream stream(config.seed, block);
        ConfusionCounts counts;
        for (std::uint64_t i = 0; i < n; ++i) {
          const bool present = stream.uniform() < prior;
          const double amplitude =
              present ? sample_signal(stream, config.model) : sample_noise(stream, config.model);
          const bool positive = amplitude > t;
          if (present) {
            ++(positive ? counts.true_positives : counts.missed_detections);
          } else {
            ++(positive ? counts.false_positives : counts.true_negatives);
          }
        }
        return counts;
      });
  SimulationReport report{config, {}};
  for (const auto& c : blocks) report.counts += c;
  return report;
}

// Episodes grouped by (positives, negatives).
struct PatternKey {
  std::uint64_t n_positive = 0;
  std::uint64_t n_negative = 0;
  friend auto operator<=>(const PatternKey&, const PatternKey&) = default;
};

struct PatternTally {
  std::uint64_t episodes = 0;
  std::uint64_t target_present = 0;

  double fraction_target_present() const noexcept {
    return episodes == 0 ? 0.0
                         : static_cast<double>(target_present) / static_cast<double>(episodes);
  }

  friend bool operator==(const PatternTally&, const PatternTally&) = default;
};

struct SequenceReport {
  std::uint64_t looks_per_episode = 0;
  std::uint64_t episodes = 0;
  std::uint64_t seed = 0;
  std::map<PatternKey, PatternTally> patterns;
};

// Looks drawn as raw Bernoulli(pd) / Bernoulli(pfa) outcomes, bypassing any
// signal model. Isolates the belief arithmetic from the special functions.
struct AbstractDetectorConfig {
  DetectorCharacteristic detector;
  Probability prior;
  std::uint64_t episodes = 0;
  std::uint64_t seed = 0;
};

namespace detail {

template <class LookFn>
SequenceReport simulate_episodes(double prior, std::uint64_t episodes, std::uint64_t seed,
                                 std::uint64_t looks, unsigned workers, LookFn look) {
  if (looks == 0) throw DomainError("simulate_sequences needs at least one look per episode");
  if (episodes == 0) throw DomainError("simulate_sequences needs at least one episode");
  using Tallies = std::map<PatternKey, PatternTally>;
  auto blocks = run_blocks<Tallies>(episodes, workers, [&](std::uint64_t block, std::uint64_t n) {
    RandomStream stream(seed, block);
    Tallies tallies;
    for (std::uint64_t e = 0; e < n; ++e) {
      const bool present = stream.uniform() < prior;
      PatternKey key;
      for (std::uint64_t l = 0; l < looks; ++l) {
        ++(look(stream, present) ? key.n_positive : key.n_negative);
      }
      auto& tally = tallies[key];
      ++tally.episodes;
      if (present) ++tally.target_present;
    }
    return tallies;
  });
  SequenceReport report{looks, episodes, seed, {}};
  for (const auto& block : blocks) {
    for (const auto& [key, tally] : block) {
      auto& merged = report.patterns[key];
      merged.episodes += tally.episodes;
      merged.target_present += tally.target_present;
    }
  }
  return report;
}

}  // namespace detail

// Episodes of `looks_per_episode` threshold tests on one drawn presence
// state; config.trials counts episodes.
inline SequenceReport simulate_sequences(const SimulationConfig& config,
                                         std::uint64_t looks_per_episode, unsigned workers = 0) {
  const double t = config.threshold.value();
  return detail::simulate_episodes(
      config.prior.value(), config.trials, config.seed, looks_per_episode, workers,
      [&](RandomStream& stream, bool present) {
        const double amplitude =
            present ? sample_signal(stream, config.model) : sample_noise(stream, config.model);
        return amplitude > t;
      });
}

inline SequenceReport simulate_sequences(const AbstractDetectorConfig& config,
                                         std::uint64_t looks_per_episode, unsigned workers = 0) {
  const double pd = config.detector.pd.value();
  const double pfa = config.detector.pfa.value();
  return detail::simulate_episodes(config.prior.value(), config.episodes, config.seed,
                                   looks_per_episode, workers,
                                   [&](RandomStream& stream, bool present) {
                                     return stream.uniform() < (present ? pd : pfa);
                                   });
}

}  // namespace bayesdet
