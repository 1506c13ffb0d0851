// Copyright (c) 2026 The bayesdet Authors
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0

#pragma once

// Persistent sequential-measurement sessions.
//
// On disk, <dir>/index.jsonl holds one line per created session and
// <dir>/sessions/<id>.jsonl one line per accepted measurement, with the
// detector already resolved to (pd, pfa). Every line is fsynced before the
// call returns. Opening a store replays both files; a torn final line is
// discarded and truncated away.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bayesdet/bayes.hpp"
#include "bayesdet/probability.hpp"

namespace bayesdet::service {

struct ModelSpec {
  double snr = 0.0;
  double threshold = 0.0;
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

// Either explicit (pd, pfa) or a Rician (snr, threshold) pair.
class DetectorSpec {
 public:
  static DetectorSpec from_detector(const DetectorCharacteristic& det) { return DetectorSpec(det); }
  static DetectorSpec from_model(double snr, double threshold) {
    return DetectorSpec(ModelSpec{snr, threshold});
  }

  // Throws DomainError when the model values are out of range.
  DetectorCharacteristic resolve() const;

  std::optional<ModelSpec> model() const {
    if (const auto* m = std::get_if<ModelSpec>(&spec_)) return *m;
    return std::nullopt;
  }

 private:
  explicit DetectorSpec(std::variant<DetectorCharacteristic, ModelSpec> spec) : spec_(spec) {}

  std::variant<DetectorCharacteristic, ModelSpec> spec_;
};

struct MeasurementRequest {
  MeasurementOutcome outcome;
  std::optional<DetectorSpec> detector;  // session default when empty
  std::uint64_t expected_revision = 0;
};

struct LookMeta {
  std::string recorded_at;
  std::optional<ModelSpec> model;
};

struct Session {
  std::string id;
  std::string created_at;
  Probability prior;
  DetectorCharacteristic default_detector;
  std::optional<ModelSpec> default_model;
  BeliefState belief{Probability(0.5)};
  std::vector<LookMeta> look_meta;  // parallel to belief.looks()
  std::uint64_t revision = 0;
};

class SessionNotFound : public std::runtime_error {
 public:
  explicit SessionNotFound(const std::string& id) : std::runtime_error("no session " + id) {}
};

class RevisionConflict : public std::runtime_error {
 public:
  RevisionConflict(std::uint64_t expected, std::uint64_t actual)
      : std::runtime_error("expected revision " + std::to_string(expected) +
                           " but session is at " + std::to_string(actual)),
        actual_(actual) {}
  std::uint64_t actual_revision() const noexcept { return actual_; }

 private:
  std::uint64_t actual_;
};

class StorageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path dir);

  SessionStore(const SessionStore&) = delete;
  SessionStore& operator=(const SessionStore&) = delete;

  // Throws DomainError if the spec does not resolve.
  Session create(Probability prior, const DetectorSpec& spec);

  std::optional<Session> get(const std::string& id) const;

  // Serialized per session. Throws SessionNotFound, RevisionConflict,
  // DomainError (unresolvable override) or IndeterminateUpdate; on any throw
  // nothing is persisted.
  Session append(const std::string& id, const MeasurementRequest& request);

  std::vector<std::string> ids() const;

 private:
  struct Entry {
    explicit Entry(Session s) : session(std::move(s)) {}
    mutable std::mutex mutex;
    Session session;
  };

  std::shared_ptr<Entry> find(const std::string& id) const;
  void replay();
  std::string new_id();

  std::filesystem::path dir_;
  mutable std::mutex map_mutex_;  // guards entries_ and the index file
  std::map<std::string, std::shared_ptr<Entry>> entries_;
};

}  // namespace bayesdet::service
