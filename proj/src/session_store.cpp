// Copyright (c) 2026 The bayesdet Authors
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0

#include "bayesdet/service/session_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "bayesdet/signal_models.hpp"

namespace bayesdet::service {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t secs = std::chrono::system_clock::to_time_t(now);
  const auto millis =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(millis));
  return out;
}

[[noreturn]] void fail(const std::string& what, const fs::path& path) {
  throw StorageError(what + " " + path.string() + ": " + std::strerror(errno));
}

void fsync_path(const fs::path& path, int flags) {
  const int fd = ::open(path.c_str(), flags);
  if (fd < 0) fail("open", path);
  if (::fsync(fd) != 0) {
    ::close(fd);
    fail("fsync", path);
  }
  ::close(fd);
}

// Appends `line` plus a newline and fsyncs before returning.
void append_durable(const fs::path& path, const std::string& line) {
  const bool fresh = !fs::exists(path);
  const int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) fail("open", path);
  const std::string data = line + "\n";
  std::size_t written = 0;
  while (written < data.size()) {
    const ssize_t n = ::write(fd, data.data() + written, data.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      fail("write", path);
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    ::close(fd);
    fail("fsync", path);
  }
  ::close(fd);
  if (fresh) fsync_path(path.parent_path(), O_RDONLY | O_DIRECTORY);
}

// Complete (newline-terminated, parseable) records of a JSONL file. A torn
// tail is cut off so later appends start on a fresh line.
std::vector<Json> read_records(const fs::path& path) {
  std::vector<Json> records;
  std::ifstream in(path, std::ios::binary);
  if (!in) return records;
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t good = 0;
  std::size_t start = 0;
  while (start < content.size()) {
    const std::size_t end = content.find('\n', start);
    if (end == std::string::npos) break;
    auto record = Json::parse(content.begin() + static_cast<std::ptrdiff_t>(start),
                              content.begin() + static_cast<std::ptrdiff_t>(end), nullptr, false);
    if (record.is_discarded()) break;
    records.push_back(std::move(record));
    good = end + 1;
    start = end + 1;
  }
  if (good < content.size()) {
    in.close();
    fs::resize_file(path, good);
    fsync_path(path, O_WRONLY);
  }
  return records;
}

Json model_json(const std::optional<ModelSpec>& model) {
  if (!model) return nullptr;
  return Json{{"snr", model->snr}, {"threshold", model->threshold}};
}

std::optional<ModelSpec> model_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return ModelSpec{j.at("snr").get<double>(), j.at("threshold").get<double>()};
}

fs::path log_path(const fs::path& dir, const std::string& id) {
  return dir / "sessions" / (id + ".jsonl");
}

}  // namespace

DetectorCharacteristic DetectorSpec::resolve() const {
  if (const auto* det = std::get_if<DetectorCharacteristic>(&spec_)) return *det;
  const auto& m = std::get<ModelSpec>(spec_);
  return detector_at(Threshold(m.threshold), SignalModel::rayleigh_rician(Snr(m.snr)));
}

SessionStore::SessionStore(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_ / "sessions");
  replay();
}

void SessionStore::replay() {
  for (const auto& rec : read_records(dir_ / "index.jsonl")) {
    Session s;
    s.id = rec.at("id").get<std::string>();
    s.created_at = rec.at("created_at").get<std::string>();
    s.prior = Probability(rec.at("prior").get<double>());
    s.default_detector = {Probability(rec.at("pd").get<double>()),
                          Probability(rec.at("pfa").get<double>())};
    s.default_model = model_from(rec.at("model"));
    s.belief = BeliefState(s.prior);
    for (const auto& m : read_records(log_path(dir_, s.id))) {
      const DetectorCharacteristic det{Probability(m.at("pd").get<double>()),
                                       Probability(m.at("pfa").get<double>())};
      s.belief = std::move(s.belief).observe(parse_outcome(m.at("outcome").get<std::string>()), det);
      s.look_meta.push_back({m.at("recorded_at").get<std::string>(), model_from(m.at("model"))});
      ++s.revision;
    }
    const std::string id = s.id;
    entries_[id] = std::make_shared<Entry>(std::move(s));
  }
}

std::string SessionStore::new_id() {
  static thread_local std::mt19937_64 gen{std::random_device{}()};
  char buf[17];
  do {
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(gen()));
  } while (entries_.contains(buf));
  return buf;
}

Session SessionStore::create(Probability prior, const DetectorSpec& spec) {
  Session s;
  s.prior = prior;
  s.default_detector = spec.resolve();
  s.default_model = spec.model();
  s.belief = BeliefState(prior);
  s.created_at = utc_now();

  std::lock_guard lock(map_mutex_);
  s.id = new_id();
  append_durable(dir_ / "index.jsonl",
                 Json{{"id", s.id},
                      {"created_at", s.created_at},
                      {"prior", prior.value()},
                      {"pd", s.default_detector.pd.value()},
                      {"pfa", s.default_detector.pfa.value()},
                      {"model", model_json(s.default_model)}}
                     .dump());
  entries_[s.id] = std::make_shared<Entry>(s);
  return s;
}

std::shared_ptr<SessionStore::Entry> SessionStore::find(const std::string& id) const {
  std::lock_guard lock(map_mutex_);
  const auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : it->second;
}

std::optional<Session> SessionStore::get(const std::string& id) const {
  const auto entry = find(id);
  if (!entry) return std::nullopt;
  std::lock_guard lock(entry->mutex);
  return entry->session;
}

Session SessionStore::append(const std::string& id, const MeasurementRequest& request) {
  const auto entry = find(id);
  if (!entry) throw SessionNotFound(id);
  std::lock_guard lock(entry->mutex);
  Session& s = entry->session;
  if (request.expected_revision != s.revision) {
    throw RevisionConflict(request.expected_revision, s.revision);
  }
  const DetectorCharacteristic det =
      request.detector ? request.detector->resolve() : s.default_detector;
  const std::optional<ModelSpec> model =
      request.detector ? request.detector->model() : s.default_model;
  BeliefState next = s.belief.observe(request.outcome, det);
  const LookMeta meta{utc_now(), model};

  append_durable(log_path(dir_, id), Json{{"revision", s.revision + 1},
                                          {"outcome", std::string(to_string(request.outcome))},
                                          {"pd", det.pd.value()},
                                          {"pfa", det.pfa.value()},
                                          {"model", model_json(model)},
                                          {"recorded_at", meta.recorded_at}}
                                         .dump());
  s.belief = std::move(next);
  s.look_meta.push_back(meta);
  ++s.revision;
  return s;
}

std::vector<std::string> SessionStore::ids() const {
  std::lock_guard lock(map_mutex_);
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [id, entry] : entries_) out.push_back(id);
  return out;
}

}  // namespace bayesdet::service
