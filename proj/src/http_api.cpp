// Copyright (c) 2026 The bayesdet Authors
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0

#include "bayesdet/service/http_api.hpp"

#include <httplib.h>

#include <cmath>
#include <cstdlib>
#include <optional>
#include <stdexcept>

#include "bayesdet/io.hpp"
#include "bayesdet/roc.hpp"

namespace bayesdet::service {
namespace {

using Json = nlohmann::ordered_json;

// Client mistake in the request itself.
class BadRequest : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr const char* kJson = "application/json";

void send(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(io::document(body), kJson);
}

void send_error(httplib::Response& res, int status, const std::string& code,
                const std::string& message) {
  send(res, status, Json{{"code", code}, {"message", message}});
}

Json parse_body(const httplib::Request& req) {
  auto body = Json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) throw BadRequest("body must be a JSON object");
  return body;
}

double number_field(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw BadRequest(std::string("missing field '") + key + "'");
  if (!it->is_number()) throw BadRequest(std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

Probability probability_field(const Json& obj, const char* key) {
  const double v = number_field(obj, key);
  if (!(v >= 0.0 && v <= 1.0)) {
    throw BadRequest(std::string("field '") + key + "' must be a probability in [0, 1]");
  }
  return Probability(v);
}

// `detector` or `model` member, at most one. Model values are range-checked
// later, at resolution.
std::optional<DetectorSpec> detector_spec(const Json& body) {
  const bool has_detector = body.contains("detector");
  const bool has_model = body.contains("model");
  if (has_detector && has_model) throw BadRequest("give either 'detector' or 'model', not both");
  if (has_detector) {
    const auto& d = body["detector"];
    if (!d.is_object()) throw BadRequest("'detector' must be an object {pd, pfa}");
    return DetectorSpec::from_detector({probability_field(d, "pd"), probability_field(d, "pfa")});
  }
  if (has_model) {
    const auto& m = body["model"];
    if (!m.is_object()) throw BadRequest("'model' must be an object {snr, threshold}");
    return DetectorSpec::from_model(number_field(m, "snr"), number_field(m, "threshold"));
  }
  return std::nullopt;
}

std::optional<double> query_number(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  const std::string text = req.get_param_value(key);
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
    throw BadRequest(std::string("query parameter '") + key + "' must be a number");
  }
  return v;
}

Json model_json(const std::optional<ModelSpec>& model) {
  if (!model) return nullptr;
  return Json{{"snr", model->snr}, {"threshold", model->threshold}};
}

// Runs a handler, mapping exceptions onto status codes.
template <class Fn>
void guarded(httplib::Response& res, Fn fn) {
  try {
    fn();
  } catch (const BadRequest& e) {
    send_error(res, 400, "invalid_request", e.what());
  } catch (const SessionNotFound& e) {
    send_error(res, 404, "not_found", e.what());
  } catch (const RevisionConflict& e) {
    send_error(res, 409, "revision_conflict", e.what());
  } catch (const IndeterminateUpdate& e) {
    send_error(res, 422, "indeterminate_update", e.what());
  } catch (const DomainError& e) {
    send_error(res, 422, "unresolvable_detector", e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "internal", e.what());
  }
}

}  // namespace

Json to_json(const Session& s) {
  Json looks = Json::array();
  const auto& records = s.belief.looks();
  for (std::size_t i = 0; i < records.size(); ++i) {
    Json look = io::to_json(records[i], i + 1);
    look["model"] = model_json(s.look_meta[i].model);
    look["recorded_at"] = s.look_meta[i].recorded_at;
    looks.push_back(std::move(look));
  }
  return Json{{"id", s.id},
              {"created_at", s.created_at},
              {"prior", s.prior.value()},
              {"default_detector", io::to_json(s.default_detector)},
              {"default_model", model_json(s.default_model)},
              {"revision", s.revision},
              {"current", s.belief.current().value()},
              {"looks", std::move(looks)}};
}

void register_routes(httplib::Server& server, SessionStore& store) {
  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    send(res, 200, Json{{"status", "ok"}});
  });

  server.Post("/sessions", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const Json body = parse_body(req);
      const Probability prior = probability_field(body, "prior");
      const auto spec = detector_spec(body);
      if (!spec) throw BadRequest("missing 'detector' or 'model'");
      send(res, 201, to_json(store.create(prior, *spec)));
    });
  });

  server.Get("/sessions/:id", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto& id = req.path_params.at("id");
      const auto session = store.get(id);
      if (!session) throw SessionNotFound(id);
      send(res, 200, to_json(*session));
    });
  });

  server.Post("/sessions/:id/measurements",
              [&store](const httplib::Request& req, httplib::Response& res) {
                guarded(res, [&] {
                  const Json body = parse_body(req);
                  const auto outcome = body.find("outcome");
                  if (outcome == body.end() || !outcome->is_string()) {
                    throw BadRequest("missing string field 'outcome'");
                  }
                  MeasurementRequest request{MeasurementOutcome::Positive, std::nullopt, 0};
                  try {
                    request.outcome = parse_outcome(outcome->get<std::string>());
                  } catch (const DomainError& e) {
                    throw BadRequest(e.what());
                  }
                  const auto revision = body.find("expected_revision");
                  if (revision == body.end() || !revision->is_number_unsigned()) {
                    throw BadRequest("'expected_revision' must be a nonnegative integer");
                  }
                  request.expected_revision = revision->get<std::uint64_t>();
                  request.detector = detector_spec(body);
                  send(res, 200, to_json(store.append(req.path_params.at("id"), request)));
                });
              });

  server.Get("/roc", [](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto snr = query_number(req, "snr");
      if (!snr) throw BadRequest("missing query parameter 'snr'");
      const double prior = query_number(req, "prior").value_or(0.5);
      const double points = query_number(req, "points").value_or(kDefaultRocPoints);
      if (points < 2 || points != std::floor(points) || points > 1e6) {
        throw BadRequest("'points' must be an integer in [2, 1000000]");
      }
      try {
        const auto curve = roc_curve(SignalModel::rayleigh_rician(Snr(*snr)), Probability(prior),
                                     static_cast<std::size_t>(points));
        res.status = 200;
        res.set_content(io::document(io::to_json(curve)), kJson);
      } catch (const DomainError& e) {
        throw BadRequest(e.what());
      }
    });
  });

  // Browser clients on another origin.
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    send_error(res, res.status, res.status == 404 ? "not_found" : "error",
               "no route for " + req.method + " " + req.path);
    return httplib::Server::HandlerResponse::Handled;
  });
}

HttpService::HttpService(SessionStore& store) : server_(std::make_unique<httplib::Server>()) {
  register_routes(*server_, store);
}

HttpService::~HttpService() = default;

int HttpService::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool HttpService::run() { return server_->listen_after_bind(); }

void HttpService::stop() { server_->stop(); }

void HttpService::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace bayesdet::service
