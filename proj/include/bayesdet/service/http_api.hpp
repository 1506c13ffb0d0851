// Copyright (c) 2026 The bayesdet Authors
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0

#pragma once

// HTTP+JSON front end over a SessionStore.
//
//   POST /sessions                    {prior, detector: {pd, pfa}} or {prior, model: {snr, threshold}}
//   GET  /sessions/{id}
//   POST /sessions/{id}/measurements  {outcome, expected_revision, [detector | model]}
//   GET  /roc?snr=&prior=&points=
//   GET  /healthz
//
// Errors are {"code": ..., "message": ...} with status 400, 404, 409 or 422.

#include <memory>
#include <string>

#include <json.hpp>

#include "bayesdet/service/session_store.hpp"

namespace httplib {
class Server;
}

namespace bayesdet::service {

nlohmann::ordered_json to_json(const Session& session);

void register_routes(httplib::Server& server, SessionStore& store);

class HttpService {
 public:
  explicit HttpService(SessionStore& store);
  ~HttpService();

  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  // Binds without serving; port 0 picks a free port. Returns the bound port,
  // or -1 on failure.
  int bind(const std::string& host, int port);

  // Serves until stop(). Requires a successful bind().
  bool run();
  void stop();
  void wait_until_ready() const;

 private:
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace bayesdet::service
