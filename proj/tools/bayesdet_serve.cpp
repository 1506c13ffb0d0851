// Copyright (c) 2026 The bayesdet Authors
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0

#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <pthread.h>
#include <string>
#include <thread>

#include "bayesdet/service/http_api.hpp"
#include "bayesdet/service/session_store.hpp"

namespace {

// "host:port"; a bare port binds on 127.0.0.1.
bool split_listen(const std::string& listen, std::string& host, int& port) {
  const auto colon = listen.rfind(':');
  host = colon == std::string::npos ? "127.0.0.1" : listen.substr(0, colon);
  const std::string port_text = colon == std::string::npos ? listen : listen.substr(colon + 1);
  try {
    std::size_t used = 0;
    port = std::stoi(port_text, &used);
    return used == port_text.size() && port >= 0 && port <= 65535;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bayesdet session and curve service", "bayesdet-serve"};
  std::string listen = "127.0.0.1:8080";
  std::string data_dir = "bayesdet-data";
  app.add_option("--listen", listen, "host:port to bind")->envname("BAYESDET_LISTEN")->capture_default_str();
  app.add_option("--data-dir", data_dir, "Session log directory")
      ->envname("BAYESDET_DATA_DIR")
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  std::string host;
  int port = 0;
  if (!split_listen(listen, host, port)) {
    std::cerr << "error: bad --listen value '" << listen << "'\n";
    return 2;
  }

  // Signals are taken by a dedicated thread so shutdown runs outside a handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  try {
    bayesdet::service::SessionStore store(data_dir);
    bayesdet::service::HttpService service(store);
    const int bound = service.bind(host, port);
    if (bound < 0) {
      std::cerr << "error: cannot bind " << listen << "\n";
      return 1;
    }
    std::cerr << "listening on " << host << ':' << bound << ", data in " << data_dir << " ("
              << store.ids().size() << " sessions)\n";
    std::jthread waiter([&] {
      int sig = 0;
      sigwait(&signals, &sig);
      service.stop();
    });
    service.run();
    // Wake the waiter if the server stopped on its own.
    pthread_kill(waiter.native_handle(), SIGTERM);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
