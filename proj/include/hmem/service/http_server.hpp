#pragma once

#include <memory>

#include "hmem/service/config.hpp"
#include "hmem/service/engine.hpp"

namespace httplib {
class Server;
}

namespace hmem {

// JSON API under /v1. Only POST /v1/memories writes.
class HttpServer {
 public:
  HttpServer(MemoryEngine& engine, ServerConfig config);
  ~HttpServer();

  // Binds the configured address; port 0 picks a free port. Returns the port.
  int bind();

  // Serves until stop(). Requires bind().
  void listen();

  void stop();
  bool is_running() const;

 private:
  void install_routes();

  MemoryEngine& engine_;
  ServerConfig config_;
  std::unique_ptr<httplib::Server> server_;
  int port_ = -1;
};

}  // namespace hmem
