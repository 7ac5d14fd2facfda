#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <thread>

#include "gaitkit/service/api.hpp"

namespace httplib {
class Server;
}

namespace gaitkit::service {

struct ServerConfig {
  std::filesystem::path root;
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::string cors_origin = "*";
};

/// HTTP front of Api. Requests are handled on httplib's worker pool.
class HttpServer {
 public:
  explicit HttpServer(ServerConfig config);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds and starts serving in a background thread; returns the bound port.
  /// Errors: IoFailure when the address cannot be bound.
  int start();
  /// Blocks serving on the calling thread.
  void run();
  void stop();

 private:
  void install_routes();

  ServerConfig config_;
  Api api_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int bound_port_ = 0;
};

}  // namespace gaitkit::service
