#include "gaitkit/service/server.hpp"

#include "httplib.h"

namespace gaitkit::service {

namespace {

std::optional<std::string> header(const httplib::Request& req, const char* name) {
  if (!req.has_header(name)) return std::nullopt;
  return req.get_header_value(name);
}

std::optional<std::string> param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return req.get_param_value(name);
}

}  // namespace

HttpServer::HttpServer(ServerConfig config)
    : config_(std::move(config)), api_(config_.root), server_(std::make_unique<httplib::Server>()) {
  // httplib also sets SO_REUSEPORT, which would let a second server share the port silently.
  server_->set_socket_options([](int sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof yes);
  });
  install_routes();
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::install_routes() {
  auto& s = *server_;
  const std::string origin = config_.cors_origin;
  auto send = [origin](httplib::Response& res, const Response& r) {
    res.status = r.status;
    for (const auto& [k, v] : r.headers) res.set_header(k, v);
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_content(r.body, r.content_type);
  };

  s.Get("/api/groups", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, api_.get_groups());
  });
  s.Get(R"(/api/groups/([^/]+)/patients)", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, api_.get_patients(req.matches[1]));
  });
  s.Get(R"(/api/groups/([^/]+)/patients/([^/]+)/trials)",
        [this, send](const httplib::Request& req, httplib::Response& res) {
          send(res, api_.get_trials(req.matches[1], req.matches[2]));
        });
  s.Post("/api/ensemble", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, api_.post_ensemble(req.body));
  });
  s.Post("/api/spatiotemporal", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, api_.post_spatiotemporal(req.body));
  });
  s.Get(R"(/api/window/([^/]+)/([^/]+)/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, api_.get_window(req.matches[1], req.matches[2], req.matches[3], param(req, "side"),
                              param(req, "cycle")));
  });
  s.Get(R"(/api/video/([^/]+)/([^/]+)/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
    const auto r = api_.get_video(req.matches[1], req.matches[2], req.matches[3], header(req, "Range"));
    // The handler already applied the Range header; keep httplib from slicing again.
    const_cast<httplib::Request&>(req).ranges.clear();
    send(res, r);
  });
  s.Options(R"(/api/.*)", [origin](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, Range");
  });
  s.set_error_handler([origin](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const char* code = res.status == 404 ? "not_found" : res.status == 416 ? "range_not_satisfiable" : "bad_request";
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_content(std::string("{\"detail\":\"") + httplib::status_message(res.status) +
                        "\",\"error\":\"" + code + "\"}",
                    "application/json");
  });
}

int HttpServer::start() {
  if (config_.port == 0) {
    bound_port_ = server_->bind_to_any_port(config_.host);
  } else {
    bound_port_ = server_->bind_to_port(config_.host, config_.port) ? config_.port : -1;
  }
  if (bound_port_ <= 0) {
    throw Error(ErrorCode::IoFailure,
                "cannot bind " + config_.host + ":" + std::to_string(config_.port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound_port_;
}

void HttpServer::run() {
  if (!server_->listen(config_.host, config_.port)) {
    throw Error(ErrorCode::IoFailure, "cannot listen on " + config_.host + ":" + std::to_string(config_.port));
  }
}

void HttpServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace gaitkit::service
