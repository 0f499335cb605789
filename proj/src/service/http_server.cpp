#include "hmem/service/http_server.hpp"

#include <httplib.h>

#include "hmem/error.hpp"
#include "hmem/service/json_api.hpp"

namespace hmem {

namespace {

using api::Json;

void send(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::config_error:
      return 400;
    case ErrorCode::not_found:
      return 404;
    case ErrorCode::backend_error:
    case ErrorCode::extraction_error:
    case ErrorCode::io_error:
      return 503;
    case ErrorCode::corrupt_data:
      return 500;
  }
  return 500;
}

template <class Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send(res, status_for(e.code()), api::error_body(to_string(e.code()), e.what()));
    } catch (const std::exception& e) {
      send(res, 500, api::error_body("internal", e.what()));
    }
  };
}

Json parse_body(const httplib::Request& req) {
  Json j = Json::parse(req.body, nullptr, false);
  if (j.is_discarded()) throw InvalidArgument("body: not valid JSON");
  return j;
}

}  // namespace

HttpServer::HttpServer(MemoryEngine& engine, ServerConfig config)
    : engine_(engine), config_(std::move(config)), server_(std::make_unique<httplib::Server>()) {
  const int threads = config_.threads;
  server_->new_task_queue = [threads] { return new httplib::ThreadPool(static_cast<size_t>(threads)); };
  server_->set_payload_max_length(config_.max_body_bytes);
  install_routes();
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::install_routes() {
  server_->Post("/v1/memories", guarded([this](const httplib::Request& req, httplib::Response& res) {
                  IngestRequest in = api::parse_ingest_request(parse_body(req));
                  send(res, 200, api::to_json(engine_.ingest(in)));
                }));

  server_->Post("/v1/query", guarded([this](const httplib::Request& req, httplib::Response& res) {
                  api::QueryRequest q = api::parse_query_request(parse_body(req));
                  GraphSnapshot snap = engine_.snapshot();
                  RetrievalResult r = engine_.retriever().retrieve(q.query, snap);
                  send(res, 200, api::to_json(r, *snap, q.with_timings));
                }));

  server_->Get(R"(/v1/sessions/([^/]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 GraphSnapshot snap = engine_.snapshot();
                 const std::string id = req.matches[1];
                 const SessionNode* s = snap->find_session(id);
                 if (!s) throw NotFound("session " + id + " not found");
                 send(res, 200, api::session_view(*s));
               }));

  server_->Get("/v1/stats", guarded([this](const httplib::Request&, httplib::Response& res) {
                 send(res, 200, api::to_json(engine_.stats()));
               }));

  server_->set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    std::string code = res.status == 404 ? "not-found" : res.status == 413 ? "payload-too-large" : "http-error";
    res.set_content(api::error_body(code, httplib::status_message(res.status)).dump(), "application/json");
  });
}

int HttpServer::bind() {
  if (config_.port == 0) {
    port_ = server_->bind_to_any_port(config_.bind);
  } else {
    port_ = server_->bind_to_port(config_.bind, config_.port) ? config_.port : -1;
  }
  if (port_ < 0) {
    throw IoError("cannot bind " + config_.bind + ":" + std::to_string(config_.port));
  }
  return port_;
}

void HttpServer::listen() {
  if (port_ < 0) throw std::logic_error("HttpServer::listen before bind");
  if (!server_->listen_after_bind()) throw IoError("HTTP server stopped with an error");
}

void HttpServer::stop() {
  if (server_) server_->stop();
}

bool HttpServer::is_running() const { return server_->is_running(); }

}  // namespace hmem
