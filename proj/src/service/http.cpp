/* Copyright 2026 The Coop Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "coop/http.hpp"

#include <span>

#include "httplib.h"

namespace coop::service {

namespace {

void reply(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& msg) {
  reply(res, status, {{"error", msg}});
}

infer::FrameRequest frame_request(const httplib::Request& req) {
  auto type = req.get_header_value("Content-Type");
  type = type.substr(0, type.find(';'));
  if (type != "image/jpeg" && type != "image/png")
    throw ServiceError(400, "content-type must be image/jpeg or image/png");
  if (req.body.empty()) throw ServiceError(400, "bad image: empty body");
  infer::FrameRequest fr;
  fr.image_bytes = std::span(reinterpret_cast<const std::uint8_t*>(req.body.data()),
                             req.body.size());
  if (req.has_header("X-Image-Id")) fr.image_id = req.get_header_value("X-Image-Id");
  return fr;
}

template <typename F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const ServiceError& e) {
    reply_error(res, e.status(), e.what());
  } catch (const std::exception& e) {
    reply_error(res, 500, e.what());
  }
}

}  // namespace

HttpServer::HttpServer(Service& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto& srv = *server_;

  srv.Post("/v1/predict", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto r = service_.handle_predict(frame_request(req));
      reply(res, 200, service_.to_json(r));
    });
  });

  srv.Post(R"(/v1/streams/([^/]+)/frames)",
           [this](const httplib::Request& req, httplib::Response& res) {
             guarded(res, [&] {
               const auto r = service_.ingest_frame(req.matches[1], frame_request(req));
               reply(res, 200, service_.to_json(r));
             });
           });

  srv.Get("/v1/alerts", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::optional<std::string> stream;
      std::optional<TimePoint> since;
      if (req.has_param("stream") && !req.get_param_value("stream").empty())
        stream = req.get_param_value("stream");
      if (req.has_param("since") && !req.get_param_value("since").empty()) {
        since = parse_rfc3339(req.get_param_value("since"));
        if (!since) throw ServiceError(400, "malformed since timestamp");
      }
      auto arr = nlohmann::json::array();
      for (const auto& e : service_.list_alerts(stream, since))
        arr.push_back(service_.to_json(e));
      reply(res, 200, {{"alerts", std::move(arr)}});
    });
  });

  srv.Get("/v1/healthz", [this](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { reply(res, 200, service_.to_json(service_.health())); });
  });

  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty())
      reply_error(res, res.status, res.status == 404 ? "not found" : "request failed");
  });
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::listen(const std::string& host, int port) {
  return server_->listen(host, port);
}

int HttpServer::bind_any_port(const std::string& host) {
  return server_->bind_to_any_port(host);
}

bool HttpServer::listen_after_bind() { return server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_) server_->stop();
}

bool HttpServer::running() const { return server_->is_running(); }

}  // namespace coop::service
