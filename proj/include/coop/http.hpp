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

#pragma once

#include <memory>
#include <string>

#include "coop/service.hpp"

namespace httplib {
class Server;
}

namespace coop::service {

// HTTP front end:
//   POST /v1/predict                    image bytes, optional X-Image-Id
//   POST /v1/streams/{stream_id}/frames image bytes, optional X-Image-Id
//   GET  /v1/alerts?stream=&since=
//   GET  /v1/healthz
// Every response body is JSON; errors are {"error": message}.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Blocks until stop().
  bool listen(const std::string& host, int port);
  // Binds an ephemeral port and returns it, or -1.
  int bind_any_port(const std::string& host);
  // Serves on the socket from bind_any_port(); blocks until stop().
  bool listen_after_bind();
  void stop();
  bool running() const;

 private:
  Service& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace coop::service
