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

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "coop/service.hpp"

namespace fs = std::filesystem;

namespace coop::service {

namespace {

fs::path resolve(const fs::path& p, const fs::path& base) {
  return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

ServiceConfig ServiceConfig::from_json(std::string_view text,
                                       const fs::path& base_dir) {
  ServiceConfig c;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.contains("class_map"))
      c.class_map = resolve(j["class_map"].get<std::string>(), base_dir);

    const auto& backend = j.at("backend");
    const auto type = backend.value("type", std::string("replay"));
    if (type != "replay")
      throw std::invalid_argument("unsupported backend type: " + type);
    c.fixture = resolve(backend.at("fixture").get<std::string>(), base_dir);
    c.model_tag = backend.value("model_tag", c.model_tag);

    if (j.contains("postprocess")) {
      const auto& p = j["postprocess"];
      c.postprocess.conf_threshold =
          p.value("conf_threshold", c.postprocess.conf_threshold);
      c.postprocess.nms_iou_threshold =
          p.value("nms_iou_threshold", c.postprocess.nms_iou_threshold);
      c.postprocess.max_detections =
          p.value("max_detections", c.postprocess.max_detections);
    }
    if (j.contains("alert_rule")) {
      const auto& a = j["alert_rule"];
      c.alert.confidence_floor = a.value("confidence_floor", c.alert.confidence_floor);
      c.alert.window_size = a.value("window_size", c.alert.window_size);
      c.alert.min_hits = a.value("min_hits", c.alert.min_hits);
      if (a.contains("classes"))
        c.alert_classes = a["classes"].get<std::map<std::string, bool>>();
    }
    c.healthy_class = j.value("healthy_class", c.healthy_class);
    c.log_dir = resolve(j.value("log_dir", std::string("logs")), base_dir);
    c.log_max_bytes = j.value("log_max_bytes", c.log_max_bytes);

    if (j.contains("listen")) {
      const auto listen = j["listen"].get<std::string>();
      const auto colon = listen.rfind(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("listen must be host:port");
      c.host = listen.substr(0, colon);
      c.port = std::stoi(listen.substr(colon + 1));
      if (c.port < 0 || c.port > 65535)
        throw std::invalid_argument("listen port out of range");
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad service config: ") + e.what());
  }
  c.postprocess.validate();
  c.alert.validate();
  return c;
}

ServiceConfig ServiceConfig::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read config: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str(), path.parent_path());
}

std::optional<fs::path> resolve_config_path(const std::optional<fs::path>& from_cli) {
  if (const char* env = std::getenv("COOP_CONFIG"); env && *env) return fs::path(env);
  return from_cli;
}

}  // namespace coop::service
