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

// Frame-prediction service: verdicts, per-stream alerting and audit logs.
// The HTTP front end in coop/http.hpp is a thin layer over Service.

#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "coop/alerting.hpp"
#include "coop/dataset.hpp"
#include "coop/inference.hpp"
#include "coop/logs.hpp"
#include "coop/timestamp.hpp"
#include "json.hpp"

namespace coop::service {

// Carries the HTTP status the front end should answer with.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

struct ServiceConfig {
  std::optional<std::filesystem::path> class_map;  // default poultry classes
  std::filesystem::path fixture;                   // replay backend
  std::string model_tag = "replay";
  infer::PostprocessConfig postprocess;
  AlertRule alert;
  // Per-class alert switches by class name; unnamed classes stay on.
  std::map<std::string, bool> alert_classes;
  std::string healthy_class = "Healthy";
  std::filesystem::path log_dir = "logs";
  std::uint64_t log_max_bytes = 64ull << 20;
  std::string host = "127.0.0.1";
  int port = 8080;

  // Relative paths resolve against `base_dir`. Throws std::invalid_argument.
  static ServiceConfig from_json(std::string_view text,
                                 const std::filesystem::path& base_dir = {});
  static ServiceConfig load(const std::filesystem::path& path);
};

// COOP_CONFIG, when set, wins over the path given on the command line.
std::optional<std::filesystem::path> resolve_config_path(
    const std::optional<std::filesystem::path>& from_cli);

enum class Verdict { kHealthy, kDiseaseSuspected, kNoBirds };

std::string_view verdict_name(Verdict v) noexcept;

struct PredictionResponse {
  std::string image_id;
  std::string model_tag;
  std::vector<Detection> detections;
  Verdict verdict = Verdict::kNoBirds;
  TimePoint timestamp;
  std::uint64_t seq = 0;  // detection-log sequence number
};

struct FrameResponse {
  std::string stream_id;
  std::uint64_t frame_index = 0;
  PredictionResponse prediction;
  std::vector<AlertEvent> alerts;
};

struct HealthStatus {
  bool ok = true;
  std::string backend;
  double uptime_s = 0.0;
};

class Service {
 public:
  using ClockFn = std::function<TimePoint()>;

  struct Options {
    infer::PostprocessConfig postprocess;
    AlertRule alert;
    std::string healthy_class = "Healthy";
    std::filesystem::path log_dir = "logs";
    std::uint64_t log_max_bytes = 64ull << 20;
  };

  // Replays the alert log under options.log_dir to restore open alerts.
  Service(ClassMap classes, std::shared_ptr<const infer::Detector> backend,
          Options options, ClockFn clock = now_ms);

  static std::unique_ptr<Service> from_config(const ServiceConfig& config,
                                              ClockFn clock = now_ms);

  PredictionResponse handle_predict(const infer::FrameRequest& request);
  FrameResponse ingest_frame(const std::string& stream_id,
                             const infer::FrameRequest& request);
  std::vector<AlertEvent> list_alerts(
      const std::optional<std::string>& stream_id,
      const std::optional<TimePoint>& since) const;
  HealthStatus health() const;

  // nullptr unloads the backend; requests then fail with 503.
  void set_backend(std::shared_ptr<const infer::Detector> backend);

  const ClassMap& classes() const noexcept { return classes_; }
  const Options& options() const noexcept { return options_; }

  nlohmann::json to_json(const PredictionResponse& r) const;
  nlohmann::json to_json(const FrameResponse& r) const;
  nlohmann::json to_json(const AlertEvent& e) const;
  nlohmann::json to_json(const HealthStatus& h) const;

 private:
  struct Stream {
    std::mutex mu;
    AlertTracker tracker;
    std::uint64_t next_frame = 0;

    Stream(const AlertRule& rule, std::vector<int> classes)
        : tracker(rule, std::move(classes)) {}
  };

  PredictionResponse predict(const infer::FrameRequest& request,
                             const std::string& stream_label);
  Verdict verdict_for(const std::vector<Detection>& dets) const;
  Stream& stream(const std::string& id);
  void recover_alerts();

  ClassMap classes_;
  Options options_;
  ClockFn clock_;
  TimePoint started_;
  std::optional<int> healthy_id_;
  std::vector<int> disease_classes_;

  mutable std::shared_mutex backend_mu_;
  std::shared_ptr<const infer::Detector> backend_;

  JsonlLog detection_log_;
  JsonlLog alert_log_;

  mutable std::shared_mutex streams_mu_;
  std::map<std::string, std::unique_ptr<Stream>> streams_;

  mutable std::mutex alerts_mu_;
  std::vector<AlertEvent> alerts_;
  // (stream, class) pairs open at recovery time, applied on stream creation.
  std::set<std::pair<std::string, int>> recovered_open_;
};

nlohmann::json alert_rule_to_json(const AlertRule& rule);

}  // namespace coop::service
