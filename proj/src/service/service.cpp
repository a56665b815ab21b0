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

#include "coop/service.hpp"

#include <algorithm>

namespace coop::service {

std::string_view verdict_name(Verdict v) noexcept {
  switch (v) {
    case Verdict::kHealthy:
      return "healthy";
    case Verdict::kDiseaseSuspected:
      return "disease_suspected";
    case Verdict::kNoBirds:
      return "no_birds";
  }
  return "?";
}

nlohmann::json alert_rule_to_json(const AlertRule& rule) {
  return {{"confidence_floor", rule.confidence_floor},
          {"window_size", rule.window_size},
          {"min_hits", rule.min_hits},
          {"disabled_classes", rule.disabled_classes}};
}

namespace {

AlertRule alert_rule_from_json(const nlohmann::json& j) {
  AlertRule r;
  r.confidence_floor = j.at("confidence_floor").get<double>();
  r.window_size = j.at("window_size").get<std::size_t>();
  r.min_hits = j.at("min_hits").get<std::size_t>();
  r.disabled_classes = j.value("disabled_classes", std::set<int>{});
  return r;
}

AlertEvent event_from_json(const nlohmann::json& j) {
  AlertEvent e;
  e.stream_id = j.at("stream_id").get<std::string>();
  e.class_id = j.at("class_id").get<int>();
  e.class_name = j.at("class_name").get<std::string>();
  for (const auto& f : j.at("window"))
    e.window.push_back({f.at("frame_index").get<std::uint64_t>(),
                        f.at("image_id").get<std::string>()});
  const auto t = parse_rfc3339(j.at("triggered_at").get<std::string>());
  if (!t) throw std::invalid_argument("bad triggered_at in alert log");
  e.triggered_at = *t;
  e.rule = alert_rule_from_json(j.at("rule"));
  return e;
}

}  // namespace

Service::Service(ClassMap classes, std::shared_ptr<const infer::Detector> backend,
                 Options options, ClockFn clock)
    : classes_(std::move(classes)),
      options_(std::move(options)),
      clock_(std::move(clock)),
      started_(clock_()),
      backend_(std::move(backend)),
      detection_log_(options_.log_dir / "detections.jsonl", options_.log_max_bytes),
      alert_log_(options_.log_dir / "alerts.jsonl", options_.log_max_bytes) {
  options_.postprocess.validate();
  options_.alert.validate();
  healthy_id_ = classes_.id_of(options_.healthy_class);
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    const int id = static_cast<int>(c);
    if (id != healthy_id_) disease_classes_.push_back(id);
  }
  recover_alerts();
}

std::unique_ptr<Service> Service::from_config(const ServiceConfig& config,
                                              ClockFn clock) {
  ClassMap classes = config.class_map ? ClassMap::load(*config.class_map)
                                      : ClassMap::poultry_default();
  Options opts;
  opts.postprocess = config.postprocess;
  opts.alert = config.alert;
  for (const auto& [name, enabled] : config.alert_classes) {
    const auto id = classes.id_of(name);
    if (!id) throw std::invalid_argument("alert_rule names unknown class: " + name);
    if (!enabled) opts.alert.disabled_classes.insert(*id);
  }
  opts.healthy_class = config.healthy_class;
  opts.log_dir = config.log_dir;
  opts.log_max_bytes = config.log_max_bytes;
  auto backend = std::make_shared<infer::ReplayDetector>(
      infer::ReplayStore::load(config.fixture), config.model_tag);
  return std::make_unique<Service>(std::move(classes), std::move(backend),
                                   std::move(opts), std::move(clock));
}

void Service::recover_alerts() {
  std::lock_guard lock(alerts_mu_);
  for (const auto& rec : alert_log_.read_all()) {
    const auto type = rec.value("type", std::string());
    if (type == "alert_opened") {
      auto e = event_from_json(rec.at("event"));
      recovered_open_.insert({e.stream_id, e.class_id});
      alerts_.push_back(std::move(e));
    } else if (type == "alert_closed") {
      recovered_open_.erase(
          {rec.at("stream_id").get<std::string>(), rec.at("class_id").get<int>()});
    }
  }
}

void Service::set_backend(std::shared_ptr<const infer::Detector> backend) {
  std::unique_lock lock(backend_mu_);
  backend_ = std::move(backend);
}

Verdict Service::verdict_for(const std::vector<Detection>& dets) const {
  if (dets.empty()) return Verdict::kNoBirds;
  for (const auto& d : dets) {
    if (d.class_id != healthy_id_ &&
        d.confidence >= options_.alert.confidence_floor)
      return Verdict::kDiseaseSuspected;
  }
  return Verdict::kHealthy;
}

PredictionResponse Service::predict(const infer::FrameRequest& request,
                                    const std::string& stream_label) {
  std::shared_ptr<const infer::Detector> backend;
  {
    std::shared_lock lock(backend_mu_);
    backend = backend_;
  }
  if (!backend || !backend->ready())
    throw ServiceError(503, "backend unavailable");

  infer::RawInference raw;
  try {
    raw = backend->infer(request);
  } catch (const infer::InferenceError& e) {
    using Kind = infer::InferenceError::Kind;
    const int status =
        e.kind() == Kind::kBadImage || e.kind() == Kind::kNoFixture ? 400 : 503;
    throw ServiceError(status, e.what());
  }
  for (const auto& d : raw.candidates) {
    if (!classes_.contains(d.class_id))
      throw ServiceError(503, "backend returned unknown class id " +
                                  std::to_string(d.class_id));
  }

  PredictionResponse r;
  r.image_id = raw.image_id;
  r.model_tag = raw.model_tag;
  r.detections = infer::postprocess(raw, options_.postprocess);
  r.verdict = verdict_for(r.detections);
  r.timestamp = clock_();

  nlohmann::json rec{{"stream_id", stream_label},
                     {"image_id", r.image_id},
                     {"response", to_json(r)}};
  rec["response"].erase("seq");
  r.seq = detection_log_.append(std::move(rec));
  return r;
}

PredictionResponse Service::handle_predict(const infer::FrameRequest& request) {
  return predict(request, "adhoc");
}

Service::Stream& Service::stream(const std::string& id) {
  {
    std::shared_lock lock(streams_mu_);
    if (auto it = streams_.find(id); it != streams_.end()) return *it->second;
  }
  std::unique_lock lock(streams_mu_);
  auto& slot = streams_[id];
  if (!slot) {
    slot = std::make_unique<Stream>(options_.alert, disease_classes_);
    std::lock_guard alerts_lock(alerts_mu_);
    for (int c : disease_classes_)
      if (recovered_open_.count({id, c})) slot->tracker.restore_open(c);
  }
  return *slot;
}

FrameResponse Service::ingest_frame(const std::string& stream_id,
                                    const infer::FrameRequest& request) {
  if (stream_id.empty()) throw ServiceError(400, "empty stream id");
  Stream& s = stream(stream_id);
  std::lock_guard lock(s.mu);

  FrameResponse out;
  out.stream_id = stream_id;
  out.prediction = predict(request, stream_id);
  out.frame_index = s.next_frame++;

  std::set<int> qualifying;
  for (const auto& d : out.prediction.detections)
    if (d.confidence >= options_.alert.confidence_floor) qualifying.insert(d.class_id);

  const FrameRef frame{out.frame_index, out.prediction.image_id};
  const auto transition = s.tracker.observe(frame, qualifying);
  for (int c : transition.opened) {
    AlertEvent e{stream_id, c, classes_.name(c), s.tracker.window_hits(c),
                 out.prediction.timestamp, options_.alert};
    alert_log_.append({{"type", "alert_opened"}, {"event", to_json(e)}});
    {
      std::lock_guard alerts_lock(alerts_mu_);
      alerts_.push_back(e);
    }
    out.alerts.push_back(std::move(e));
  }
  for (int c : transition.closed) {
    alert_log_.append({{"type", "alert_closed"},
                       {"stream_id", stream_id},
                       {"class_id", c},
                       {"class_name", classes_.name(c)},
                       {"closed_at", format_rfc3339(out.prediction.timestamp)},
                       {"frame_index", out.frame_index}});
  }
  return out;
}

std::vector<AlertEvent> Service::list_alerts(
    const std::optional<std::string>& stream_id,
    const std::optional<TimePoint>& since) const {
  std::vector<AlertEvent> out;
  {
    std::lock_guard lock(alerts_mu_);
    for (const auto& e : alerts_) {
      if (stream_id && e.stream_id != *stream_id) continue;
      if (since && e.triggered_at < *since) continue;
      out.push_back(e);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.triggered_at < b.triggered_at;
  });
  return out;
}

HealthStatus Service::health() const {
  std::shared_lock lock(backend_mu_);
  HealthStatus h;
  h.ok = backend_ && backend_->ready();
  h.backend = backend_ ? backend_->model_tag() : "none";
  h.uptime_s = std::max(0.0, (clock_() - started_).count() / 1000.0);
  return h;
}

nlohmann::json Service::to_json(const PredictionResponse& r) const {
  auto dets = nlohmann::json::array();
  for (const auto& d : r.detections) {
    dets.push_back({{"class_name", classes_.name(d.class_id)},
                    {"class_id", d.class_id},
                    {"confidence", d.confidence},
                    {"box", {d.box.x_min, d.box.y_min, d.box.x_max, d.box.y_max}}});
  }
  return {{"image_id", r.image_id},
          {"model_tag", r.model_tag},
          {"detections", std::move(dets)},
          {"verdict", verdict_name(r.verdict)},
          {"timestamp", format_rfc3339(r.timestamp)},
          {"seq", r.seq}};
}

nlohmann::json Service::to_json(const FrameResponse& r) const {
  auto j = to_json(r.prediction);
  j["stream_id"] = r.stream_id;
  j["frame_index"] = r.frame_index;
  auto alerts = nlohmann::json::array();
  for (const auto& e : r.alerts) alerts.push_back(to_json(e));
  j["alerts"] = std::move(alerts);
  return j;
}

nlohmann::json Service::to_json(const AlertEvent& e) const {
  auto window = nlohmann::json::array();
  for (const auto& f : e.window)
    window.push_back({{"frame_index", f.index}, {"image_id", f.image_id}});
  return {{"stream_id", e.stream_id},
          {"class_id", e.class_id},
          {"class_name", e.class_name},
          {"window", std::move(window)},
          {"triggered_at", format_rfc3339(e.triggered_at)},
          {"rule", alert_rule_to_json(e.rule)}};
}

nlohmann::json Service::to_json(const HealthStatus& h) const {
  return {{"status", h.ok ? "ok" : "degraded"},
          {"backend", h.backend},
          {"uptime_s", h.uptime_s}};
}

}  // namespace coop::service
