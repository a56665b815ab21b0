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

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "coop/image.hpp"
#include "coop/inference.hpp"
#include "coop/random.hpp"
#include "json.hpp"

namespace coop::infer {

namespace {

InferenceError bad_fixture(const std::string& what) {
  return InferenceError(InferenceError::Kind::kBadFixture, what);
}

}  // namespace

std::string derive_image_id(const FrameRequest& request) {
  if (request.image_id && !request.image_id->empty()) return *request.image_id;
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016" PRIx64,
                fnv1a64(request.image_bytes));
  return buf;
}

void ReplayStore::add(std::string image_id, std::vector<Detection> detections) {
  for (const auto& d : detections) {
    if (!d.box.valid()) throw bad_fixture("invalid box for " + image_id);
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0))
      throw bad_fixture("confidence out of [0, 1] for " + image_id);
    if (d.class_id < 0) throw bad_fixture("negative class_id for " + image_id);
  }
  auto [it, inserted] = records_.emplace(image_id, std::move(detections));
  if (!inserted) throw bad_fixture("duplicate image_id in fixture: " + image_id);
}

ReplayStore ReplayStore::parse(std::string_view jsonl) {
  ReplayStore store;
  std::istringstream lines{std::string(jsonl)};
  int line_no = 0;
  for (std::string line; std::getline(lines, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      std::vector<Detection> dets;
      for (const auto& d : j.at("detections")) {
        const auto& b = d.at("box");
        if (!b.is_array() || b.size() != 4) throw bad_fixture("box needs 4 values");
        dets.push_back({{b[0].get<double>(), b[1].get<double>(),
                         b[2].get<double>(), b[3].get<double>()},
                        d.at("class_id").get<int>(),
                        d.at("confidence").get<double>()});
      }
      store.add(j.at("image_id").get<std::string>(), std::move(dets));
    } catch (const nlohmann::json::exception& e) {
      throw bad_fixture("fixture line " + std::to_string(line_no) + ": " + e.what());
    } catch (const InferenceError& e) {
      throw bad_fixture("fixture line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return store;
}

ReplayStore ReplayStore::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw bad_fixture("cannot read fixture: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const std::vector<Detection>* ReplayStore::find(std::string_view image_id) const {
  const auto it = records_.find(image_id);
  return it == records_.end() ? nullptr : &it->second;
}

std::vector<std::string> ReplayStore::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, dets] : records_) out.push_back(id);
  return out;
}

std::string ReplayStore::to_jsonl() const {
  std::string out;
  for (const auto& [id, dets] : records_) {
    nlohmann::json j;
    j["image_id"] = id;
    auto& arr = j["detections"] = nlohmann::json::array();
    for (const auto& d : dets) {
      arr.push_back({{"class_id", d.class_id},
                     {"confidence", d.confidence},
                     {"box", {d.box.x_min, d.box.y_min, d.box.x_max, d.box.y_max}}});
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

ReplayDetector::ReplayDetector(ReplayStore store, std::string tag)
    : store_(std::move(store)), tag_(std::move(tag)) {}

RawInference ReplayDetector::infer(const FrameRequest& request) const {
  if (!request.image_bytes.empty() && !probe_image(request.image_bytes))
    throw InferenceError(InferenceError::Kind::kBadImage, "bad image");
  const std::string id = derive_image_id(request);
  const auto* dets = store_.find(id);
  if (!dets)
    throw InferenceError(InferenceError::Kind::kNoFixture,
                         "no fixture for image: " + id);
  return {id, *dets, tag_};
}

}  // namespace coop::infer
