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

#include <fstream>
#include <sstream>

#include "coop/evaluation.hpp"
#include "json.hpp"

namespace coop::eval {

namespace {

BoundingBox box_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4)
    throw EvaluationError("box must be [x_min, y_min, x_max, y_max]");
  BoundingBox b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                j[3].get<double>()};
  if (!b.valid()) throw EvaluationError("invalid box");
  return b;
}

}  // namespace

std::vector<ScoredDetection> parse_detections_jsonl(std::string_view text) {
  std::vector<ScoredDetection> out;
  std::istringstream lines{std::string(text)};
  int line_no = 0;
  for (std::string line; std::getline(lines, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ScoredDetection d;
      d.image_id = j.at("image_id").get<std::string>();
      d.detection.class_id = j.at("class_id").get<int>();
      d.detection.confidence = j.at("confidence").get<double>();
      d.detection.box = box_from_json(j.at("box"));
      if (!(d.detection.confidence >= 0.0 && d.detection.confidence <= 1.0))
        throw EvaluationError("confidence out of [0, 1]");
      out.push_back(std::move(d));
    } catch (const nlohmann::json::exception& e) {
      throw EvaluationError("detections line " + std::to_string(line_no) +
                            ": " + e.what());
    } catch (const EvaluationError& e) {
      throw EvaluationError("detections line " + std::to_string(line_no) +
                            ": " + e.what());
    }
  }
  return out;
}

std::vector<ScoredDetection> load_detections(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EvaluationError("cannot read detections file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_detections_jsonl(ss.str());
}

std::vector<GroundTruth> ground_truth_from_corpus(
    std::span<const LabeledImage> corpus) {
  std::vector<GroundTruth> out;
  for (const auto& img : corpus)
    for (const auto& a : img.annotations)
      out.push_back({img.image_id, a.class_id, norm_to_pixel(a, img.size)});
  return out;
}

}  // namespace coop::eval
