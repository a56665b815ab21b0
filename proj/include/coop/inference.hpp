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

// Detector backends and detection post-processing.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "coop/geometry.hpp"

namespace coop::infer {

class InferenceError : public std::runtime_error {
 public:
  enum class Kind { kBadImage, kNoFixture, kUnavailable, kBadFixture };

  InferenceError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct PostprocessConfig {
  double conf_threshold = 0.25;
  double nms_iou_threshold = 0.45;
  std::size_t max_detections = 300;

  // Throws std::invalid_argument.
  void validate() const;
};

// Candidates straight out of a backend, before post-processing.
struct RawInference {
  std::string image_id;
  std::vector<Detection> candidates;
  std::string model_tag;
};

struct FrameRequest {
  std::span<const std::uint8_t> image_bytes;  // may be empty for replay
  std::optional<std::string> image_id;
};

// The caller-supplied id, or "fnv1a64:<hex>" of the image bytes.
std::string derive_image_id(const FrameRequest& request);

// A detector backend. Implementations must allow concurrent infer() calls.
//
// A neural backend receives 8-bit RGB frames letterboxed to 640x640 (see
// coop/augment.hpp) and returns candidates in original-frame pixels.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual RawInference infer(const FrameRequest& request) const = 0;
  virtual std::string model_tag() const = 0;
  virtual bool ready() const { return true; }
};

// Pre-recorded candidates keyed by image id. Immutable once loaded.
class ReplayStore {
 public:
  ReplayStore() = default;

  // JSON Lines: {"image_id": str, "detections": [{"class_id": int,
  // "confidence": float, "box": [x0, y0, x1, y1]}]}. Throws InferenceError
  // (kBadFixture) on malformed records or duplicate ids.
  static ReplayStore parse(std::string_view jsonl);
  static ReplayStore load(const std::filesystem::path& path);

  // Throws InferenceError (kBadFixture) for a duplicate id or invalid record.
  void add(std::string image_id, std::vector<Detection> detections);

  const std::vector<Detection>* find(std::string_view image_id) const;
  std::vector<std::string> ids() const;
  std::size_t size() const noexcept { return records_.size(); }
  std::string to_jsonl() const;

 private:
  std::map<std::string, std::vector<Detection>, std::less<>> records_;
};

class ReplayDetector final : public Detector {
 public:
  explicit ReplayDetector(ReplayStore store, std::string tag = "replay");

  // Rejects undecodable bytes (kBadImage) and unknown ids (kNoFixture).
  RawInference infer(const FrameRequest& request) const override;
  std::string model_tag() const override { return tag_; }

  const ReplayStore& store() const noexcept { return store_; }

 private:
  ReplayStore store_;
  std::string tag_;
};

// Confidence filter, per-class NMS, then the top max_detections by
// confidence. Output is sorted by confidence, descending.
std::vector<Detection> postprocess(const RawInference& raw,
                                   const PostprocessConfig& config);

}  // namespace coop::infer
