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

// Test-only helpers: scratch directories, fixture paths and reference
// implementations that the library is checked against. The references are
// written from the definitions, without sharing code with src/.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "coop/geometry.hpp"
#include "json.hpp"

namespace coop::testing {

std::filesystem::path fixture_dir();
std::filesystem::path schema_dir();

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& text);

// --- geometry ---------------------------------------------------------------

double ref_iou(const BoundingBox& a, const BoundingBox& b);

// IoU by counting cells of an n x n grid over the union's bounding square.
double raster_iou(const BoundingBox& a, const BoundingBox& b, int n);

// Quadratic NMS straight from the definition: walk candidates best first and
// keep one iff no kept same-class box overlaps it at or above the threshold.
std::vector<Detection> ref_nms(const std::vector<Detection>& dets,
                               double threshold);

BoundingBox random_box(std::mt19937_64& rng, double extent);

// --- average precision --------------------------------------------------------

// Exact area under the precision envelope for ranked TP flags.
double ref_ap_exact(const std::vector<bool>& flags, std::size_t n_gt);

// Same area as a sum of rectangles over every interval between consecutive
// recall breakpoints, evaluating the envelope at each interval's midpoint.
double ref_ap_rectangles(const std::vector<bool>& flags, std::size_t n_gt);

// 101-point interpolated AP by direct search.
double ref_ap_101(const std::vector<bool>& flags, std::size_t n_gt);

// --- alert windows ------------------------------------------------------------

struct SimEvent {
  int class_id = 0;
  std::uint64_t frame = 0;
  std::vector<std::uint64_t> window;  // qualifying frames in the window
};

// Replays a frame sequence through the N-of-M rule with no incremental
// state: each frame recounts its window from scratch.
std::vector<SimEvent> simulate_alerts(
    const std::vector<std::set<int>>& frames, std::size_t n, std::size_t m);

// --- JSON schema --------------------------------------------------------------

// Checks `doc` against the subset of JSON Schema used in schemas/: type,
// enum, const, required, properties, additionalProperties, items, minItems,
// maxItems, minimum, maximum, minLength, pattern, $ref to #/$defs. Returns
// the first violation, or nullopt.
std::optional<std::string> schema_violation(const nlohmann::json& schema,
                                            const nlohmann::json& doc);

nlohmann::json load_schema(const std::string& name);

}  // namespace coop::testing
