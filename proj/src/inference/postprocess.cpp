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

#include <stdexcept>

#include "coop/inference.hpp"

namespace coop::infer {

void PostprocessConfig::validate() const {
  if (!(conf_threshold >= 0.0 && conf_threshold <= 1.0))
    throw std::invalid_argument("conf_threshold must be in [0, 1]");
  if (!(nms_iou_threshold >= 0.0 && nms_iou_threshold <= 1.0))
    throw std::invalid_argument("nms_iou_threshold must be in [0, 1]");
  if (max_detections < 1)
    throw std::invalid_argument("max_detections must be >= 1");
}

std::vector<Detection> postprocess(const RawInference& raw,
                                   const PostprocessConfig& config) {
  config.validate();
  std::vector<Detection> kept;
  kept.reserve(raw.candidates.size());
  for (const auto& d : raw.candidates)
    if (d.confidence >= config.conf_threshold) kept.push_back(d);
  auto out = nms(kept, config.nms_iou_threshold);
  if (out.size() > config.max_detections) out.resize(config.max_detections);
  return out;
}

}  // namespace coop::infer
