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

// Scalar reference kernels. These define the results every vector variant
// must reproduce bit for bit, so the operation order here is normative.

#include <cassert>

#include "coop/kernels.hpp"

namespace coop::kernels {

namespace {

// Same selection rule as the x86 min/max instructions: on equality or NaN
// the second operand wins.
inline double lane_min(double a, double b) { return a < b ? a : b; }
inline double lane_max(double a, double b) { return a > b ? a : b; }

}  // namespace

void iou_one_to_many_ref(const BoundingBox& a, BoxColumns boxes,
                         std::span<double> out) {
  assert(out.size() == boxes.size());
  const double area_a = (a.x_max - a.x_min) * (a.y_max - a.y_min);
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    double iw = lane_min(a.x_max, boxes.x_max[i]) -
                lane_max(a.x_min, boxes.x_min[i]);
    double ih = lane_min(a.y_max, boxes.y_max[i]) -
                lane_max(a.y_min, boxes.y_min[i]);
    iw = iw > 0.0 ? iw : 0.0;
    ih = ih > 0.0 ? ih : 0.0;
    const double inter = iw * ih;
    const double area_b =
        (boxes.x_max[i] - boxes.x_min[i]) * (boxes.y_max[i] - boxes.y_min[i]);
    const double uni = (area_a + area_b) - inter;
    double r = uni > 0.0 ? inter / uni : 0.0;
    out[i] = r < 1.0 ? r : 1.0;
  }
}

void threshold_counts_ref(std::span<const double> scores,
                          std::span<const std::uint8_t> positive,
                          std::span<const double> thresholds,
                          std::span<std::uint64_t> above,
                          std::span<std::uint64_t> positive_above) {
  assert(scores.size() == positive.size());
  assert(above.size() == thresholds.size());
  assert(positive_above.size() == thresholds.size());
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    std::uint64_t n = 0;
    std::uint64_t p = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= thresholds[t]) {
        ++n;
        p += positive[i] != 0 ? 1 : 0;
      }
    }
    above[t] = n;
    positive_above[t] = p;
  }
}

}  // namespace coop::kernels
