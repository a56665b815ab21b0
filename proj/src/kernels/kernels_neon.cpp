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

#include <arm_neon.h>

#include <cassert>

#include "coop/kernels.hpp"

namespace coop::kernels {

void iou_one_to_many_neon(const BoundingBox& a, BoxColumns boxes,
                          std::span<double> out) {
  assert(out.size() == boxes.size());
  const std::size_t n = boxes.size();
  const float64x2_t ax0 = vdupq_n_f64(a.x_min);
  const float64x2_t ay0 = vdupq_n_f64(a.y_min);
  const float64x2_t ax1 = vdupq_n_f64(a.x_max);
  const float64x2_t ay1 = vdupq_n_f64(a.y_max);
  const float64x2_t area_a =
      vdupq_n_f64((a.x_max - a.x_min) * (a.y_max - a.y_min));
  const float64x2_t zero = vdupq_n_f64(0.0);
  const float64x2_t one = vdupq_n_f64(1.0);

  const auto lane_min = [](float64x2_t x, float64x2_t y) {
    return vbslq_f64(vcltq_f64(x, y), x, y);
  };
  const auto lane_max = [](float64x2_t x, float64x2_t y) {
    return vbslq_f64(vcgtq_f64(x, y), x, y);
  };

  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t bx0 = vld1q_f64(boxes.x_min.data() + i);
    const float64x2_t by0 = vld1q_f64(boxes.y_min.data() + i);
    const float64x2_t bx1 = vld1q_f64(boxes.x_max.data() + i);
    const float64x2_t by1 = vld1q_f64(boxes.y_max.data() + i);

    float64x2_t iw = vsubq_f64(lane_min(ax1, bx1), lane_max(ax0, bx0));
    float64x2_t ih = vsubq_f64(lane_min(ay1, by1), lane_max(ay0, by0));
    // Select instead of vmaxq so -0.0 maps to +0.0 like the reference.
    iw = vbslq_f64(vcgtq_f64(iw, zero), iw, zero);
    ih = vbslq_f64(vcgtq_f64(ih, zero), ih, zero);
    const float64x2_t inter = vmulq_f64(iw, ih);
    const float64x2_t area_b =
        vmulq_f64(vsubq_f64(bx1, bx0), vsubq_f64(by1, by0));
    const float64x2_t uni = vsubq_f64(vaddq_f64(area_a, area_b), inter);
    float64x2_t r =
        vbslq_f64(vcgtq_f64(uni, zero), vdivq_f64(inter, uni), zero);
    r = vbslq_f64(vcltq_f64(r, one), r, one);
    vst1q_f64(out.data() + i, r);
  }
  if (i < n) iou_one_to_many_ref(a, boxes.subspan(i), out.subspan(i));
}

void threshold_counts_neon(std::span<const double> scores,
                           std::span<const std::uint8_t> positive,
                           std::span<const double> thresholds,
                           std::span<std::uint64_t> above,
                           std::span<std::uint64_t> positive_above) {
  assert(scores.size() == positive.size());
  const std::size_t n = scores.size();
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    const float64x2_t thr = vdupq_n_f64(thresholds[t]);
    uint64x2_t count = vdupq_n_u64(0);
    uint64x2_t pos = vdupq_n_u64(0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
      const uint64x2_t ge = vcgeq_f64(vld1q_f64(scores.data() + i), thr);
      const uint64x2_t bit = vshrq_n_u64(ge, 63);
      const uint64_t flags[2] = {positive[i] != 0 ? 1u : 0u,
                                 positive[i + 1] != 0 ? 1u : 0u};
      count = vaddq_u64(count, bit);
      pos = vaddq_u64(pos, vandq_u64(bit, vld1q_u64(flags)));
    }
    std::uint64_t c = vgetq_lane_u64(count, 0) + vgetq_lane_u64(count, 1);
    std::uint64_t p = vgetq_lane_u64(pos, 0) + vgetq_lane_u64(pos, 1);
    for (; i < n; ++i) {
      if (scores[i] >= thresholds[t]) {
        ++c;
        p += positive[i] != 0 ? 1 : 0;
      }
    }
    above[t] = c;
    positive_above[t] = p;
  }
}

}  // namespace coop::kernels
