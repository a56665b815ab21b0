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

#include <immintrin.h>

#include <bit>
#include <cassert>

#include "coop/kernels.hpp"

namespace coop::kernels {

namespace {

inline unsigned positive_nibble(const std::uint8_t* p) {
  return (p[0] != 0 ? 1u : 0u) | (p[1] != 0 ? 2u : 0u) |
         (p[2] != 0 ? 4u : 0u) | (p[3] != 0 ? 8u : 0u);
}

}  // namespace

void iou_one_to_many_avx2(const BoundingBox& a, BoxColumns boxes,
                          std::span<double> out) {
  assert(out.size() == boxes.size());
  const std::size_t n = boxes.size();
  const double area_a_s = (a.x_max - a.x_min) * (a.y_max - a.y_min);

  const __m256d ax0 = _mm256_set1_pd(a.x_min);
  const __m256d ay0 = _mm256_set1_pd(a.y_min);
  const __m256d ax1 = _mm256_set1_pd(a.x_max);
  const __m256d ay1 = _mm256_set1_pd(a.y_max);
  const __m256d area_a = _mm256_set1_pd(area_a_s);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d bx0 = _mm256_loadu_pd(boxes.x_min.data() + i);
    const __m256d by0 = _mm256_loadu_pd(boxes.y_min.data() + i);
    const __m256d bx1 = _mm256_loadu_pd(boxes.x_max.data() + i);
    const __m256d by1 = _mm256_loadu_pd(boxes.y_max.data() + i);

    __m256d iw = _mm256_sub_pd(_mm256_min_pd(ax1, bx1), _mm256_max_pd(ax0, bx0));
    __m256d ih = _mm256_sub_pd(_mm256_min_pd(ay1, by1), _mm256_max_pd(ay0, by0));
    // max_pd returns the second operand on equality, so -0.0 becomes +0.0
    // exactly like the reference's `iw > 0 ? iw : 0`.
    iw = _mm256_max_pd(iw, zero);
    ih = _mm256_max_pd(ih, zero);
    const __m256d inter = _mm256_mul_pd(iw, ih);
    const __m256d area_b =
        _mm256_mul_pd(_mm256_sub_pd(bx1, bx0), _mm256_sub_pd(by1, by0));
    const __m256d uni = _mm256_sub_pd(_mm256_add_pd(area_a, area_b), inter);
    const __m256d positive = _mm256_cmp_pd(uni, zero, _CMP_GT_OQ);
    __m256d r = _mm256_and_pd(_mm256_div_pd(inter, uni), positive);
    r = _mm256_min_pd(r, one);
    _mm256_storeu_pd(out.data() + i, r);
  }
  if (i < n) iou_one_to_many_ref(a, boxes.subspan(i), out.subspan(i));
}

void threshold_counts_avx2(std::span<const double> scores,
                           std::span<const std::uint8_t> positive,
                           std::span<const double> thresholds,
                           std::span<std::uint64_t> above,
                           std::span<std::uint64_t> positive_above) {
  assert(scores.size() == positive.size());
  const std::size_t n = scores.size();
  const std::size_t blocks = n / 4;

  std::vector<unsigned> nibbles(blocks);
  for (std::size_t b = 0; b < blocks; ++b)
    nibbles[b] = positive_nibble(positive.data() + 4 * b);

  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    const __m256d thr = _mm256_set1_pd(thresholds[t]);
    std::uint64_t count = 0;
    std::uint64_t pos = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
      const __m256d s = _mm256_loadu_pd(scores.data() + 4 * b);
      const unsigned m =
          static_cast<unsigned>(_mm256_movemask_pd(_mm256_cmp_pd(s, thr, _CMP_GE_OQ)));
      count += static_cast<unsigned>(std::popcount(m));
      pos += static_cast<unsigned>(std::popcount(m & nibbles[b]));
    }
    for (std::size_t i = 4 * blocks; i < n; ++i) {
      if (scores[i] >= thresholds[t]) {
        ++count;
        pos += positive[i] != 0 ? 1 : 0;
      }
    }
    above[t] = count;
    positive_above[t] = pos;
  }
}

}  // namespace coop::kernels
