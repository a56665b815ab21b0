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

// Data-parallel inner loops shared by NMS, matching and the confidence sweep.
//
// Every kernel has a scalar reference implementation (`*_ref`) that is always
// built, plus vector variants compiled when the target supports them. The
// un-suffixed entry point dispatches on the instruction set detected at
// runtime. Vector variants must produce bit-identical results to the
// reference; the kernel tests check this.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "coop/geometry.hpp"

namespace coop::kernels {

enum class Isa {
  kScalar,
  kAvx2,
  kNeon,
};

const char* isa_name(Isa isa) noexcept;

// True if the variant was compiled in and the running CPU supports it.
bool isa_available(Isa isa) noexcept;

// Best available variant, unless overridden with force_isa() or the
// COOP_KERNELS environment variable ("scalar", "avx2", "neon").
Isa active_isa() noexcept;

// Pins dispatch to `isa`. Throws std::invalid_argument if unavailable.
void force_isa(Isa isa);

// Returns dispatch to automatic selection.
void reset_isa() noexcept;

// Structure-of-arrays view over a set of boxes.
struct BoxColumns {
  std::span<const double> x_min;
  std::span<const double> y_min;
  std::span<const double> x_max;
  std::span<const double> y_max;

  std::size_t size() const noexcept { return x_min.size(); }
  BoxColumns subspan(std::size_t offset) const noexcept {
    return {x_min.subspan(offset), y_min.subspan(offset),
            x_max.subspan(offset), y_max.subspan(offset)};
  }
};

// Owning storage for BoxColumns.
class BoxTable {
 public:
  BoxTable() = default;
  explicit BoxTable(std::span<const BoundingBox> boxes);

  void push_back(const BoundingBox& b);
  std::size_t size() const noexcept { return x_min_.size(); }
  BoxColumns columns() const noexcept {
    return {x_min_, y_min_, x_max_, y_max_};
  }

 private:
  std::vector<double> x_min_, y_min_, x_max_, y_max_;
};

// out[i] = iou(a, boxes[i]). `out` must have boxes.size() elements.
void iou_one_to_many(const BoundingBox& a, BoxColumns boxes,
                     std::span<double> out);
void iou_one_to_many_ref(const BoundingBox& a, BoxColumns boxes,
                         std::span<double> out);
#if defined(COOP_HAVE_AVX2)
void iou_one_to_many_avx2(const BoundingBox& a, BoxColumns boxes,
                          std::span<double> out);
#endif
#if defined(COOP_HAVE_NEON)
void iou_one_to_many_neon(const BoundingBox& a, BoxColumns boxes,
                          std::span<double> out);
#endif

// For each threshold t: above[t] = #{i : scores[i] >= t} and
// positive_above[t] = #{i : scores[i] >= t and positive[i] != 0}.
// NaN scores never count.
void threshold_counts(std::span<const double> scores,
                      std::span<const std::uint8_t> positive,
                      std::span<const double> thresholds,
                      std::span<std::uint64_t> above,
                      std::span<std::uint64_t> positive_above);
void threshold_counts_ref(std::span<const double> scores,
                          std::span<const std::uint8_t> positive,
                          std::span<const double> thresholds,
                          std::span<std::uint64_t> above,
                          std::span<std::uint64_t> positive_above);
#if defined(COOP_HAVE_AVX2)
void threshold_counts_avx2(std::span<const double> scores,
                           std::span<const std::uint8_t> positive,
                           std::span<const double> thresholds,
                           std::span<std::uint64_t> above,
                           std::span<std::uint64_t> positive_above);
#endif
#if defined(COOP_HAVE_NEON)
void threshold_counts_neon(std::span<const double> scores,
                           std::span<const std::uint8_t> positive,
                           std::span<const double> thresholds,
                           std::span<std::uint64_t> above,
                           std::span<std::uint64_t> positive_above);
#endif

}  // namespace coop::kernels
