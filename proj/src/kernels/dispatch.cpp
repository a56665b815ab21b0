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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

#include "coop/kernels.hpp"

namespace coop::kernels {

namespace {

constexpr int kAuto = -1;
std::atomic<int> g_forced{kAuto};

bool cpu_has_avx2() noexcept {
#if defined(COOP_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() noexcept {
  if (const char* env = std::getenv("COOP_KERNELS")) {
    const std::string_view v(env);
    if (v == "scalar") return Isa::kScalar;
    if (v == "avx2" && isa_available(Isa::kAvx2)) return Isa::kAvx2;
    if (v == "neon" && isa_available(Isa::kNeon)) return Isa::kNeon;
  }
  if (isa_available(Isa::kAvx2)) return Isa::kAvx2;
  if (isa_available(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

}  // namespace

const char* isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
      return cpu_has_avx2();
    case Isa::kNeon:
#if defined(COOP_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() noexcept {
  const int forced = g_forced.load(std::memory_order_relaxed);
  if (forced != kAuto) return static_cast<Isa>(forced);
  static const Isa detected = detect();
  return detected;
}

void force_isa(Isa isa) {
  if (!isa_available(isa))
    throw std::invalid_argument(std::string("kernel variant not available: ") +
                                isa_name(isa));
  g_forced.store(static_cast<int>(isa), std::memory_order_relaxed);
}

void reset_isa() noexcept { g_forced.store(kAuto, std::memory_order_relaxed); }

BoxTable::BoxTable(std::span<const BoundingBox> boxes) {
  x_min_.reserve(boxes.size());
  y_min_.reserve(boxes.size());
  x_max_.reserve(boxes.size());
  y_max_.reserve(boxes.size());
  for (const auto& b : boxes) push_back(b);
}

void BoxTable::push_back(const BoundingBox& b) {
  x_min_.push_back(b.x_min);
  y_min_.push_back(b.y_min);
  x_max_.push_back(b.x_max);
  y_max_.push_back(b.y_max);
}

void iou_one_to_many(const BoundingBox& a, BoxColumns boxes,
                     std::span<double> out) {
  switch (active_isa()) {
#if defined(COOP_HAVE_AVX2)
    case Isa::kAvx2:
      return iou_one_to_many_avx2(a, boxes, out);
#endif
#if defined(COOP_HAVE_NEON)
    case Isa::kNeon:
      return iou_one_to_many_neon(a, boxes, out);
#endif
    default:
      return iou_one_to_many_ref(a, boxes, out);
  }
}

void threshold_counts(std::span<const double> scores,
                      std::span<const std::uint8_t> positive,
                      std::span<const double> thresholds,
                      std::span<std::uint64_t> above,
                      std::span<std::uint64_t> positive_above) {
  switch (active_isa()) {
#if defined(COOP_HAVE_AVX2)
    case Isa::kAvx2:
      return threshold_counts_avx2(scores, positive, thresholds, above,
                                   positive_above);
#endif
#if defined(COOP_HAVE_NEON)
    case Isa::kNeon:
      return threshold_counts_neon(scores, positive, thresholds, above,
                                   positive_above);
#endif
    default:
      return threshold_counts_ref(scores, positive, thresholds, above,
                                  positive_above);
  }
}

}  // namespace coop::kernels
