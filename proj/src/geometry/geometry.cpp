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

#include "coop/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "coop/kernels.hpp"

namespace coop {

bool BoundingBox::valid() const noexcept {
  return std::isfinite(x_min) && std::isfinite(y_min) &&
         std::isfinite(x_max) && std::isfinite(y_max) && x_min <= x_max &&
         y_min <= y_max;
}

bool NormalizedBox::valid() const noexcept {
  return class_id >= 0 && cx >= 0.0 && cx <= 1.0 && cy >= 0.0 && cy <= 1.0 &&
         w > 0.0 && w <= 1.0 && h > 0.0 && h <= 1.0;
}

double iou(const BoundingBox& a, const BoundingBox& b) noexcept {
  const double xs[] = {b.x_min}, ys[] = {b.y_min}, xe[] = {b.x_max},
               ye[] = {b.y_max};
  double out = 0.0;
  kernels::iou_one_to_many_ref(a, {xs, ys, xe, ye}, {&out, 1});
  return out;
}

namespace {

void require_image(ImageSize image) {
  if (image.width <= 0 || image.height <= 0)
    throw std::invalid_argument("image dimensions must be positive");
}

}  // namespace

BoundingBox norm_to_pixel(const NormalizedBox& n, ImageSize image) {
  require_image(image);
  const double w = image.width, h = image.height;
  BoundingBox b{(n.cx - n.w / 2) * w, (n.cy - n.h / 2) * h,
                (n.cx + n.w / 2) * w, (n.cy + n.h / 2) * h};
  b.x_min = std::clamp(b.x_min, 0.0, w);
  b.x_max = std::clamp(b.x_max, 0.0, w);
  b.y_min = std::clamp(b.y_min, 0.0, h);
  b.y_max = std::clamp(b.y_max, 0.0, h);
  return b;
}

NormalizedBox pixel_to_norm(const BoundingBox& b, ImageSize image,
                            int class_id) {
  require_image(image);
  const double w = image.width, h = image.height;
  return {class_id, (b.x_min + b.x_max) / 2 / w, (b.y_min + b.y_max) / 2 / h,
          b.width() / w, b.height() / h};
}

std::vector<std::size_t> confidence_order(std::span<const Detection> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) {
                     if (dets[i].confidence != dets[j].confidence)
                       return dets[i].confidence > dets[j].confidence;
                     return dets[i].class_id < dets[j].class_id;
                   });
  return order;
}

std::vector<Detection> nms(std::span<const Detection> dets,
                           double iou_threshold) {
  if (!(iou_threshold >= 0.0 && iou_threshold <= 1.0))
    throw std::invalid_argument("nms iou_threshold must be in [0, 1]");
  const auto order = confidence_order(dets);

  // Ranked positions, grouped per class.
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t rank = 0; rank < order.size(); ++rank)
    by_class[dets[order[rank]].class_id].push_back(rank);

  std::vector<char> kept(order.size(), 0);
  std::vector<double> overlap;
  for (const auto& [cls, ranks] : by_class) {
    kernels::BoxTable table;
    for (std::size_t r : ranks) table.push_back(dets[order[r]].box);
    const auto cols = table.columns();
    std::vector<char> suppressed(ranks.size(), 0);
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      if (suppressed[i]) continue;
      kept[ranks[i]] = 1;
      const std::size_t rest = ranks.size() - i - 1;
      if (rest == 0) break;
      overlap.resize(rest);
      kernels::iou_one_to_many(dets[order[ranks[i]]].box, cols.subspan(i + 1),
                               overlap);
      for (std::size_t j = 0; j < rest; ++j)
        if (overlap[j] >= iou_threshold) suppressed[i + 1 + j] = 1;
    }
  }

  std::vector<Detection> out;
  for (std::size_t rank = 0; rank < order.size(); ++rank)
    if (kept[rank]) out.push_back(dets[order[rank]]);
  return out;
}

}  // namespace coop
