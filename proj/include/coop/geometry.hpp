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

#pragma once

#include <span>
#include <vector>

namespace coop {

// Pixel-space box, origin top-left. Coordinates are continuous: a box
// covering pixels [0, 10) has x_min = 0, x_max = 10.
struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const noexcept { return x_max - x_min; }
  double height() const noexcept { return y_max - y_min; }
  double area() const noexcept { return width() * height(); }
  // Ordered corners and finite coordinates.
  bool valid() const noexcept;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// YOLO label convention: center and size normalized by the image size.
struct NormalizedBox {
  int class_id = 0;
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  // 0 <= cx, cy <= 1, 0 < w, h <= 1, class_id >= 0.
  bool valid() const noexcept;

  friend bool operator==(const NormalizedBox&, const NormalizedBox&) = default;
};

struct ImageSize {
  int width = 0;
  int height = 0;

  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

struct Detection {
  BoundingBox box;
  int class_id = 0;
  double confidence = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

// Intersection over union. Two boxes with zero union (both degenerate)
// yield 0 rather than NaN.
double iou(const BoundingBox& a, const BoundingBox& b) noexcept;

// Converts a normalized box to pixels, clipped to the image. Throws
// std::invalid_argument for non-positive image dimensions.
BoundingBox norm_to_pixel(const NormalizedBox& n, ImageSize image);

// Inverse of norm_to_pixel for boxes inside the image.
NormalizedBox pixel_to_norm(const BoundingBox& b, ImageSize image,
                            int class_id = 0);

// Per-class greedy non-maximum suppression.
//
// Detections are ranked by confidence descending, ties broken by smaller
// class_id and then input position. A detection is kept iff its IoU with
// every previously kept detection of the same class is below
// `iou_threshold`. The result is in rank order.
std::vector<Detection> nms(std::span<const Detection> dets,
                           double iou_threshold);

// Rank order used by nms(): indices into `dets`, best first.
std::vector<std::size_t> confidence_order(std::span<const Detection> dets);

}  // namespace coop
