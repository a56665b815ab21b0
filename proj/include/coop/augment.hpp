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

// Box-aware image augmentation: horizontal flip, letterbox, random crop.

#pragma once

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "coop/dataset.hpp"
#include "coop/image.hpp"

namespace coop {

struct HorizontalFlip {};

struct Letterbox {
  int target_w = 640;
  int target_h = 640;
  std::uint8_t pad_value = 114;
};

struct RandomCrop {
  double min_scale = 0.5;  // crop area as a fraction of the image area
  double max_scale = 1.0;
  double min_box_visibility = 0.3;
};

using Transform = std::variant<HorizontalFlip, Letterbox, RandomCrop>;

struct AugmentationSpec {
  std::vector<Transform> transforms;
  std::uint64_t rng_seed = 0;

  // Throws DatasetError on out-of-range parameters.
  void validate() const;
  // {"rng_seed": n, "transforms": [{"type": "horizontal_flip"},
  //  {"type": "letterbox", "target_w": 640, "target_h": 640, "pad_value": 114},
  //  {"type": "random_crop", "min_scale": .5, "max_scale": 1,
  //   "min_box_visibility": .3}]}
  static AugmentationSpec from_json(std::string_view text);
};

struct AugmentedImage {
  Image pixels;
  LabeledImage labels;
};

// Applies the transforms in order. Randomness comes from a generator seeded
// with spec.rng_seed mixed with the image id, so each image is reproducible
// on its own. Boxes that fall out of range are dropped, never emitted.
AugmentedImage apply_augmentations(const LabeledImage& image,
                                   const Image& pixels,
                                   const AugmentationSpec& spec);

namespace augment {

Image flip_pixels(const Image& src);
// Bilinear resize.
Image resize(const Image& src, int width, int height);

}  // namespace augment

}  // namespace coop
