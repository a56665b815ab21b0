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

#include <gtest/gtest.h>

#include <random>

#include "coop/augment.hpp"

namespace coop {
namespace {

LabeledImage one_box(int w, int h, NormalizedBox box) {
  return {"sample", {w, h}, {box}};
}

AugmentationSpec spec_of(std::vector<Transform> t, std::uint64_t seed = 1) {
  return {std::move(t), seed};
}

TEST(Flip, MirrorsCenter) {
  const auto in = one_box(100, 50, {2, 0.3, 0.4, 0.2, 0.1});
  const auto out = apply_augmentations(in, Image(100, 50), spec_of({HorizontalFlip{}}));
  ASSERT_EQ(out.labels.annotations.size(), 1u);
  const auto& b = out.labels.annotations[0];
  EXPECT_DOUBLE_EQ(b.cx, 0.7);
  EXPECT_EQ(b.cy, 0.4);
  EXPECT_EQ(b.w, 0.2);
  EXPECT_EQ(b.h, 0.1);
  EXPECT_EQ(b.class_id, 2);
}

TEST(Flip, MirrorsPixels) {
  Image img(3, 1);
  img.pixel(0, 0)[0] = 10;
  img.pixel(2, 0)[0] = 30;
  const auto out = augment::flip_pixels(img);
  EXPECT_EQ(out.pixel(0, 0)[0], 30);
  EXPECT_EQ(out.pixel(2, 0)[0], 10);
}

TEST(Flip, DoubleFlipIsIdentity) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  LabeledImage in{"x", {64, 48}, {}};
  for (int i = 0; i < 50; ++i) in.annotations.push_back({i % 4, u(rng), u(rng), 0.04, 0.05});
  Image px(64, 48);
  for (std::size_t i = 0; i < px.rgb.size(); ++i) px.rgb[i] = static_cast<std::uint8_t>(i);
  const auto out = apply_augmentations(in, px, spec_of({HorizontalFlip{}, HorizontalFlip{}}));
  ASSERT_EQ(out.labels.annotations.size(), in.annotations.size());
  for (std::size_t i = 0; i < in.annotations.size(); ++i)
    EXPECT_NEAR(out.labels.annotations[i].cx, in.annotations[i].cx, 1e-12);
  EXPECT_EQ(out.pixels.rgb, px.rgb);
}

TEST(Letterbox, WideImageGetsVerticalPadding) {
  const auto in = one_box(200, 100, {0, 0.5, 0.5, 1, 1});
  Image px(200, 100, 200);
  const auto out = apply_augmentations(in, px, spec_of({Letterbox{}}));
  EXPECT_EQ(out.pixels.width, 640);
  EXPECT_EQ(out.pixels.height, 640);
  EXPECT_EQ(out.labels.size, (ImageSize{640, 640}));
  ASSERT_EQ(out.labels.annotations.size(), 1u);
  const auto& b = out.labels.annotations[0];
  EXPECT_NEAR(b.cx, 0.5, 1e-12);
  EXPECT_NEAR(b.cy, 0.5, 1e-12);
  EXPECT_NEAR(b.w, 1.0, 1e-12);
  EXPECT_NEAR(b.h, 0.5, 1e-12);
  // Pads are 160 rows above and below the 640x320 content.
  EXPECT_EQ(out.pixels.pixel(320, 159)[0], 114);
  EXPECT_EQ(out.pixels.pixel(320, 160)[0], 200);
  EXPECT_EQ(out.pixels.pixel(320, 479)[0], 200);
  EXPECT_EQ(out.pixels.pixel(320, 480)[0], 114);
}

TEST(Letterbox, PreservesBoxAspectRatio) {
  const auto in = one_box(300, 170, {0, 0.4, 0.6, 0.2, 0.3});
  const auto out = apply_augmentations(in, Image(300, 170), spec_of({Letterbox{416, 416, 0}}));
  const auto& b = out.labels.annotations.at(0);
  const double before = (0.2 * 300) / (0.3 * 170);
  const double after = (b.w * 416) / (b.h * 416);
  EXPECT_NEAR(after, before, 1e-2);
}

TEST(RandomCrop, SameSeedSameOutput) {
  const auto in = one_box(120, 90, {1, 0.5, 0.5, 0.3, 0.3});
  const Image px(120, 90, 7);
  const auto spec = spec_of({RandomCrop{0.3, 0.9, 0.3}}, 5);
  const auto a = apply_augmentations(in, px, spec);
  const auto b = apply_augmentations(in, px, spec);
  EXPECT_EQ(a.pixels.rgb, b.pixels.rgb);
  EXPECT_EQ(a.labels.annotations, b.labels.annotations);
}

TEST(Augment, EmittedBoxesAreAlwaysValid) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int w = 20 + static_cast<int>(rng() % 200), h = 20 + static_cast<int>(rng() % 200);
    LabeledImage in{"img" + std::to_string(trial), {w, h}, {}};
    for (int i = 0; i < 6; ++i) {
      const double bw = 0.01 + 0.5 * u(rng), bh = 0.01 + 0.5 * u(rng);
      in.annotations.push_back({i % 4, bw / 2 + (1 - bw) * u(rng),
                                bh / 2 + (1 - bh) * u(rng), bw, bh});
    }
    std::vector<Transform> t;
    if (trial % 2) t.push_back(HorizontalFlip{});
    t.push_back(RandomCrop{0.1 + 0.4 * u(rng), 1.0, u(rng)});
    if (trial % 3 == 0) t.push_back(Letterbox{64, 48, 114});
    const auto out = apply_augmentations(in, Image(w, h), spec_of(t, trial));
    EXPECT_EQ(out.pixels.size(), out.labels.size);
    EXPECT_LE(out.labels.annotations.size(), in.annotations.size());
    for (const auto& b : out.labels.annotations) {
      EXPECT_TRUE(b.valid());
      EXPECT_GE(b.cx - b.w / 2, -1e-9);
      EXPECT_LE(b.cx + b.w / 2, 1 + 1e-9);
    }
  }
}

TEST(Augment, MismatchedBufferRejected) {
  EXPECT_THROW(apply_augmentations(one_box(10, 10, {0, 0.5, 0.5, 0.1, 0.1}),
                                   Image(9, 10), spec_of({})),
               DatasetError);
}

TEST(AugmentSpec, ParsesJson) {
  const auto s = AugmentationSpec::from_json(R"({"rng_seed": 9, "transforms": [
      {"type": "horizontal_flip"}, {"type": "letterbox", "target_w": 320, "target_h": 320},
      {"type": "random_crop", "min_scale": 0.4}]})");
  EXPECT_EQ(s.rng_seed, 9u);
  ASSERT_EQ(s.transforms.size(), 3u);
  EXPECT_EQ(std::get<Letterbox>(s.transforms[1]).target_w, 320);
  EXPECT_EQ(std::get<RandomCrop>(s.transforms[2]).min_scale, 0.4);
  EXPECT_THROW(AugmentationSpec::from_json(R"({"transforms": [{"type": "rotate"}]})"),
               DatasetError);
  EXPECT_THROW(AugmentationSpec::from_json(
                   R"({"transforms": [{"type": "random_crop", "min_scale": 0}]})"),
               DatasetError);
}

TEST(Resize, UniformImageStaysUniform) {
  const auto out = augment::resize(Image(7, 5, 77), 23, 11);
  EXPECT_EQ(out.width, 23);
  for (auto v : out.rgb) EXPECT_EQ(v, 77);
}

}  // namespace
}  // namespace coop
