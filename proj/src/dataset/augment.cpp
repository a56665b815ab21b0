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

#include "coop/augment.hpp"

#include <algorithm>
#include <cmath>

#include "coop/random.hpp"
#include "json.hpp"

namespace coop {

namespace augment {

Image flip_pixels(const Image& src) {
  Image out(src.width, src.height);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      std::copy_n(src.pixel(src.width - 1 - x, y), 3, out.pixel(x, y));
    }
  }
  return out;
}

Image resize(const Image& src, int width, int height) {
  Image out(width, height);
  const double sx = static_cast<double>(src.width) / width;
  const double sy = static_cast<double>(src.height) / height;
  for (int y = 0; y < height; ++y) {
    const double fy =
        std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(src.height - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, src.height - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx =
          std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(src.width - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, src.width - 1);
      const double wx = fx - x0;
      const auto* p00 = src.pixel(x0, y0);
      const auto* p01 = src.pixel(x1, y0);
      const auto* p10 = src.pixel(x0, y1);
      const auto* p11 = src.pixel(x1, y1);
      auto* dst = out.pixel(x, y);
      for (int c = 0; c < 3; ++c) {
        const double top = p00[c] + (p01[c] - p00[c]) * wx;
        const double bot = p10[c] + (p11[c] - p10[c]) * wx;
        dst[c] = static_cast<std::uint8_t>(
            std::clamp(std::lround(top + (bot - top) * wy), 0L, 255L));
      }
    }
  }
  return out;
}

}  // namespace augment

namespace {

struct State {
  Image pixels;
  LabeledImage labels;
};

void apply(State& s, const HorizontalFlip&, Rng&) {
  s.pixels = augment::flip_pixels(s.pixels);
  for (auto& b : s.labels.annotations) b.cx = 1.0 - b.cx;
}

void apply(State& s, const Letterbox& lb, Rng&) {
  const int w = s.pixels.width, h = s.pixels.height;
  const double scale = std::min(static_cast<double>(lb.target_w) / w,
                                static_cast<double>(lb.target_h) / h);
  const int nw = std::clamp(static_cast<int>(std::lround(w * scale)), 1, lb.target_w);
  const int nh = std::clamp(static_cast<int>(std::lround(h * scale)), 1, lb.target_h);
  const int pad_left = (lb.target_w - nw) / 2;
  const int pad_top = (lb.target_h - nh) / 2;

  const Image content = augment::resize(s.pixels, nw, nh);
  Image out(lb.target_w, lb.target_h, lb.pad_value);
  for (int y = 0; y < nh; ++y)
    std::copy_n(content.pixel(0, y), nw * 3, out.pixel(pad_left, y + pad_top));
  s.pixels = std::move(out);

  const double tw = lb.target_w, th = lb.target_h;
  for (auto& b : s.labels.annotations) {
    b.cx = (b.cx * nw + pad_left) / tw;
    b.cy = (b.cy * nh + pad_top) / th;
    b.w = b.w * nw / tw;
    b.h = b.h * nh / th;
  }
  s.labels.size = {lb.target_w, lb.target_h};
}

void apply(State& s, const RandomCrop& rc, Rng& rng) {
  const int w = s.pixels.width, h = s.pixels.height;
  int cw = 0, ch = 0;
  for (int attempt = 0; attempt < 10; ++attempt) {
    const double side = std::sqrt(rng.uniform(rc.min_scale, rc.max_scale));
    cw = std::min(w, static_cast<int>(std::lround(w * side)));
    ch = std::min(h, static_cast<int>(std::lround(h * side)));
    if (cw > 0 && ch > 0) break;
    cw = ch = 0;
  }
  if (cw == 0) return;  // identity fallback
  const int x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(w - cw + 1)));
  const int y0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(h - ch + 1)));

  Image out(cw, ch);
  for (int y = 0; y < ch; ++y)
    std::copy_n(s.pixels.pixel(x0, y0 + y), cw * 3, out.pixel(0, y));
  s.pixels = std::move(out);

  const BoundingBox window{static_cast<double>(x0), static_cast<double>(y0),
                           static_cast<double>(x0 + cw),
                           static_cast<double>(y0 + ch)};
  std::vector<NormalizedBox> kept;
  for (const auto& n : s.labels.annotations) {
    const BoundingBox b = norm_to_pixel(n, {w, h});
    const double area = b.area();
    if (!(area > 0.0)) continue;
    const BoundingBox clipped{std::max(b.x_min, window.x_min),
                              std::max(b.y_min, window.y_min),
                              std::min(b.x_max, window.x_max),
                              std::min(b.y_max, window.y_max)};
    if (clipped.x_max <= clipped.x_min || clipped.y_max <= clipped.y_min)
      continue;
    if (clipped.area() / area < rc.min_box_visibility) continue;
    const BoundingBox local{clipped.x_min - x0, clipped.y_min - y0,
                            clipped.x_max - x0, clipped.y_max - y0};
    kept.push_back(pixel_to_norm(local, {cw, ch}, n.class_id));
  }
  s.labels.annotations = std::move(kept);
  s.labels.size = {cw, ch};
}

}  // namespace

void AugmentationSpec::validate() const {
  for (const auto& t : transforms) {
    if (const auto* lb = std::get_if<Letterbox>(&t)) {
      if (lb->target_w <= 0 || lb->target_h <= 0)
        throw DatasetError("letterbox target dimensions must be positive");
    } else if (const auto* rc = std::get_if<RandomCrop>(&t)) {
      if (!(rc->min_scale > 0.0 && rc->min_scale <= rc->max_scale &&
            rc->max_scale <= 1.0))
        throw DatasetError("random_crop needs 0 < min_scale <= max_scale <= 1");
      if (!(rc->min_box_visibility >= 0.0 && rc->min_box_visibility <= 1.0))
        throw DatasetError("random_crop min_box_visibility must be in [0,1]");
    }
  }
}

AugmentationSpec AugmentationSpec::from_json(std::string_view text) {
  AugmentationSpec spec;
  try {
    const auto j = nlohmann::json::parse(text);
    spec.rng_seed = j.value("rng_seed", std::uint64_t{0});
    for (const auto& t : j.at("transforms")) {
      const auto type = t.at("type").get<std::string>();
      if (type == "horizontal_flip") {
        spec.transforms.emplace_back(HorizontalFlip{});
      } else if (type == "letterbox") {
        Letterbox lb;
        lb.target_w = t.value("target_w", lb.target_w);
        lb.target_h = t.value("target_h", lb.target_h);
        const int pad = t.value("pad_value", static_cast<int>(lb.pad_value));
        if (pad < 0 || pad > 255)
          throw DatasetError("letterbox pad_value must be in [0,255]");
        lb.pad_value = static_cast<std::uint8_t>(pad);
        spec.transforms.emplace_back(lb);
      } else if (type == "random_crop") {
        RandomCrop rc;
        rc.min_scale = t.value("min_scale", rc.min_scale);
        rc.max_scale = t.value("max_scale", rc.max_scale);
        rc.min_box_visibility = t.value("min_box_visibility", rc.min_box_visibility);
        spec.transforms.emplace_back(rc);
      } else {
        throw DatasetError("unknown transform: " + type);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError(std::string("bad augmentation spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

AugmentedImage apply_augmentations(const LabeledImage& image,
                                   const Image& pixels,
                                   const AugmentationSpec& spec) {
  if (pixels.width != image.size.width || pixels.height != image.size.height)
    throw DatasetError("pixel buffer does not match image size for " +
                       image.image_id);
  spec.validate();
  Rng rng(spec.rng_seed ^ fnv1a64(image.image_id));
  State s{pixels, image};
  for (const auto& t : spec.transforms)
    std::visit([&](const auto& op) { apply(s, op, rng); }, t);

  std::erase_if(s.labels.annotations,
                [](const NormalizedBox& b) { return !b.valid(); });
  return {std::move(s.pixels), std::move(s.labels)};
}

}  // namespace coop
