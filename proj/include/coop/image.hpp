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

// 8-bit RGB image buffers and the codec boundary.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "coop/geometry.hpp"

namespace coop {

class ImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Interleaved RGB, row-major, no padding.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, fill) {}

  ImageSize size() const noexcept { return {width, height}; }
  std::uint8_t* pixel(int x, int y) noexcept {
    return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
  const std::uint8_t* pixel(int x, int y) const noexcept {
    return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
};

enum class ImageFormat { kPng, kJpeg };

struct ImageInfo {
  ImageFormat format;
  ImageSize size;
};

// Reads dimensions from a PNG or JPEG header without decoding pixels.
std::optional<ImageInfo> probe_image(std::span<const std::uint8_t> bytes);
std::optional<ImageInfo> probe_image_file(const std::filesystem::path& path);

// Full decode/encode. Throw ImageError.
Image decode_image(std::span<const std::uint8_t> bytes);
Image read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const Image& image);

}  // namespace coop
