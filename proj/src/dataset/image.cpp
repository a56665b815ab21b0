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

#include "coop/image.hpp"

#include <fstream>
#include <iterator>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

namespace coop {

namespace {

std::uint32_t be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
         (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
}

std::uint16_t be16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

std::optional<ImageInfo> probe_png(std::span<const std::uint8_t> b) {
  static constexpr std::uint8_t kSig[8] = {0x89, 'P', 'N', 'G',
                                           0x0D, 0x0A, 0x1A, 0x0A};
  if (b.size() < 24 || !std::equal(kSig, kSig + 8, b.begin()))
    return std::nullopt;
  if (b[12] != 'I' || b[13] != 'H' || b[14] != 'D' || b[15] != 'R')
    return std::nullopt;
  const std::uint32_t w = be32(&b[16]), h = be32(&b[20]);
  if (w == 0 || h == 0 || w > INT32_MAX || h > INT32_MAX) return std::nullopt;
  return ImageInfo{ImageFormat::kPng,
                   {static_cast<int>(w), static_cast<int>(h)}};
}

bool is_sof(std::uint8_t m) {
  return m >= 0xC0 && m <= 0xCF && m != 0xC4 && m != 0xC8 && m != 0xCC;
}

std::optional<ImageInfo> probe_jpeg(std::span<const std::uint8_t> b) {
  if (b.size() < 4 || b[0] != 0xFF || b[1] != 0xD8) return std::nullopt;
  std::size_t i = 2;
  while (i + 1 < b.size()) {
    if (b[i] != 0xFF) return std::nullopt;
    std::uint8_t marker = b[i + 1];
    if (marker == 0xFF) {  // fill byte
      ++i;
      continue;
    }
    i += 2;
    if (marker == 0x01 || (marker >= 0xD0 && marker <= 0xD7)) continue;
    if (marker == 0xD9 || marker == 0xDA) return std::nullopt;
    if (i + 2 > b.size()) return std::nullopt;
    const std::uint16_t len = be16(&b[i]);
    if (len < 2) return std::nullopt;
    if (is_sof(marker)) {
      if (i + 7 > b.size()) return std::nullopt;
      const int h = be16(&b[i + 3]), w = be16(&b[i + 5]);
      if (w == 0 || h == 0) return std::nullopt;
      return ImageInfo{ImageFormat::kJpeg, {w, h}};
    }
    i += len;
  }
  return std::nullopt;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path,
                                     std::size_t limit = SIZE_MAX) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageError("cannot read image: " + path.string());
  std::vector<std::uint8_t> out;
  char buf[4096];
  while (out.size() < limit) {
    in.read(buf, sizeof buf);
    if (in.gcount() <= 0) break;
    out.insert(out.end(), buf, buf + in.gcount());
  }
  return out;
}

}  // namespace

std::optional<ImageInfo> probe_image(std::span<const std::uint8_t> bytes) {
  if (auto png = probe_png(bytes)) return png;
  return probe_jpeg(bytes);
}

std::optional<ImageInfo> probe_image_file(const std::filesystem::path& path) {
  // SOF markers can sit behind large EXIF blocks.
  return probe_image(read_bytes(path, 256 * 1024));
}

Image decode_image(std::span<const std::uint8_t> bytes) {
  if (!probe_image(bytes)) throw ImageError("bad image");
  const cv::Mat raw(1, static_cast<int>(bytes.size()), CV_8UC1,
                    const_cast<std::uint8_t*>(bytes.data()));
  cv::Mat bgr = cv::imdecode(raw, cv::IMREAD_COLOR);
  if (bgr.empty()) throw ImageError("bad image");
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  Image out(rgb.cols, rgb.rows);
  for (int y = 0; y < rgb.rows; ++y)
    std::copy_n(rgb.ptr<std::uint8_t>(y), rgb.cols * 3, out.pixel(0, y));
  return out;
}

Image read_image(const std::filesystem::path& path) {
  try {
    return decode_image(read_bytes(path));
  } catch (const ImageError&) {
    throw ImageError("bad image: " + path.string());
  }
}

void write_image(const std::filesystem::path& path, const Image& image) {
  cv::Mat rgb(image.height, image.width, CV_8UC3,
              const_cast<std::uint8_t*>(image.rgb.data()));
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  if (!cv::imwrite(path.string(), bgr))
    throw ImageError("cannot write image: " + path.string());
}

}  // namespace coop
