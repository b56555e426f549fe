/* Copyright 2026 The algaeval Authors. All Rights Reserved.

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

#ifndef ALGAEVAL_IMAGE_H_
#define ALGAEVAL_IMAGE_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "algaeval/geometry.h"

namespace algaeval {

// Interleaved 8-bit image, row-major, `channels` bytes per pixel.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<std::uint8_t> data;

  Image() = default;
  Image(int w, int h, int c = 3, std::uint8_t fill = 0)
      : width(w), height(h), channels(c),
        data(static_cast<std::size_t>(w) * h * c, fill) {}

  ImageSize size() const { return {width, height}; }
  std::size_t Offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * width + x) * channels;
  }
  std::span<std::uint8_t> Pixel(int x, int y) {
    return {data.data() + Offset(x, y), static_cast<std::size_t>(channels)};
  }
  std::span<const std::uint8_t> Pixel(int x, int y) const {
    return {data.data() + Offset(x, y), static_cast<std::size_t>(channels)};
  }

  friend bool operator==(const Image&, const Image&) = default;
};

using Rgb = std::array<std::uint8_t, 3>;

// Hexcone HSV: hue in degrees [0, 360), saturation and value in [0, 1].
struct Hsv {
  double h = 0.0;
  double s = 0.0;
  double v = 0.0;
};

// r, g, b in [0, 1].
//   v = max, c = max - min, s = c / max (0 when max == 0),
//   h = 60 * ((g - b) / c mod 6) when max == r,
//       60 * ((b - r) / c + 2)   when max == g,
//       60 * ((r - g) / c + 4)   otherwise; h = 0 when c == 0.
// Ties between channels resolve in r, g, b order.
Hsv RgbToHsv(double r, double g, double b);
// Inverse of RgbToHsv; outputs in [0, 1].
std::array<double, 3> HsvToRgb(const Hsv& hsv);

// Binary PPM (P6, maxval 255).
Image ReadPpm(const std::filesystem::path& path);
void WritePpm(const Image& image, const std::filesystem::path& path);

// 8-bit PNG; grayscale and palette inputs are expanded to RGB, alpha dropped.
Image ReadPng(const std::filesystem::path& path);
void WritePng(const Image& image, const std::filesystem::path& path);

// Dispatches on file signature, not extension.
Image ReadImage(const std::filesystem::path& path);
// Dispatches on extension: ".png" writes PNG, anything else PPM.
void WriteImage(const Image& image, const std::filesystem::path& path);

}  // namespace algaeval

#endif  // ALGAEVAL_IMAGE_H_
