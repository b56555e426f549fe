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

#include "algaeval/image.h"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <string>

#include "algaeval/errors.h"
#include "algaeval/file_util.h"

namespace algaeval {

Hsv RgbToHsv(double r, double g, double b) {
  const double max = std::max({r, g, b});
  const double min = std::min({r, g, b});
  const double c = max - min;
  Hsv out;
  out.v = max;
  out.s = max > 0.0 ? c / max : 0.0;
  if (c > 0.0) {
    double h;
    if (max == r) {
      h = std::fmod((g - b) / c, 6.0);
    } else if (max == g) {
      h = (b - r) / c + 2.0;
    } else {
      h = (r - g) / c + 4.0;
    }
    h *= 60.0;
    if (h < 0.0) h += 360.0;
    if (h >= 360.0) h -= 360.0;
    out.h = h;
  }
  return out;
}

std::array<double, 3> HsvToRgb(const Hsv& hsv) {
  const double c = hsv.v * hsv.s;
  double hp = std::fmod(hsv.h, 360.0);
  if (hp < 0.0) hp += 360.0;
  hp /= 60.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp)) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  const double m = hsv.v - c;
  return {r + m, g + m, b + m};
}

namespace {

bool HasPrefix(const std::string& bytes, std::string_view magic) {
  return bytes.size() >= magic.size() &&
         std::memcmp(bytes.data(), magic.data(), magic.size()) == 0;
}

class PpmHeaderReader {
 public:
  PpmHeaderReader(const std::string& bytes, const std::string& name)
      : bytes_(bytes), name_(name) {}

  int NextInt() {
    SkipSpaceAndComments();
    if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      throw ParseError(name_ + ": malformed PPM header");
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > (1 << 24)) throw ParseError(name_ + ": PPM dimension too large");
    }
    return static_cast<int>(value);
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t RasterStart() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw ParseError(name_ + ": malformed PPM header");
    }
    return pos_ + 1;
  }

  void Skip(std::size_t n) { pos_ += n; }

 private:
  void SkipSpaceAndComments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  const std::string& name_;
  std::size_t pos_ = 0;
};

Image DecodePpm(const std::string& bytes, const std::string& name) {
  if (!HasPrefix(bytes, "P6")) {
    throw UnsupportedImage(name + ": not a binary PPM (P6)");
  }
  PpmHeaderReader reader(bytes, name);
  reader.Skip(2);
  const int width = reader.NextInt();
  const int height = reader.NextInt();
  const int maxval = reader.NextInt();
  if (width < 1 || height < 1) throw ParseError(name + ": empty PPM");
  if (maxval != 255) {
    throw UnsupportedImage(name + ": only 8-bit PPM (maxval 255) is supported");
  }
  const std::size_t start = reader.RasterStart();
  Image image(width, height, 3);
  if (bytes.size() - start < image.data.size()) {
    throw ParseError(name + ": truncated PPM raster");
  }
  std::memcpy(image.data.data(), bytes.data() + start, image.data.size());
  return image;
}

Image DecodePng(const std::string& bytes, const std::string& name) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
    throw ParseError(name + ": " + png.message);
  }
  png.format = PNG_FORMAT_RGB;
  Image image(static_cast<int>(png.width), static_cast<int>(png.height), 3);
  if (!png_image_finish_read(&png, nullptr, image.data.data(), 0, nullptr)) {
    const std::string message = png.message;
    png_image_free(&png);
    throw ParseError(name + ": " + message);
  }
  return image;
}

void RequireRgb(const Image& image) {
  if (image.channels != 3) {
    throw UnsupportedImage("expected 3 channels, got " +
                           std::to_string(image.channels));
  }
}

}  // namespace

Image ReadPpm(const std::filesystem::path& path) {
  return DecodePpm(ReadFileToString(path), path.string());
}

void WritePpm(const Image& image, const std::filesystem::path& path) {
  RequireRgb(image);
  std::string bytes = "P6\n" + std::to_string(image.width) + " " +
                      std::to_string(image.height) + "\n255\n";
  bytes.append(reinterpret_cast<const char*>(image.data.data()), image.data.size());
  WriteFileAtomic(path, bytes);
}

Image ReadPng(const std::filesystem::path& path) {
  return DecodePng(ReadFileToString(path), path.string());
}

void WritePng(const Image& image, const std::filesystem::path& path) {
  RequireRgb(image);
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png, nullptr, &size, 0, image.data.data(), 0,
                                 nullptr)) {
    throw std::runtime_error(std::string("png encode: ") + png.message);
  }
  std::string bytes(size, '\0');
  if (!png_image_write_to_memory(&png, bytes.data(), &size, 0,
                                 image.data.data(), 0, nullptr)) {
    throw std::runtime_error(std::string("png encode: ") + png.message);
  }
  bytes.resize(size);
  WriteFileAtomic(path, bytes);
}

Image ReadImage(const std::filesystem::path& path) {
  const std::string bytes = ReadFileToString(path);
  if (HasPrefix(bytes, "\x89PNG")) return DecodePng(bytes, path.string());
  if (HasPrefix(bytes, "P6")) return DecodePpm(bytes, path.string());
  throw UnsupportedImage(path.string() + ": unrecognized image format");
}

void WriteImage(const Image& image, const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") {
    WritePng(image, path);
  } else {
    WritePpm(image, path);
  }
}

}  // namespace algaeval
