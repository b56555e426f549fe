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

#include "algaeval/overlay.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "algaeval/errors.h"

namespace algaeval {
namespace {

using Glyph = std::array<std::uint8_t, kGlyphHeight>;  // bit 4 is the leftmost column

const Glyph* FindGlyph(char c) {
  static const Glyph kDigits[10] = {
      {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}, {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E},
      {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}, {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E},
      {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}, {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E},
      {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}, {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08},
      {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}, {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C},
  };
  static const Glyph kLetters[26] = {
      {0x0E, 0x11, 0x11, 0x11, 0x1F, 0x11, 0x11}, {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E},
      {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}, {0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C},
      {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}, {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10},
      {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}, {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11},
      {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}, {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C},
      {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}, {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F},
      {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}, {0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11},
      {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}, {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10},
      {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}, {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11},
      {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}, {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04},
      {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}, {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04},
      {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}, {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11},
      {0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04}, {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F},
  };
  static const Glyph kSpace{};
  static const Glyph kDot{0, 0, 0, 0, 0, 0x0C, 0x0C};
  static const Glyph kColon{0, 0x0C, 0x0C, 0, 0x0C, 0x0C, 0};
  static const Glyph kDash{0, 0, 0, 0x1F, 0, 0, 0};
  static const Glyph kUnderscore{0, 0, 0, 0, 0, 0, 0x1F};
  static const Glyph kPercent{0x18, 0x19, 0x02, 0x04, 0x08, 0x13, 0x03};
  static const Glyph kSlash{0, 0x01, 0x02, 0x04, 0x08, 0x10, 0};
  static const Glyph kUnknown{0x1F, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1F};

  if (c >= '0' && c <= '9') return &kDigits[c - '0'];
  const int upper = std::toupper(static_cast<unsigned char>(c));
  if (upper >= 'A' && upper <= 'Z') return &kLetters[upper - 'A'];
  switch (c) {
    case ' ': return &kSpace;
    case '.': return &kDot;
    case ':': return &kColon;
    case '-': return &kDash;
    case '_': return &kUnderscore;
    case '%': return &kPercent;
    case '/': return &kSlash;
    default: return &kUnknown;
  }
}

void PutPixel(Image& image, int x, int y, const Rgb& color) {
  if (x < 0 || y < 0 || x >= image.width || y >= image.height) return;
  auto px = image.Pixel(x, y);
  px[0] = color[0];
  px[1] = color[1];
  px[2] = color[2];
}

void FillRect(Image& image, int x0, int y0, int x1, int y1, const Rgb& color) {
  for (int y = std::max(y0, 0); y <= std::min(y1, image.height - 1); ++y) {
    for (int x = std::max(x0, 0); x <= std::min(x1, image.width - 1); ++x) {
      PutPixel(image, x, y, color);
    }
  }
}

int TextWidth(std::string_view text) {
  return text.empty() ? 0 : static_cast<int>(text.size()) * (kGlyphWidth + 1) - 1;
}

}  // namespace

void DrawText(Image& image, int x, int y, std::string_view text, const Rgb& color) {
  for (const char c : text) {
    const Glyph& g = *FindGlyph(c);
    for (int row = 0; row < kGlyphHeight; ++row) {
      for (int col = 0; col < kGlyphWidth; ++col) {
        if (g[row] & (0x10 >> col)) PutPixel(image, x + col, y + row, color);
      }
    }
    x += kGlyphWidth + 1;
  }
}

void DrawRectangle(Image& image, const BoundingBox& box, const Rgb& color, int stroke) {
  if (box.IsDegenerate()) return;
  const int left = static_cast<int>(std::floor(box.x_min()));
  const int top = static_cast<int>(std::floor(box.y_min()));
  const int right = static_cast<int>(std::ceil(box.x_max())) - 1;
  const int bottom = static_cast<int>(std::ceil(box.y_max())) - 1;
  FillRect(image, left, top, right, std::min(top + stroke - 1, bottom), color);
  FillRect(image, left, std::max(bottom - stroke + 1, top), right, bottom, color);
  FillRect(image, left, top, std::min(left + stroke - 1, right), bottom, color);
  FillRect(image, std::max(right - stroke + 1, left), top, right, bottom, color);
}

std::string FormatLabel(const LabelMap& labels, int label_id, double score) {
  const std::string name = labels.Name(label_id).value_or(std::to_string(label_id));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", score);
  return name + " " + buf;
}

Image RenderOverlay(const Image& image, std::span<const ScoredBox> boxes,
                    const OverlaySpec& spec, const LabelMap& labels) {
  if (spec.stroke < 1) throw ValidationError("overlay stroke must be >= 1");
  if (image.channels != 3) throw UnsupportedImage("overlay: expected 3 channels");
  Image out = image;
  for (const auto& b : boxes) DrawRectangle(out, b.box, spec.color, spec.stroke);
  if (!spec.labels) return out;
  constexpr int kPad = 1;
  constexpr int kLabelHeight = kGlyphHeight + 2 * kPad;
  for (const auto& b : boxes) {
    if (b.degenerate) continue;
    const std::string text = FormatLabel(labels, b.label_id, b.score);
    const int left = static_cast<int>(std::floor(b.box.x_min()));
    const int top = static_cast<int>(std::floor(b.box.y_min()));
    // Above the box when there is room, otherwise just inside the stroke.
    const bool above = top >= kLabelHeight;
    const int x = above ? left : left + spec.stroke;
    const int y = above ? top - kLabelHeight : top + spec.stroke;
    FillRect(out, x, y, x + TextWidth(text) + 2 * kPad - 1, y + kLabelHeight - 1, spec.color);
    DrawText(out, x + kPad, y + kPad, text, spec.text_color);
  }
  return out;
}

}  // namespace algaeval
