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

#include <gtest/gtest.h>

#include "algaeval/errors.h"

namespace algaeval {
namespace {

constexpr auto kPx = CoordinateSpace::kPixel;
const Rgb kGreen{0, 255, 0};

bool IsColor(const Image& img, int x, int y, const Rgb& c) {
  const auto p = img.Pixel(x, y);
  return p[0] == c[0] && p[1] == c[1] && p[2] == c[2];
}

int CountColor(const Image& img, const Rgb& c) {
  int n = 0;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) n += IsColor(img, x, y, c);
  }
  return n;
}

TEST(DrawRectangleTest, StrokeIsDrawnInward) {
  Image img(20, 20, 3, 0);
  DrawRectangle(img, BoundingBox(5, 5, 15, 12, kPx), kGreen, 2);
  // 10x7 box with a 2 px ring: 70 - 6*3 interior pixels.
  EXPECT_EQ(CountColor(img, kGreen), 70 - 18);
  EXPECT_TRUE(IsColor(img, 5, 5, kGreen));
  EXPECT_TRUE(IsColor(img, 14, 11, kGreen));
  EXPECT_FALSE(IsColor(img, 15, 11, kGreen));
  EXPECT_FALSE(IsColor(img, 7, 7, kGreen));
}

TEST(DrawRectangleTest, ThickStrokeFillsSmallBox) {
  Image img(10, 10, 3, 0);
  DrawRectangle(img, BoundingBox(2, 2, 5, 5, kPx), kGreen, 4);
  EXPECT_EQ(CountColor(img, kGreen), 9);
}

TEST(DrawRectangleTest, DegenerateBoxDrawsNothing) {
  Image img(10, 10, 3, 0);
  DrawRectangle(img, BoundingBox(10, 10, 10, 10, kPx), kGreen, 2);
  EXPECT_EQ(CountColor(img, kGreen), 0);
}

TEST(TextTest, FormatLabel) {
  const LabelMap labels = DefaultLabelMap();
  EXPECT_EQ(FormatLabel(labels, 1, 0.8712), "algae 0.87");
  EXPECT_EQ(FormatLabel(labels, 9, 1.0), "9 1.00");
}

TEST(TextTest, GlyphsStayInsideTheirCell) {
  Image img(40, 10, 3, 0);
  DrawText(img, 1, 1, "A1%", {255, 255, 255});
  const int lit = CountColor(img, {255, 255, 255});
  EXPECT_GT(lit, 0);
  for (int x = 0; x < 40; ++x) EXPECT_FALSE(IsColor(img, x, 0, {255, 255, 255}));
  for (int x = 18; x < 40; ++x) EXPECT_FALSE(IsColor(img, x, 4, {255, 255, 255}));
  Image lower(40, 10, 3, 0);
  DrawText(lower, 1, 1, "a1%", {255, 255, 255});
  EXPECT_EQ(lower, img);
}

TEST(RenderOverlayTest, NoBoxesLeavesImageUnchanged) {
  const Image img(16, 16, 3, 77);
  EXPECT_EQ(RenderOverlay(img, {}, OverlaySpec{}, DefaultLabelMap()), img);
}

TEST(RenderOverlayTest, LabelSitsAboveBoxWhenThereIsRoom) {
  const Image img(100, 60, 3, 128);
  const std::vector<ScoredBox> boxes{{1, 0.9, BoundingBox(20, 30, 80, 55, kPx), false, false}};
  const Image out = RenderOverlay(img, boxes, OverlaySpec{}, DefaultLabelMap());
  // Label background band occupies rows 21-29 starting at column 20.
  EXPECT_TRUE(IsColor(out, 20, 21, kGreen));
  EXPECT_TRUE(IsColor(out, 20, 29, kGreen));
  EXPECT_FALSE(IsColor(out, 20, 20, kGreen));
}

TEST(RenderOverlayTest, LabelMovesInsideNearTopEdge) {
  const Image img(100, 60, 3, 128);
  const std::vector<ScoredBox> boxes{{1, 0.9, BoundingBox(0, 0, 90, 50, kPx), false, false}};
  OverlaySpec spec;
  const Image out = RenderOverlay(img, boxes, spec, DefaultLabelMap());
  // Ring stays intact and the label band starts inside it.
  for (int x = 0; x < 90; ++x) EXPECT_TRUE(IsColor(out, x, 0, kGreen));
  EXPECT_TRUE(IsColor(out, 2, 2, kGreen));
  OverlaySpec plain = spec;
  plain.labels = false;
  const Image bare = RenderOverlay(img, boxes, plain, DefaultLabelMap());
  EXPECT_FALSE(IsColor(bare, 2, 2, kGreen));
}

TEST(RenderOverlayTest, RejectsBadStroke) {
  OverlaySpec spec;
  spec.stroke = 0;
  EXPECT_THROW(RenderOverlay(Image(4, 4, 3), {}, spec, DefaultLabelMap()), ValidationError);
}

}  // namespace
}  // namespace algaeval
