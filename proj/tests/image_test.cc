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

#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "algaeval/errors.h"
#include "algaeval/file_util.h"
#include "test_support.h"

namespace algaeval {
namespace {

TEST(HsvTest, PrimaryColors) {
  const Hsv green = RgbToHsv(0, 1, 0);
  EXPECT_DOUBLE_EQ(green.h, 120.0);
  EXPECT_DOUBLE_EQ(green.s, 1.0);
  EXPECT_DOUBLE_EQ(green.v, 1.0);
  EXPECT_DOUBLE_EQ(RgbToHsv(0, 0, 1).h, 240.0);
  EXPECT_DOUBLE_EQ(RgbToHsv(1, 0, 0).h, 0.0);
  EXPECT_DOUBLE_EQ(RgbToHsv(1, 0, 1).h, 300.0);
  const Hsv gray = RgbToHsv(0.5, 0.5, 0.5);
  EXPECT_EQ(gray.h, 0.0);
  EXPECT_EQ(gray.s, 0.0);
  EXPECT_EQ(RgbToHsv(0, 0, 0).v, 0.0);
}

TEST(HsvTest, RoundTripsEveryByteTripleOnAGrid) {
  for (int r = 0; r < 256; r += 15) {
    for (int g = 0; g < 256; g += 17) {
      for (int b = 0; b < 256; b += 13) {
        const Hsv hsv = RgbToHsv(r / 255.0, g / 255.0, b / 255.0);
        EXPECT_GE(hsv.h, 0.0);
        EXPECT_LT(hsv.h, 360.0);
        const auto back = HsvToRgb(hsv);
        EXPECT_NEAR(back[0] * 255.0, r, 1e-9);
        EXPECT_NEAR(back[1] * 255.0, g, 1e-9);
        EXPECT_NEAR(back[2] * 255.0, b, 1e-9);
      }
    }
  }
}

TEST(PpmTest, WriteThenRead) {
  testing::TempDir tmp;
  Image img(7, 5, 3);
  std::mt19937 rng(1);
  for (auto& v : img.data) v = static_cast<std::uint8_t>(rng());
  WritePpm(img, tmp / "a.ppm");
  EXPECT_EQ(ReadPpm(tmp / "a.ppm"), img);
  EXPECT_EQ(ReadImage(tmp / "a.ppm"), img);
}

TEST(PpmTest, HeaderCommentsAreSkipped) {
  testing::TempDir tmp;
  std::string bytes = "P6\n# made by hand\n2 1\n# depth\n255\n";
  bytes += std::string("\x01\x02\x03\x04\x05\x06", 6);
  WriteFileAtomic(tmp / "c.ppm", bytes);
  const Image img = ReadPpm(tmp / "c.ppm");
  EXPECT_EQ(img.width, 2);
  EXPECT_EQ(img.data, (std::vector<std::uint8_t>{1, 2, 3, 4, 5, 6}));
}

TEST(PpmTest, RejectsTruncatedAndUnsupported) {
  testing::TempDir tmp;
  WriteFileAtomic(tmp / "t.ppm", "P6\n4 4\n255\nabc");
  EXPECT_THROW(ReadPpm(tmp / "t.ppm"), ParseError);
  WriteFileAtomic(tmp / "p3.ppm", "P3\n1 1\n255\n0 0 0\n");
  EXPECT_THROW(ReadPpm(tmp / "p3.ppm"), UnsupportedImage);
  WriteFileAtomic(tmp / "deep.ppm", "P6\n1 1\n65535\n\0\0\0\0\0\0");
  EXPECT_THROW(ReadPpm(tmp / "deep.ppm"), UnsupportedImage);
  WriteFileAtomic(tmp / "junk.bin", "hello");
  EXPECT_THROW(ReadImage(tmp / "junk.bin"), UnsupportedImage);
}

TEST(PngTest, WriteThenRead) {
  testing::TempDir tmp;
  Image img(9, 4, 3);
  std::mt19937 rng(2);
  for (auto& v : img.data) v = static_cast<std::uint8_t>(rng());
  WriteImage(img, tmp / "a.png");
  EXPECT_EQ(ReadImage(tmp / "a.png"), img);
}

TEST(WriteTest, LeavesNoTemporaryFiles) {
  testing::TempDir tmp;
  WritePpm(Image(2, 2, 3, 9), tmp / "x.ppm");
  int files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(tmp.path())) ++files;
  EXPECT_EQ(files, 1);
}

TEST(WriteTest, RejectsNonRgb) {
  testing::TempDir tmp;
  EXPECT_THROW(WritePpm(Image(2, 2, 1), tmp / "g.ppm"), UnsupportedImage);
}

}  // namespace
}  // namespace algaeval
