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

#ifndef ALGAEVAL_TESTS_TEST_SUPPORT_H_
#define ALGAEVAL_TESTS_TEST_SUPPORT_H_

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "algaeval/baseline_detector.h"
#include "algaeval/dataset.h"
#include "algaeval/image.h"

namespace algaeval::testing {

// Removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::filesystem::path DataDir();  // tests/data in the source tree

void FillRect(Image& image, int x0, int y0, int x1, int y1, const Rgb& color);  // inclusive

// Images of non-green background with 1-3 separated green rectangles (and
// sometimes a red distractor). Writes <dir>/<id>.ppm and returns the manifest
// whose ground truth is exactly the green rectangles.
DatasetManifest GenerateSyntheticSuite(const std::filesystem::path& dir, int count,
                                       std::uint64_t seed);

// Brute-force continuous-area AP from the score-sorted outcome sequence. Every
// prefix is counted from scratch, and for each distinct recall level the
// envelope is the maximum precision over all prefixes reaching that recall.
double BruteForceContinuousAp(const std::vector<bool>& sorted_is_tp, std::size_t positives);

struct OracleBlob {
  std::int64_t pixel_count;
  int x_min, y_min, x_max, y_max;  // inclusive pixel indices
};

// Recursive flood fill over 4-neighbours, components listed by pixel count
// (descending), ties by raster order of the first pixel.
std::vector<OracleBlob> FloodFillComponents(const Mask& mask);

}  // namespace algaeval::testing

#endif  // ALGAEVAL_TESTS_TEST_SUPPORT_H_
