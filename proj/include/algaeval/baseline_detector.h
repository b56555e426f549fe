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

#ifndef ALGAEVAL_BASELINE_DETECTOR_H_
#define ALGAEVAL_BASELINE_DETECTOR_H_

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

#include "algaeval/detection.h"
#include "algaeval/image.h"

namespace algaeval {

// HSV window for "algae-colored" pixels. The hue range wraps when
// hue_low > hue_high.
struct ColorThresholds {
  double hue_low = 70.0;
  double hue_high = 170.0;
  double saturation_min = 0.25;
  double value_min = 0.15;

  // Throws ValidationError when a bound is out of range.
  void Validate() const;
  bool Accepts(const Hsv& hsv) const;
};

inline constexpr double kDefaultMinAreaFraction = 0.001;
inline constexpr int kAlgaeLabelId = 1;

// height x width, 1 where the pixel passed the color test.
using Mask = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Blob {
  std::int64_t pixel_count = 0;
  BoundingBox box;  // pixel space, continuous: [col_min, col_max + 1) x [row_min, row_max + 1)
  double density = 0.0;  // pixel_count / box area
};

// Throws UnsupportedImage unless the image has three channels.
Mask Segment(const Image& image, const ColorThresholds& thresholds = {});

// 4-connected components. Components smaller than min_area_fraction of the
// mask area are dropped. Sorted by descending pixel count, ties by the
// raster position of the first pixel.
std::vector<Blob> ConnectedComponents(const Mask& mask,
                                      double min_area_fraction = kDefaultMinAreaFraction);

// One detection per surviving blob: normalized blob box, score = density,
// class = algae.
DetectionBatch Detect(const Image& image, std::string image_id,
                      const ColorThresholds& thresholds = {},
                      double min_area_fraction = kDefaultMinAreaFraction);

}  // namespace algaeval

#endif  // ALGAEVAL_BASELINE_DETECTOR_H_
