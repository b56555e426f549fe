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

#include "algaeval/baseline_detector.h"

#include <algorithm>
#include <array>

#include "algaeval/errors.h"

namespace algaeval {

void ColorThresholds::Validate() const {
  auto in_hue = [](double h) { return h >= 0.0 && h < 360.0; };
  if (!in_hue(hue_low) || !in_hue(hue_high)) {
    throw ValidationError("hue bounds must lie in [0, 360)");
  }
  if (!(saturation_min >= 0.0 && saturation_min <= 1.0)) {
    throw ValidationError("saturation_min must lie in [0, 1]");
  }
  if (!(value_min >= 0.0 && value_min <= 1.0)) {
    throw ValidationError("value_min must lie in [0, 1]");
  }
}

bool ColorThresholds::Accepts(const Hsv& hsv) const {
  const bool hue_ok = hue_low <= hue_high ? (hsv.h >= hue_low && hsv.h <= hue_high)
                                          : (hsv.h >= hue_low || hsv.h <= hue_high);
  return hue_ok && hsv.s >= saturation_min && hsv.v >= value_min;
}

Mask Segment(const Image& image, const ColorThresholds& thresholds) {
  if (image.channels != 3) {
    throw UnsupportedImage("segment: expected 3 channels, got " +
                           std::to_string(image.channels));
  }
  thresholds.Validate();
  Mask mask(image.height, image.width);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const auto p = image.Pixel(x, y);
      const Hsv hsv = RgbToHsv(p[0] / 255.0, p[1] / 255.0, p[2] / 255.0);
      mask(y, x) = thresholds.Accepts(hsv) ? 1 : 0;
    }
  }
  return mask;
}

std::vector<Blob> ConnectedComponents(const Mask& mask, double min_area_fraction) {
  if (!(min_area_fraction >= 0.0 && min_area_fraction < 1.0)) {
    throw ValidationError("min_area_fraction must lie in [0, 1)");
  }
  const Eigen::Index rows = mask.rows();
  const Eigen::Index cols = mask.cols();
  const double min_pixels = min_area_fraction * static_cast<double>(rows * cols);

  // Seeds are visited in raster order, so a stable sort keeps that order
  // among equal-sized blobs.
  std::vector<Blob> blobs;
  std::vector<std::uint8_t> visited(static_cast<std::size_t>(rows * cols), 0);
  std::vector<Eigen::Index> stack;

  for (Eigen::Index seed = 0; seed < rows * cols; ++seed) {
    const Eigen::Index sr = seed / cols;
    const Eigen::Index sc = seed % cols;
    if (!mask(sr, sc) || visited[seed]) continue;
    visited[seed] = 1;
    stack.assign(1, seed);
    std::int64_t count = 0;
    Eigen::Index rmin = sr, rmax = sr, cmin = sc, cmax = sc;
    while (!stack.empty()) {
      const Eigen::Index idx = stack.back();
      stack.pop_back();
      const Eigen::Index r = idx / cols;
      const Eigen::Index c = idx % cols;
      ++count;
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
      cmin = std::min(cmin, c);
      cmax = std::max(cmax, c);
      const std::array<std::pair<Eigen::Index, Eigen::Index>, 4> nbrs{
          {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}}};
      for (const auto& [nr, nc] : nbrs) {
        if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
        const Eigen::Index n = nr * cols + nc;
        if (mask(nr, nc) && !visited[n]) {
          visited[n] = 1;
          stack.push_back(n);
        }
      }
    }
    if (static_cast<double>(count) < min_pixels) continue;
    Blob blob;
    blob.pixel_count = count;
    blob.box = BoundingBox(static_cast<double>(cmin), static_cast<double>(rmin),
                           static_cast<double>(cmax + 1), static_cast<double>(rmax + 1),
                           CoordinateSpace::kPixel);
    blob.density = static_cast<double>(count) / blob.box.Area();
    blobs.push_back(blob);
  }
  std::stable_sort(blobs.begin(), blobs.end(), [](const Blob& a, const Blob& b) {
    return a.pixel_count > b.pixel_count;
  });
  return blobs;
}

DetectionBatch Detect(const Image& image, std::string image_id,
                      const ColorThresholds& thresholds, double min_area_fraction) {
  const auto blobs = ConnectedComponents(Segment(image, thresholds), min_area_fraction);
  DetectionBatch batch;
  batch.image_id = std::move(image_id);
  const auto n = static_cast<Eigen::Index>(blobs.size());
  batch.boxes.resize(n, 4);
  batch.scores.resize(n);
  batch.classes.assign(blobs.size(), kAlgaeLabelId);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Blob& b = blobs[static_cast<std::size_t>(i)];
    batch.boxes.row(i) = Normalize(b.box, image.size()).ToWireOrder().transpose();
    batch.scores[i] = b.density;
  }
  batch.num_detections = static_cast<int>(n);
  return batch;
}

}  // namespace algaeval
