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

#ifndef ALGAEVAL_AUGMENT_H_
#define ALGAEVAL_AUGMENT_H_

#include <cstdint>

#include "algaeval/image.h"

namespace algaeval {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

// Photometric augmentation. Each call draws one value from every range
// (uniformly, seeded) and applies brightness, contrast, saturation and hue in
// that order.
struct AugmentationSpec {
  Range brightness_delta{0.0, 0.0};   // added to every channel
  Range contrast_factor{1.0, 1.0};    // v' = (v - 128) * f + 128
  Range saturation_factor{1.0, 1.0};  // HSV saturation multiplier
  Range hue_shift_degrees{0.0, 0.0};  // wraps modulo 360
  std::uint64_t seed = 0;
};

// Throws ValidationError for inverted ranges, non-positive contrast or
// saturation, or hue shifts outside [-180, 180].
void ValidateAugmentationSpec(const AugmentationSpec& spec);

struct AugmentationParams {
  double brightness_delta = 0.0;
  double contrast_factor = 1.0;
  double saturation_factor = 1.0;
  double hue_shift_degrees = 0.0;
};

AugmentationParams SampleAugmentation(const AugmentationSpec& spec);

// Channel values stay in double precision between steps, are clamped to
// [0, 255] after each step and rounded once at the end.
Image ApplyAugmentation(const Image& image, const AugmentationParams& params);

// Throws UnsupportedImage unless the image has three channels.
Image Augment(const Image& image, const AugmentationSpec& spec);

}  // namespace algaeval

#endif  // ALGAEVAL_AUGMENT_H_
