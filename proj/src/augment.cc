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

#include "algaeval/augment.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "algaeval/errors.h"
#include "random_util.h"

namespace algaeval {

void ValidateAugmentationSpec(const AugmentationSpec& spec) {
  auto ordered = [](const Range& r, const char* name) {
    if (!(r.lo <= r.hi)) {
      throw ValidationError(std::string("augmentation: ") + name + " range is inverted");
    }
  };
  ordered(spec.brightness_delta, "brightness_delta");
  ordered(spec.contrast_factor, "contrast_factor");
  ordered(spec.saturation_factor, "saturation_factor");
  ordered(spec.hue_shift_degrees, "hue_shift_degrees");
  if (!(spec.contrast_factor.lo > 0.0)) {
    throw ValidationError("augmentation: contrast_factor must be > 0");
  }
  if (!(spec.saturation_factor.lo > 0.0)) {
    throw ValidationError("augmentation: saturation_factor must be > 0");
  }
  if (spec.hue_shift_degrees.lo < -180.0 || spec.hue_shift_degrees.hi > 180.0) {
    throw ValidationError("augmentation: hue_shift_degrees must lie in [-180, 180]");
  }
}

AugmentationParams SampleAugmentation(const AugmentationSpec& spec) {
  ValidateAugmentationSpec(spec);
  std::mt19937_64 rng(spec.seed);
  AugmentationParams p;
  p.brightness_delta =
      internal::UniformReal(rng, spec.brightness_delta.lo, spec.brightness_delta.hi);
  p.contrast_factor =
      internal::UniformReal(rng, spec.contrast_factor.lo, spec.contrast_factor.hi);
  p.saturation_factor =
      internal::UniformReal(rng, spec.saturation_factor.lo, spec.saturation_factor.hi);
  p.hue_shift_degrees =
      internal::UniformReal(rng, spec.hue_shift_degrees.lo, spec.hue_shift_degrees.hi);
  return p;
}

Image ApplyAugmentation(const Image& image, const AugmentationParams& params) {
  if (image.channels != 3) {
    throw UnsupportedImage("augment: expected 3 channels, got " +
                           std::to_string(image.channels));
  }
  auto clamp255 = [](double v) { return std::clamp(v, 0.0, 255.0); };
  const bool touch_hsv = params.saturation_factor != 1.0 || params.hue_shift_degrees != 0.0;

  Image out = image;
  for (std::size_t i = 0; i < image.data.size(); i += 3) {
    double rgb[3];
    for (int c = 0; c < 3; ++c) {
      double v = image.data[i + c];
      v = clamp255(v + params.brightness_delta);
      v = clamp255((v - 128.0) * params.contrast_factor + 128.0);
      rgb[c] = v;
    }
    if (touch_hsv) {
      Hsv hsv = RgbToHsv(rgb[0] / 255.0, rgb[1] / 255.0, rgb[2] / 255.0);
      hsv.s = std::clamp(hsv.s * params.saturation_factor, 0.0, 1.0);
      hsv.h = std::fmod(hsv.h + params.hue_shift_degrees, 360.0);
      if (hsv.h < 0.0) hsv.h += 360.0;
      const auto back = HsvToRgb(hsv);
      for (int c = 0; c < 3; ++c) rgb[c] = clamp255(back[c] * 255.0);
    }
    for (int c = 0; c < 3; ++c) {
      out.data[i + c] = static_cast<std::uint8_t>(std::lround(rgb[c]));
    }
  }
  return out;
}

Image Augment(const Image& image, const AugmentationSpec& spec) {
  return ApplyAugmentation(image, SampleAugmentation(spec));
}

}  // namespace algaeval
