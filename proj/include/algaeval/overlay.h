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

#ifndef ALGAEVAL_OVERLAY_H_
#define ALGAEVAL_OVERLAY_H_

#include <span>
#include <string>
#include <string_view>

#include "algaeval/backend.h"
#include "algaeval/dataset.h"
#include "algaeval/image.h"

namespace algaeval {

struct OverlaySpec {
  Rgb color{0, 255, 0};
  int stroke = 2;
  bool labels = true;
  Rgb text_color{0, 0, 0};
};

// Draws `text` with the built-in 5x7 font, 1 px between glyphs, top-left at
// (x, y). Lowercase letters use the uppercase glyphs; unknown characters draw
// as a hollow box. Pixels outside the image are skipped.
void DrawText(Image& image, int x, int y, std::string_view text, const Rgb& color);
inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;

// Stroke is drawn inward from the box edges.
void DrawRectangle(Image& image, const BoundingBox& box, const Rgb& color, int stroke);

// "algae 0.87": class name (or numeric id) and score to two decimals.
std::string FormatLabel(const LabelMap& labels, int label_id, double score);

// Burns every box into a copy of `image`. An empty box list returns the
// input unchanged. Throws ValidationError if spec.stroke < 1.
Image RenderOverlay(const Image& image, std::span<const ScoredBox> boxes,
                    const OverlaySpec& spec, const LabelMap& labels);

}  // namespace algaeval

#endif  // ALGAEVAL_OVERLAY_H_
