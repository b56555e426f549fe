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

#ifndef ALGAEVAL_GEOMETRY_H_
#define ALGAEVAL_GEOMETRY_H_

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <ostream>

#include "algaeval/errors.h"

namespace algaeval {

enum class CoordinateSpace : std::uint8_t {
  kNormalized,  // unit square, origin top-left
  kPixel,
};

// How normalized coordinates are scaled to pixels. kPaperCompat multiplies
// all four coordinates by the image width, including the vertical ones.
enum class ConversionMode : std::uint8_t { kDefault, kPaperCompat };

struct ImageSize {
  int width = 1;
  int height = 1;

  bool IsValid() const { return width >= 1 && height >= 1; }
  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

// Axis-aligned box stored as (x_min, y_min, x_max, y_max).
template <typename Scalar>
class Box {
 public:
  using Vector4 = Eigen::Matrix<Scalar, 4, 1>;

  Box() : coords_(Vector4::Zero()) {}
  Box(Scalar x_min, Scalar y_min, Scalar x_max, Scalar y_max,
      CoordinateSpace space)
      : coords_(x_min, y_min, x_max, y_max), space_(space) {}
  Box(const Vector4& coords, CoordinateSpace space)
      : coords_(coords), space_(space) {}

  // The backend wire order is (y_min, x_min, y_max, x_max).
  static Box FromWireOrder(const Vector4& yxyx, CoordinateSpace space) {
    return Box(yxyx[1], yxyx[0], yxyx[3], yxyx[2], space);
  }
  Vector4 ToWireOrder() const {
    return Vector4(y_min(), x_min(), y_max(), x_max());
  }

  Scalar x_min() const { return coords_[0]; }
  Scalar y_min() const { return coords_[1]; }
  Scalar x_max() const { return coords_[2]; }
  Scalar y_max() const { return coords_[3]; }
  CoordinateSpace space() const { return space_; }
  const Vector4& coords() const { return coords_; }

  Scalar width() const { return x_max() - x_min(); }
  Scalar height() const { return y_max() - y_min(); }
  Scalar Area() const {
    return std::max<Scalar>(width(), 0) * std::max<Scalar>(height(), 0);
  }
  bool IsDegenerate() const { return !(width() > 0 && height() > 0); }

  bool IsOrdered() const { return x_min() <= x_max() && y_min() <= y_max(); }

  // Invariant check for normalized boxes.
  bool IsValidNormalized() const {
    return space_ == CoordinateSpace::kNormalized && IsOrdered() &&
           (coords_.array() >= Scalar(0)).all() &&
           (coords_.array() <= Scalar(1)).all();
  }

  // Invariant check for pixel boxes owned by an image of `size`.
  bool IsValidPixel(const ImageSize& size) const {
    return space_ == CoordinateSpace::kPixel && IsOrdered() &&
           x_min() >= 0 && y_min() >= 0 && x_max() <= size.width &&
           y_max() <= size.height;
  }

  Box Translated(Scalar dx, Scalar dy) const {
    return Box(coords_ + Vector4(dx, dy, dx, dy), space_);
  }

  friend bool operator==(const Box& a, const Box& b) {
    return a.space_ == b.space_ && a.coords_ == b.coords_;
  }

 private:
  Vector4 coords_;
  CoordinateSpace space_ = CoordinateSpace::kPixel;
};

using BoundingBox = Box<double>;

template <typename Scalar>
std::ostream& operator<<(std::ostream& os, const Box<Scalar>& b) {
  return os << (b.space() == CoordinateSpace::kNormalized ? "norm" : "px")
            << "(" << b.x_min() << ", " << b.y_min() << ", " << b.x_max()
            << ", " << b.y_max() << ")";
}

template <typename Scalar>
Scalar IntersectionArea(const Box<Scalar>& a, const Box<Scalar>& b) {
  const Scalar w = std::min(a.x_max(), b.x_max()) - std::max(a.x_min(), b.x_min());
  const Scalar h = std::min(a.y_max(), b.y_max()) - std::max(a.y_min(), b.y_min());
  if (w <= 0 || h <= 0) return Scalar(0);
  return w * h;
}

// Intersection over union in continuous coordinates. A degenerate box has
// IoU 0 against everything, itself included.
template <typename Scalar>
Scalar Iou(const Box<Scalar>& a, const Box<Scalar>& b) {
  if (a.space() != b.space()) {
    throw CoordinateSpaceMismatch("iou: boxes are in different coordinate spaces");
  }
  if (a.IsDegenerate() || b.IsDegenerate()) return Scalar(0);
  const Scalar inter = IntersectionArea(a, b);
  const Scalar uni = a.Area() + b.Area() - inter;
  if (!(uni > 0)) return Scalar(0);
  return std::clamp(inter / uni, Scalar(0), Scalar(1));
}

// Rows of `a` and `b` are boxes in (x_min, y_min, x_max, y_max) order, all in
// one coordinate space. Entry (i, j) is Iou(a_i, b_j).
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic>
PairwiseIou(const Eigen::MatrixBase<DerivedA>& a,
            const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  static_assert(DerivedA::ColsAtCompileTime == 4 ||
                DerivedA::ColsAtCompileTime == Eigen::Dynamic);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const Box<Scalar> bi(a.row(i).transpose(), CoordinateSpace::kPixel);
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      out(i, j) = Iou(bi, Box<Scalar>(b.row(j).transpose(),
                                      CoordinateSpace::kPixel));
    }
  }
  return out;
}

// Scales a normalized box to pixel coordinates. The result is not clamped;
// in kPaperCompat mode it can fall outside the image on non-square inputs.
template <typename Scalar>
Box<Scalar> Denormalize(const Box<Scalar>& box, const ImageSize& size,
                        ConversionMode mode = ConversionMode::kDefault) {
  if (box.space() != CoordinateSpace::kNormalized) {
    throw CoordinateSpaceMismatch("denormalize: box is not normalized");
  }
  const Scalar sx = static_cast<Scalar>(size.width);
  const Scalar sy = mode == ConversionMode::kPaperCompat
                        ? static_cast<Scalar>(size.width)
                        : static_cast<Scalar>(size.height);
  return Box<Scalar>(box.coords().cwiseProduct(
                         typename Box<Scalar>::Vector4(sx, sy, sx, sy)),
                     CoordinateSpace::kPixel);
}

template <typename Scalar>
Box<Scalar> Normalize(const Box<Scalar>& box, const ImageSize& size) {
  if (box.space() != CoordinateSpace::kPixel) {
    throw CoordinateSpaceMismatch("normalize: box is not in pixel space");
  }
  const Scalar sx = static_cast<Scalar>(size.width);
  const Scalar sy = static_cast<Scalar>(size.height);
  return Box<Scalar>(box.coords().cwiseQuotient(
                         typename Box<Scalar>::Vector4(sx, sy, sx, sy)),
                     CoordinateSpace::kNormalized);
}

template <typename Scalar>
struct ClampResult {
  Box<Scalar> box;
  bool clamped = false;     // at least one coordinate moved
  bool degenerate = false;  // zero area after clamping
};

template <typename Scalar>
ClampResult<Scalar> ClampToImage(const Box<Scalar>& box, const ImageSize& size) {
  using Vector4 = typename Box<Scalar>::Vector4;
  const Scalar w = static_cast<Scalar>(size.width);
  const Scalar h = static_cast<Scalar>(size.height);
  const Vector4 hi(w, h, w, h);
  Vector4 c = box.coords().cwiseMax(Vector4::Zero()).cwiseMin(hi);
  // Keep the corners ordered if the input was inverted by the clip.
  c[2] = std::max(c[2], c[0]);
  c[3] = std::max(c[3], c[1]);
  ClampResult<Scalar> out{Box<Scalar>(c, CoordinateSpace::kPixel)};
  out.clamped = c != box.coords();
  out.degenerate = out.box.IsDegenerate();
  return out;
}

}  // namespace algaeval

#endif  // ALGAEVAL_GEOMETRY_H_
