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

#include "algaeval/detection.h"

#include <sstream>

#include "algaeval/errors.h"
#include "algaeval/file_util.h"
#include "json_util.h"

namespace algaeval {

using internal::Json;
using internal::OrderedJson;

void DetectionBatch::Validate() const {
  const auto n = static_cast<std::size_t>(boxes.rows());
  if (static_cast<std::size_t>(scores.size()) != n || classes.size() != n) {
    std::ostringstream msg;
    msg << image_id << ": array lengths differ (boxes " << n << ", scores "
        << scores.size() << ", classes " << classes.size() << ")";
    throw ProtocolError(msg.str());
  }
  if (num_detections < 0 || static_cast<std::size_t>(num_detections) > n) {
    std::ostringstream msg;
    msg << image_id << ": num_detections " << num_detections
        << " exceeds array length " << n;
    throw ProtocolError(msg.str());
  }
  for (int i = 0; i < num_detections; ++i) {
    if (!(scores[i] >= 0.0 && scores[i] <= 1.0)) {
      throw ProtocolError(image_id + ": score out of [0,1] at index " + std::to_string(i));
    }
    if (classes[i] < 1) {
      throw ProtocolError(image_id + ": class id < 1 at index " + std::to_string(i));
    }
    const BoundingBox b = BoundingBox::FromWireOrder(boxes.row(i).transpose(),
                                                     CoordinateSpace::kNormalized);
    if (!b.IsValidNormalized()) {
      throw ProtocolError(image_id + ": invalid normalized box at index " +
                          std::to_string(i));
    }
  }
}

void DetectionBatch::Truncate() {
  boxes.conservativeResize(num_detections, Eigen::NoChange);
  scores.conservativeResize(num_detections);
  classes.resize(static_cast<std::size_t>(num_detections));
}

std::vector<Detection> DetectionBatch::ToDetections() const {
  std::vector<Detection> out;
  out.reserve(static_cast<std::size_t>(num_detections));
  for (int i = 0; i < num_detections; ++i) {
    out.push_back({image_id, classes[i], scores[i],
                   BoundingBox::FromWireOrder(boxes.row(i).transpose(),
                                              CoordinateSpace::kNormalized)});
  }
  return out;
}

DetectionBatch DetectionBatch::FromDetections(std::string image_id,
                                              const std::vector<Detection>& detections) {
  DetectionBatch batch;
  batch.image_id = std::move(image_id);
  const auto n = static_cast<Eigen::Index>(detections.size());
  batch.boxes.resize(n, 4);
  batch.scores.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& d = detections[static_cast<std::size_t>(i)];
    batch.boxes.row(i) = d.box.ToWireOrder().transpose();
    batch.scores[i] = d.score;
    batch.classes.push_back(d.label_id);
  }
  batch.num_detections = static_cast<int>(n);
  return batch;
}

bool operator==(const DetectionBatch& a, const DetectionBatch& b) {
  return a.image_id == b.image_id && a.num_detections == b.num_detections &&
         a.classes == b.classes && a.boxes.rows() == b.boxes.rows() &&
         a.boxes == b.boxes && a.scores.size() == b.scores.size() &&
         a.scores == b.scores;
}

std::vector<Detection> ParseDetections(std::string_view json_text,
                                       std::string_view source_name) {
  const std::string src(source_name);
  const Json root = internal::ParseJsonText(json_text, src);
  if (!root.is_object()) throw ParseError(src + ": top level must be an object");
  const Json& list = internal::RequireArray(root, "detections", src);
  std::vector<Detection> out;
  out.reserve(list.size());
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string ctx = src + ".detections[" + std::to_string(i) + "]";
    Detection d;
    d.image_id = internal::RequireString(list[i], "image_id", ctx);
    d.label_id = static_cast<int>(internal::RequireInteger(list[i], "label_id", ctx));
    d.score = internal::RequireNumber(list[i], "score", ctx);
    const Json& box = internal::RequireArray(list[i], "box", ctx);
    if (box.size() != 4) throw ParseError(ctx + ".box: expected 4 numbers");
    BoundingBox::Vector4 yxyx;
    for (int k = 0; k < 4; ++k) {
      if (!box[k].is_number()) throw ParseError(ctx + ".box: expected 4 numbers");
      yxyx[k] = box[k].get<double>();
    }
    d.box = BoundingBox::FromWireOrder(yxyx, CoordinateSpace::kNormalized);
    if (d.label_id < 1) throw ValidationError(ctx + ": label_id must be >= 1");
    if (!(d.score >= 0.0 && d.score <= 1.0)) {
      throw ValidationError(ctx + ": score must lie in [0, 1]");
    }
    if (!d.box.IsValidNormalized()) {
      throw ValidationError(ctx + ": box is not a valid normalized box");
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<Detection> LoadDetections(const std::filesystem::path& path) {
  return ParseDetections(ReadFileToString(path), path.string());
}

std::string SerializeDetections(const std::vector<Detection>& detections) {
  OrderedJson list = OrderedJson::array();
  for (const auto& d : detections) {
    const auto w = d.box.ToWireOrder();
    list.push_back({{"image_id", d.image_id},
                    {"label_id", d.label_id},
                    {"score", d.score},
                    {"box", {w[0], w[1], w[2], w[3]}}});
  }
  OrderedJson root;
  root["detections"] = std::move(list);
  return internal::Dump(root);
}

void SaveDetections(const std::vector<Detection>& detections,
                    const std::filesystem::path& path) {
  WriteFileAtomic(path, SerializeDetections(detections));
}

}  // namespace algaeval
