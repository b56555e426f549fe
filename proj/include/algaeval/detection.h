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

#ifndef ALGAEVAL_DETECTION_H_
#define ALGAEVAL_DETECTION_H_

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "algaeval/geometry.h"

namespace algaeval {

struct Detection {
  std::string image_id;
  int label_id = 1;
  double score = 0.0;
  BoundingBox box;  // normalized
  friend bool operator==(const Detection&, const Detection&) = default;
};

// Row-major N x 4 array of normalized boxes in wire order
// (y_min, x_min, y_max, x_max).
using WireBoxes = Eigen::Matrix<double, Eigen::Dynamic, 4, Eigen::RowMajor>;

// A detector's output for one image: the boxes, scores, classes and
// number-of-detections arrays.
struct DetectionBatch {
  std::string image_id;
  WireBoxes boxes = WireBoxes(0, 4);
  Eigen::VectorXd scores = Eigen::VectorXd(0);
  std::vector<int> classes;
  int num_detections = 0;

  // Throws ProtocolError when the arrays disagree in length, are shorter
  // than num_detections, or hold out-of-range values among the first
  // num_detections entries.
  void Validate() const;
  // Drops entries beyond num_detections.
  void Truncate();
  std::vector<Detection> ToDetections() const;

  static DetectionBatch FromDetections(std::string image_id,
                                       const std::vector<Detection>& detections);
};

bool operator==(const DetectionBatch& a, const DetectionBatch& b);

// Detections file: {"detections":[{"image_id","label_id","score",
// "box":[y_min,x_min,y_max,x_max]}]} with normalized coordinates.
std::vector<Detection> ParseDetections(std::string_view json_text,
                                       std::string_view source_name = "detections");
std::vector<Detection> LoadDetections(const std::filesystem::path& path);
std::string SerializeDetections(const std::vector<Detection>& detections);
void SaveDetections(const std::vector<Detection>& detections,
                    const std::filesystem::path& path);

}  // namespace algaeval

#endif  // ALGAEVAL_DETECTION_H_
