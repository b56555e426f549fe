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

#ifndef ALGAEVAL_METRICS_H_
#define ALGAEVAL_METRICS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "algaeval/dataset.h"
#include "algaeval/detection.h"

namespace algaeval {

enum class MatchOutcome : std::uint8_t {
  kTruePositive,
  kFalsePositiveDuplicate,  // best ground truth already claimed
  kFalsePositiveNoMatch,    // no same-class ground truth above threshold
};

struct MatchRecord {
  Detection detection;
  std::size_t input_index = 0;  // position in the list given to MatchDetections
  MatchOutcome outcome = MatchOutcome::kFalsePositiveNoMatch;
  std::optional<std::size_t> matched_gt;  // index into ImageEntry::ground_truth
  double iou = 0.0;                       // IoU with the best same-class ground truth
};

// Records sorted by descending score, ties by input index.
struct MatchResult {
  std::string image_id;
  std::vector<MatchRecord> records;

  std::size_t CountTruePositives() const;
};

// Greedy matching in descending score order. Each detection looks only at its
// best-IoU ground truth of the same class (first index on ties); it is a true
// positive iff that IoU is strictly above `iou_threshold` and the ground truth
// is still unclaimed.
//
// Throws ValidationError if a detection names another image or the threshold
// is outside (0, 1].
MatchResult MatchDetections(std::span<const Detection> detections,
                            const ImageEntry& truth, double iou_threshold);

struct PrSample {
  double score = 0.0;
  double recall = 0.0;
  double precision = 0.0;
  bool true_positive = false;
};

struct PrCurve {
  int label_id = 1;
  std::size_t positives_total = 0;
  // One sample per pooled detection. When positives_total is 0 every recall
  // is reported as 0 and the curve is flagged by empty_positives().
  std::vector<PrSample> samples;

  bool empty_positives() const { return positives_total == 0; }
};

// Pools the records of class `label_id` across images, sorts by descending
// score (ties by image id, then input index) and accumulates
// precision = TP(k) / k and recall = TP(k) / positives_total.
PrCurve BuildPrCurve(std::span<const MatchResult> matches, int label_id,
                     std::size_t positives_total);

std::size_t CountPositives(std::span<const ImageEntry> images, int label_id);

enum class ApMethod : std::uint8_t { kContinuousArea, kElevenPoint };

std::string_view ApMethodName(ApMethod method);  // "continuous" | "eleven-point"
std::optional<ApMethod> ParseApMethod(std::string_view name);

// kContinuousArea integrates the monotone precision envelope over recall;
// kElevenPoint averages the envelope at recall 0, 0.1, ..., 1. A curve with
// no positives has AP 0.
double AveragePrecision(const PrCurve& curve,
                        ApMethod method = ApMethod::kContinuousArea);

struct ClassAp {
  int label_id = 1;
  std::string name;
  std::size_t positives = 0;
  std::size_t detections = 0;
  double ap_continuous = 0.0;
  double ap_eleven_point = 0.0;

  double ap(ApMethod method) const {
    return method == ApMethod::kContinuousArea ? ap_continuous : ap_eleven_point;
  }
  friend bool operator==(const ClassAp&, const ClassAp&) = default;
};

// Unweighted mean over classes with at least one positive. Throws
// ValidationError if there is no such class.
double MeanAveragePrecision(std::span<const ClassAp> classes,
                            ApMethod method = ApMethod::kContinuousArea);

// Positive iff some detection scores strictly above `score_threshold`.
bool ClassifyImage(const DetectionBatch& batch, double score_threshold = 0.5);
std::vector<bool> ClassifyImages(std::span<const DetectionBatch> batches,
                                 double score_threshold = 0.5);

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts CountConfusion(const std::vector<bool>& actual,
                               const std::vector<bool>& predicted);

// Exact ratio of two counts.
struct Ratio {
  std::int64_t numerator = 0;
  std::int64_t denominator = 1;

  double value() const {
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
  // Percentage truncated (not rounded) to two decimals, computed in integer
  // arithmetic: 25/52 gives 48.07.
  double PercentTruncated() const;
  std::string FormatPercent() const;  // "48.07%"
};

// A ratio with a zero denominator is reported as nullopt, never as 0.
struct ClassificationMetrics {
  std::optional<Ratio> accuracy;
  std::optional<Ratio> precision;
  std::optional<Ratio> recall;
};

ClassificationMetrics ComputeClassificationMetrics(const ConfusionCounts& counts);

struct EvalOptions {
  double iou_threshold = 0.5;
  double score_threshold = 0.5;
  // Restricts evaluation to these image ids when set.
  std::optional<std::set<std::string>> image_filter;
};

struct EvalReport {
  std::vector<ClassAp> per_class_ap;
  std::optional<double> map_continuous;
  std::optional<double> map_eleven_point;
  double iou_threshold = 0.5;
  double score_threshold = 0.5;
  // Percentages truncated to two decimals; nullopt when undefined.
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  ConfusionCounts counts;

  // Not serialized.
  std::vector<PrCurve> curves;
  std::size_t images_evaluated = 0;

  std::optional<double> map(ApMethod method) const {
    return method == ApMethod::kContinuousArea ? map_continuous : map_eleven_point;
  }
};

// Matches every (filtered) manifest image, builds one pooled curve per label
// map class, and computes AP, mAP and image-level classification counts.
// Throws ValidationError for detections naming unknown images or classes, and
// when no class has ground truth.
EvalReport Evaluate(const DatasetManifest& manifest,
                    std::span<const Detection> detections,
                    const EvalOptions& options = {});

std::string SerializeEvalReport(const EvalReport& report);
EvalReport ParseEvalReport(std::string_view json_text,
                           std::string_view source_name = "report");

// Header "rank,score,recall,precision", one row per pooled detection.
std::string PrCurveToCsv(const PrCurve& curve);

}  // namespace algaeval

#endif  // ALGAEVAL_METRICS_H_
