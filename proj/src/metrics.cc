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

#include "algaeval/metrics.h"

#include <algorithm>
#include <charconv>
#include <map>
#include <numeric>

#include "algaeval/errors.h"
#include "json_util.h"

namespace algaeval {

using internal::Json;
using internal::OrderedJson;

std::size_t MatchResult::CountTruePositives() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const MatchRecord& r) {
        return r.outcome == MatchOutcome::kTruePositive;
      }));
}

MatchResult MatchDetections(std::span<const Detection> detections,
                            const ImageEntry& truth, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw ValidationError("iou threshold must lie in (0, 1]");
  }
  MatchResult result;
  result.image_id = truth.id;
  result.records.reserve(detections.size());
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (detections[i].image_id != truth.id) {
      throw ValidationError("detection " + std::to_string(i) + " references image \"" +
                            detections[i].image_id + "\", expected \"" + truth.id + "\"");
    }
    MatchRecord r;
    r.detection = detections[i];
    r.input_index = i;
    result.records.push_back(std::move(r));
  }
  std::stable_sort(result.records.begin(), result.records.end(),
                   [](const MatchRecord& a, const MatchRecord& b) {
                     return a.detection.score > b.detection.score;
                   });

  std::vector<bool> claimed(truth.ground_truth.size(), false);
  for (auto& r : result.records) {
    const BoundingBox det_px = Denormalize(r.detection.box, truth.size);
    std::optional<std::size_t> best;
    double best_iou = -1.0;
    for (std::size_t g = 0; g < truth.ground_truth.size(); ++g) {
      const auto& gt = truth.ground_truth[g];
      if (gt.label_id != r.detection.label_id) continue;
      const double v = Iou(det_px, gt.box);
      if (v > best_iou) {
        best_iou = v;
        best = g;
      }
    }
    if (!best) {
      r.outcome = MatchOutcome::kFalsePositiveNoMatch;
      continue;
    }
    r.iou = best_iou;
    if (best_iou > iou_threshold) {
      if (!claimed[*best]) {
        claimed[*best] = true;
        r.outcome = MatchOutcome::kTruePositive;
        r.matched_gt = best;
      } else {
        r.outcome = MatchOutcome::kFalsePositiveDuplicate;
      }
    } else {
      r.outcome = MatchOutcome::kFalsePositiveNoMatch;
    }
  }
  return result;
}

PrCurve BuildPrCurve(std::span<const MatchResult> matches, int label_id,
                     std::size_t positives_total) {
  struct Pooled {
    const std::string* image_id;
    const MatchRecord* record;
  };
  std::vector<Pooled> pooled;
  for (const auto& m : matches) {
    for (const auto& r : m.records) {
      if (r.detection.label_id == label_id) pooled.push_back({&m.image_id, &r});
    }
  }
  std::sort(pooled.begin(), pooled.end(), [](const Pooled& a, const Pooled& b) {
    if (a.record->detection.score != b.record->detection.score) {
      return a.record->detection.score > b.record->detection.score;
    }
    if (*a.image_id != *b.image_id) return *a.image_id < *b.image_id;
    return a.record->input_index < b.record->input_index;
  });

  PrCurve curve;
  curve.label_id = label_id;
  curve.positives_total = positives_total;
  curve.samples.reserve(pooled.size());
  std::size_t tp = 0;
  for (std::size_t k = 0; k < pooled.size(); ++k) {
    const bool is_tp = pooled[k].record->outcome == MatchOutcome::kTruePositive;
    if (is_tp) ++tp;
    PrSample s;
    s.score = pooled[k].record->detection.score;
    s.true_positive = is_tp;
    s.precision = static_cast<double>(tp) / static_cast<double>(k + 1);
    s.recall = positives_total == 0
                   ? 0.0
                   : static_cast<double>(tp) / static_cast<double>(positives_total);
    curve.samples.push_back(s);
  }
  return curve;
}

std::size_t CountPositives(std::span<const ImageEntry> images, int label_id) {
  std::size_t n = 0;
  for (const auto& image : images) {
    for (const auto& gt : image.ground_truth) {
      if (gt.label_id == label_id) ++n;
    }
  }
  return n;
}

std::string_view ApMethodName(ApMethod method) {
  return method == ApMethod::kContinuousArea ? "continuous" : "eleven-point";
}

std::optional<ApMethod> ParseApMethod(std::string_view name) {
  if (name == "continuous") return ApMethod::kContinuousArea;
  if (name == "eleven-point") return ApMethod::kElevenPoint;
  return std::nullopt;
}

double AveragePrecision(const PrCurve& curve, ApMethod method) {
  if (curve.empty_positives() || curve.samples.empty()) return 0.0;
  const auto& s = curve.samples;
  // envelope[k] = max precision over samples k..end.
  std::vector<double> envelope(s.size());
  double running = 0.0;
  for (std::size_t k = s.size(); k-- > 0;) {
    running = std::max(running, s[k].precision);
    envelope[k] = running;
  }
  if (method == ApMethod::kContinuousArea) {
    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s[k].recall > prev_recall) {
        ap += (s[k].recall - prev_recall) * envelope[k];
        prev_recall = s[k].recall;
      }
    }
    return std::clamp(ap, 0.0, 1.0);
  }
  double sum = 0.0;
  std::size_t k = 0;
  for (int t = 0; t <= 10; ++t) {
    const double level = t / 10.0;
    while (k < s.size() && s[k].recall < level) ++k;
    sum += k < s.size() ? envelope[k] : 0.0;
  }
  return sum / 11.0;
}

double MeanAveragePrecision(std::span<const ClassAp> classes, ApMethod method) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& c : classes) {
    if (c.positives == 0) continue;
    sum += c.ap(method);
    ++n;
  }
  if (n == 0) throw ValidationError("mAP: no class has ground-truth instances");
  return sum / static_cast<double>(n);
}

bool ClassifyImage(const DetectionBatch& batch, double score_threshold) {
  const auto n = std::min<Eigen::Index>(batch.num_detections, batch.scores.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (batch.scores[i] > score_threshold) return true;
  }
  return false;
}

std::vector<bool> ClassifyImages(std::span<const DetectionBatch> batches,
                                 double score_threshold) {
  std::vector<bool> out;
  out.reserve(batches.size());
  for (const auto& b : batches) out.push_back(ClassifyImage(b, score_threshold));
  return out;
}

ConfusionCounts CountConfusion(const std::vector<bool>& actual,
                               const std::vector<bool>& predicted) {
  if (actual.size() != predicted.size()) {
    throw std::invalid_argument("CountConfusion: length mismatch");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i]) {
      predicted[i] ? ++c.tp : ++c.fn;
    } else {
      predicted[i] ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

double Ratio::PercentTruncated() const {
  const std::int64_t basis_points = numerator * 10000 / denominator;
  return static_cast<double>(basis_points) / 100.0;
}

std::string Ratio::FormatPercent() const {
  const std::int64_t bp = numerator * 10000 / denominator;
  const std::int64_t frac = bp % 100;
  return std::to_string(bp / 100) + "." + (frac < 10 ? "0" : "") +
         std::to_string(frac) + "%";
}

ClassificationMetrics ComputeClassificationMetrics(const ConfusionCounts& c) {
  if (c.tp < 0 || c.fp < 0 || c.tn < 0 || c.fn < 0) {
    throw ValidationError("confusion counts must be non-negative");
  }
  ClassificationMetrics m;
  if (c.total() > 0) m.accuracy = Ratio{c.tp + c.tn, c.total()};
  if (c.tp + c.fp > 0) m.precision = Ratio{c.tp, c.tp + c.fp};
  if (c.tp + c.fn > 0) m.recall = Ratio{c.tp, c.tp + c.fn};
  return m;
}

EvalReport Evaluate(const DatasetManifest& manifest,
                    std::span<const Detection> detections, const EvalOptions& options) {
  if (!(options.score_threshold >= 0.0 && options.score_threshold <= 1.0)) {
    throw ValidationError("score threshold must lie in [0, 1]");
  }
  std::map<std::string, std::vector<Detection>> by_image;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const auto& d = detections[i];
    if (manifest.Find(d.image_id) == nullptr) {
      throw ValidationError("detection " + std::to_string(i) + " references unknown image \"" +
                            d.image_id + "\"");
    }
    if (!manifest.label_map.Contains(d.label_id)) {
      throw ValidationError("detection " + std::to_string(i) + " has label_id " +
                            std::to_string(d.label_id) + " not in the label map");
    }
    by_image[d.image_id].push_back(d);
  }

  EvalReport report;
  report.iou_threshold = options.iou_threshold;
  report.score_threshold = options.score_threshold;

  std::vector<ImageEntry> images;
  std::vector<MatchResult> matches;
  std::vector<bool> actual;
  std::vector<bool> predicted;
  static const std::vector<Detection> kNone;
  for (const auto& image : manifest.images) {
    if (options.image_filter && !options.image_filter->contains(image.id)) continue;
    auto it = by_image.find(image.id);
    const auto& dets = it == by_image.end() ? kNone : it->second;
    matches.push_back(MatchDetections(dets, image, options.iou_threshold));
    actual.push_back(!image.ground_truth.empty());
    predicted.push_back(
        ClassifyImage(DetectionBatch::FromDetections(image.id, dets), options.score_threshold));
    images.push_back(image);
  }
  report.images_evaluated = images.size();

  for (const auto& entry : manifest.label_map.entries()) {
    const std::size_t positives = CountPositives(images, entry.id);
    PrCurve curve = BuildPrCurve(matches, entry.id, positives);
    ClassAp ap;
    ap.label_id = entry.id;
    ap.name = entry.name;
    ap.positives = positives;
    ap.detections = curve.samples.size();
    ap.ap_continuous = AveragePrecision(curve, ApMethod::kContinuousArea);
    ap.ap_eleven_point = AveragePrecision(curve, ApMethod::kElevenPoint);
    report.per_class_ap.push_back(ap);
    report.curves.push_back(std::move(curve));
  }
  report.map_continuous = MeanAveragePrecision(report.per_class_ap, ApMethod::kContinuousArea);
  report.map_eleven_point = MeanAveragePrecision(report.per_class_ap, ApMethod::kElevenPoint);

  report.counts = CountConfusion(actual, predicted);
  const auto cm = ComputeClassificationMetrics(report.counts);
  if (cm.accuracy) report.accuracy = cm.accuracy->PercentTruncated();
  if (cm.precision) report.precision = cm.precision->PercentTruncated();
  if (cm.recall) report.recall = cm.recall->PercentTruncated();
  return report;
}

namespace {

OrderedJson OptionalNumber(const std::optional<double>& v) {
  return v ? OrderedJson(*v) : OrderedJson(nullptr);
}

std::optional<double> ReadOptionalNumber(const Json& obj, std::string_view key,
                                         const std::string& ctx) {
  const Json& v = internal::RequireField(obj, key, ctx);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number()) {
    throw ParseError(ctx + "." + std::string(key) + ": expected a number or null");
  }
  return v.get<double>();
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

std::string SerializeEvalReport(const EvalReport& report) {
  OrderedJson root;
  root["map_continuous"] = OptionalNumber(report.map_continuous);
  root["map_eleven_point"] = OptionalNumber(report.map_eleven_point);
  OrderedJson classes = OrderedJson::array();
  for (const auto& c : report.per_class_ap) {
    classes.push_back({{"label_id", c.label_id},
                       {"name", c.name},
                       {"positives", c.positives},
                       {"detections", c.detections},
                       {"ap_continuous", c.ap_continuous},
                       {"ap_eleven_point", c.ap_eleven_point}});
  }
  root["per_class_ap"] = std::move(classes);
  root["iou_threshold"] = report.iou_threshold;
  root["score_threshold"] = report.score_threshold;
  root["accuracy"] = OptionalNumber(report.accuracy);
  root["precision"] = OptionalNumber(report.precision);
  root["recall"] = OptionalNumber(report.recall);
  root["counts"] = {{"tp", report.counts.tp},
                    {"fp", report.counts.fp},
                    {"tn", report.counts.tn},
                    {"fn", report.counts.fn}};
  return internal::Dump(root);
}

EvalReport ParseEvalReport(std::string_view json_text, std::string_view source_name) {
  const std::string src(source_name);
  const Json root = internal::ParseJsonText(json_text, src);
  if (!root.is_object()) throw ParseError(src + ": top level must be an object");
  EvalReport r;
  r.map_continuous = ReadOptionalNumber(root, "map_continuous", src);
  r.map_eleven_point = ReadOptionalNumber(root, "map_eleven_point", src);
  const Json& classes = internal::RequireArray(root, "per_class_ap", src);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const std::string ctx = src + ".per_class_ap[" + std::to_string(i) + "]";
    ClassAp c;
    c.label_id = static_cast<int>(internal::RequireInteger(classes[i], "label_id", ctx));
    c.name = internal::RequireString(classes[i], "name", ctx);
    c.positives = static_cast<std::size_t>(internal::RequireInteger(classes[i], "positives", ctx));
    c.detections =
        static_cast<std::size_t>(internal::RequireInteger(classes[i], "detections", ctx));
    c.ap_continuous = internal::RequireNumber(classes[i], "ap_continuous", ctx);
    c.ap_eleven_point = internal::RequireNumber(classes[i], "ap_eleven_point", ctx);
    r.per_class_ap.push_back(std::move(c));
  }
  r.iou_threshold = internal::RequireNumber(root, "iou_threshold", src);
  r.score_threshold = internal::RequireNumber(root, "score_threshold", src);
  r.accuracy = ReadOptionalNumber(root, "accuracy", src);
  r.precision = ReadOptionalNumber(root, "precision", src);
  r.recall = ReadOptionalNumber(root, "recall", src);
  const Json& counts = internal::RequireField(root, "counts", src);
  const std::string cctx = src + ".counts";
  r.counts.tp = internal::RequireInteger(counts, "tp", cctx);
  r.counts.fp = internal::RequireInteger(counts, "fp", cctx);
  r.counts.tn = internal::RequireInteger(counts, "tn", cctx);
  r.counts.fn = internal::RequireInteger(counts, "fn", cctx);
  return r;
}

std::string PrCurveToCsv(const PrCurve& curve) {
  std::string out = "rank,score,recall,precision\n";
  for (std::size_t k = 0; k < curve.samples.size(); ++k) {
    const auto& s = curve.samples[k];
    out += std::to_string(k + 1) + "," + FormatDouble(s.score) + "," +
           FormatDouble(s.recall) + "," + FormatDouble(s.precision) + "\n";
  }
  return out;
}

}  // namespace algaeval
