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

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <random>

#include "algaeval/errors.h"
#include "test_support.h"

namespace algaeval {
namespace {

constexpr auto kPx = CoordinateSpace::kPixel;
constexpr auto kNorm = CoordinateSpace::kNormalized;

ImageEntry OneBoxImage(const std::string& id = "img") {
  // 100x100 image, ground truth at pixels (10,10)-(50,50).
  return {id, id + ".ppm", {100, 100}, {{1, BoundingBox(10, 10, 50, 50, kPx)}}};
}

Detection Det(const std::string& image, double score, double x0, double y0, double x1,
              double y1, int label = 1) {
  return {image, label, score, BoundingBox(x0, y0, x1, y1, kNorm)};
}

TEST(MatchTest, SingleGoodDetectionIsTruePositive) {
  const std::vector<Detection> d{Det("img", 0.8, 0.1, 0.1, 0.5, 0.48)};
  const auto m = MatchDetections(d, OneBoxImage(), 0.5);
  ASSERT_EQ(m.records.size(), 1u);
  EXPECT_EQ(m.records[0].outcome, MatchOutcome::kTruePositive);
  EXPECT_EQ(m.records[0].matched_gt, 0u);
  EXPECT_NEAR(m.records[0].iou, 0.95, 1e-12);
}

TEST(MatchTest, SecondDetectionOfSameObjectIsDuplicate) {
  const std::vector<Detection> d{Det("img", 0.8, 0.1, 0.1, 0.5, 0.5),
                                 Det("img", 0.9, 0.1, 0.1, 0.5, 0.49)};
  const auto m = MatchDetections(d, OneBoxImage(), 0.5);
  ASSERT_EQ(m.records.size(), 2u);
  EXPECT_EQ(m.records[0].detection.score, 0.9);
  EXPECT_EQ(m.records[0].outcome, MatchOutcome::kTruePositive);
  EXPECT_EQ(m.records[1].outcome, MatchOutcome::kFalsePositiveDuplicate);
  EXPECT_FALSE(m.records[1].matched_gt.has_value());
}

TEST(MatchTest, NoGroundTruthMeansNoMatch) {
  const ImageEntry empty{"e", "e.ppm", {10, 10}, {}};
  const std::vector<Detection> d{Det("e", 0.9, 0, 0, 1, 1)};
  const auto m = MatchDetections(d, empty, 0.5);
  EXPECT_EQ(m.records[0].outcome, MatchOutcome::kFalsePositiveNoMatch);
}

TEST(MatchTest, ThresholdIsStrict) {
  // IoU exactly 0.5: box (10,10)-(50,30) against (10,10)-(50,50).
  const std::vector<Detection> d{Det("img", 0.9, 0.1, 0.1, 0.5, 0.3)};
  const auto m = MatchDetections(d, OneBoxImage(), 0.5);
  EXPECT_DOUBLE_EQ(m.records[0].iou, 0.5);
  EXPECT_EQ(m.records[0].outcome, MatchOutcome::kFalsePositiveNoMatch);
}

TEST(MatchTest, ClassAware) {
  const std::vector<Detection> d{Det("img", 0.9, 0.1, 0.1, 0.5, 0.5, 2)};
  EXPECT_EQ(MatchDetections(d, OneBoxImage(), 0.5).records[0].outcome,
            MatchOutcome::kFalsePositiveNoMatch);
}

TEST(MatchTest, RejectsForeignImageAndBadThreshold) {
  const std::vector<Detection> d{Det("other", 0.9, 0, 0, 1, 1)};
  EXPECT_THROW(MatchDetections(d, OneBoxImage(), 0.5), ValidationError);
  EXPECT_THROW(MatchDetections({}, OneBoxImage(), 0.0), ValidationError);
  EXPECT_THROW(MatchDetections({}, OneBoxImage(), 1.5), ValidationError);
}

TEST(PrCurveTest, SingleTruePositive) {
  const std::vector<Detection> d{Det("img", 0.9, 0.1, 0.1, 0.5, 0.5)};
  const std::vector<MatchResult> m{MatchDetections(d, OneBoxImage(), 0.5)};
  const auto c = BuildPrCurve(m, 1, 1);
  ASSERT_EQ(c.samples.size(), 1u);
  EXPECT_EQ(c.samples[0].recall, 1.0);
  EXPECT_EQ(c.samples[0].precision, 1.0);
}

TEST(PrCurveTest, TruePositiveThenDuplicate) {
  const std::vector<Detection> d{Det("img", 0.9, 0.1, 0.1, 0.5, 0.5),
                                 Det("img", 0.8, 0.1, 0.1, 0.5, 0.5)};
  const std::vector<MatchResult> m{MatchDetections(d, OneBoxImage(), 0.5)};
  const auto c = BuildPrCurve(m, 1, 1);
  ASSERT_EQ(c.samples.size(), 2u);
  EXPECT_EQ(c.samples[0].recall, 1.0);
  EXPECT_EQ(c.samples[0].precision, 1.0);
  EXPECT_EQ(c.samples[1].recall, 1.0);
  EXPECT_EQ(c.samples[1].precision, 0.5);
  EXPECT_EQ(AveragePrecision(c, ApMethod::kContinuousArea), 1.0);
  EXPECT_EQ(AveragePrecision(c, ApMethod::kElevenPoint), 1.0);
}

TEST(PrCurveTest, NoPositivesFlagsCurveAndGivesZeroAp) {
  const ImageEntry empty{"e", "e.ppm", {10, 10}, {}};
  const std::vector<Detection> d{Det("e", 0.9, 0, 0, 1, 1), Det("e", 0.5, 0, 0, 0.5, 0.5),
                                 Det("e", 0.1, 0, 0, 0.2, 0.2)};
  const std::vector<MatchResult> m{MatchDetections(d, empty, 0.5)};
  const auto c = BuildPrCurve(m, 1, 0);
  EXPECT_TRUE(c.empty_positives());
  EXPECT_EQ(c.samples.size(), 3u);
  EXPECT_EQ(AveragePrecision(c), 0.0);
  EXPECT_EQ(AveragePrecision(c, ApMethod::kElevenPoint), 0.0);
}

TEST(PrCurveTest, PoolsAcrossImagesWithDeterministicTies) {
  const std::vector<Detection> a{Det("b_img", 0.7, 0.1, 0.1, 0.5, 0.5)};
  const std::vector<Detection> b{Det("a_img", 0.7, 0.6, 0.6, 0.9, 0.9)};
  const std::vector<MatchResult> m{MatchDetections(a, OneBoxImage("b_img"), 0.5),
                                   MatchDetections(b, OneBoxImage("a_img"), 0.5)};
  const auto c = BuildPrCurve(m, 1, 2);
  ASSERT_EQ(c.samples.size(), 2u);
  // a_img sorts first: its miss comes before b_img's hit.
  EXPECT_FALSE(c.samples[0].true_positive);
  EXPECT_TRUE(c.samples[1].true_positive);
  EXPECT_EQ(c.samples[1].precision, 0.5);
  EXPECT_EQ(c.samples[1].recall, 0.5);
}

PrCurve CurveFromOutcomes(const std::vector<bool>& is_tp, std::size_t positives) {
  PrCurve c;
  c.positives_total = positives;
  std::size_t tp = 0;
  for (std::size_t k = 0; k < is_tp.size(); ++k) {
    tp += is_tp[k];
    c.samples.push_back({1.0 - 0.01 * static_cast<double>(k),
                         static_cast<double>(tp) / static_cast<double>(positives),
                         static_cast<double>(tp) / static_cast<double>(k + 1), is_tp[k]});
  }
  return c;
}

TEST(AveragePrecisionTest, HandComputedEnvelope) {
  // TP FP TP with 3 positives: recall steps 1/3 at p=1 and 2/3 at p=2/3.
  // Envelope area = 1/3 * 1 + 1/3 * 2/3 = 5/9.
  const auto c = CurveFromOutcomes({true, false, true}, 3);
  EXPECT_NEAR(AveragePrecision(c), 5.0 / 9.0, 1e-15);
  // Eleven point: r=0..0.3 -> 1 (4 levels), r=0.4..0.6 -> 2/3 (3), r>=0.7 -> 0 (4).
  EXPECT_NEAR(AveragePrecision(c, ApMethod::kElevenPoint), (4.0 + 3.0 * 2.0 / 3.0) / 11.0, 1e-15);
}

TEST(AveragePrecisionTest, PerfectDetector) {
  const auto c = CurveFromOutcomes({true}, 1);
  EXPECT_EQ(AveragePrecision(c), 1.0);
  EXPECT_EQ(AveragePrecision(c, ApMethod::kElevenPoint), 1.0);
}

TEST(AveragePrecisionTest, EmptyCurveIsZero) {
  PrCurve c;
  c.positives_total = 4;
  EXPECT_EQ(AveragePrecision(c), 0.0);
}

TEST(AveragePrecisionTest, MatchesBruteForceOracleOnRandomSequences) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t positives = 1 + rng() % 5;
    const std::size_t n = rng() % 16;
    std::vector<bool> is_tp;
    std::size_t tp = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const bool hit = tp < positives && rng() % 2 == 0;
      tp += hit;
      is_tp.push_back(hit);
    }
    EXPECT_NEAR(AveragePrecision(CurveFromOutcomes(is_tp, positives)),
                testing::BruteForceContinuousAp(is_tp, positives), 1e-12);
  }
}

TEST(MeanApTest, ArithmeticMeanOverEvaluableClasses) {
  std::vector<ClassAp> one{{1, "algae", 3, 5, 0.42, 0.40}};
  EXPECT_DOUBLE_EQ(MeanAveragePrecision(one), 0.42);
  std::vector<ClassAp> two{{1, "a", 1, 1, 1.0, 1.0}, {2, "b", 2, 1, 0.0, 0.0}};
  EXPECT_DOUBLE_EQ(MeanAveragePrecision(two), 0.5);
  two.push_back({3, "c", 0, 4, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(MeanAveragePrecision(two), 0.5);
  std::vector<ClassAp> none{{1, "a", 0, 2, 0.0, 0.0}};
  EXPECT_THROW(MeanAveragePrecision(none), ValidationError);
}

TEST(ClassifyTest, StrictScoreThreshold) {
  auto batch = [](std::vector<double> scores) {
    std::vector<Detection> d;
    for (double s : scores) d.push_back(Det("x", s, 0, 0, 1, 1));
    return DetectionBatch::FromDetections("x", d);
  };
  EXPECT_TRUE(ClassifyImage(batch({0.51})));
  EXPECT_FALSE(ClassifyImage(batch({0.50})));
  EXPECT_FALSE(ClassifyImage(batch({})));
  EXPECT_TRUE(ClassifyImage(batch({0.1, 0.2, 0.9})));
  const std::vector<DetectionBatch> all{batch({0.6}), batch({0.4})};
  EXPECT_EQ(ClassifyImages(all), (std::vector<bool>{true, false}));
}

TEST(ClassificationMetricsTest, ReferenceCountsAtTwoDecimals) {
  struct Row {
    ConfusionCounts counts;
    const char* accuracy;
    const char* precision;
    const char* recall;
  };
  // Counts against 52 positive / 48 negative test images.
  const Row rows[] = {
      {{47, 13, 35, 5}, "82.00%", "78.33%", "90.38%"},
      {{37, 13, 35, 15}, "72.00%", "74.00%", "71.15%"},
      {{25, 23, 25, 27}, "50.00%", "52.08%", "48.07%"},
  };
  for (const auto& row : rows) {
    const auto m = ComputeClassificationMetrics(row.counts);
    EXPECT_EQ(m.accuracy->FormatPercent(), row.accuracy);
    EXPECT_EQ(m.precision->FormatPercent(), row.precision);
    EXPECT_EQ(m.recall->FormatPercent(), row.recall);
  }
}

TEST(ClassificationMetricsTest, UndefinedRatiosAreNotZero) {
  const auto m = ComputeClassificationMetrics({0, 0, 10, 0});
  ASSERT_TRUE(m.accuracy.has_value());
  EXPECT_EQ(m.accuracy->value(), 1.0);
  EXPECT_FALSE(m.precision.has_value());
  EXPECT_FALSE(m.recall.has_value());
  EXPECT_FALSE(ComputeClassificationMetrics({}).accuracy.has_value());
}

TEST(ClassificationMetricsTest, IdentitiesHoldOnRandomCounts) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const ConfusionCounts c{static_cast<std::int64_t>(rng() % 60) + 1,
                            static_cast<std::int64_t>(rng() % 60),
                            static_cast<std::int64_t>(rng() % 60),
                            static_cast<std::int64_t>(rng() % 60)};
    const auto m = ComputeClassificationMetrics(c);
    EXPECT_NEAR(m.accuracy->value() * static_cast<double>(c.total()),
                static_cast<double>(c.tp + c.tn), 1e-9);
    EXPECT_NEAR(m.recall->value() * static_cast<double>(c.tp + c.fn),
                static_cast<double>(c.tp), 1e-9);
    EXPECT_EQ(m.accuracy->numerator, c.tp + c.tn);
  }
}

TEST(ConfusionTest, CountsByQuadrant) {
  EXPECT_EQ(CountConfusion({true, true, false, false}, {true, false, true, false}),
            (ConfusionCounts{1, 1, 1, 1}));
}

// Random instances: ground truth plus detections jittered around it.
struct RandomInstance {
  ImageEntry image;
  std::vector<Detection> detections;
};

RandomInstance MakeRandomInstance(std::mt19937_64& rng, const std::string& id) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RandomInstance inst;
  inst.image = {id, id + ".ppm", {200, 150}, {}};
  const int n_gt = static_cast<int>(rng() % 6);
  for (int g = 0; g < n_gt; ++g) {
    const double x = u(rng) * 150, y = u(rng) * 100;
    inst.image.ground_truth.push_back(
        {1, BoundingBox(x, y, x + 10 + u(rng) * 40, y + 10 + u(rng) * 40, kPx)});
  }
  const int n_det = static_cast<int>(rng() % 16);
  for (int k = 0; k < n_det; ++k) {
    BoundingBox px;
    if (n_gt > 0 && u(rng) < 0.7) {
      const auto& g = inst.image.ground_truth[rng() % n_gt].box;
      const double j = 8.0;
      px = BoundingBox(g.x_min() + (u(rng) - 0.5) * j, g.y_min() + (u(rng) - 0.5) * j,
                       g.x_max() + (u(rng) - 0.5) * j, g.y_max() + (u(rng) - 0.5) * j, kPx);
    } else {
      const double x = u(rng) * 180, y = u(rng) * 130;
      px = BoundingBox(x, y, x + u(rng) * 20, y + u(rng) * 20, kPx);
    }
    px = ClampToImage(px, inst.image.size).box;
    inst.detections.push_back({id, 1, u(rng), Normalize(px, inst.image.size)});
  }
  return inst;
}

TEST(MatchPropertyTest, EachGroundTruthClaimedAtMostOnce) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const auto inst = MakeRandomInstance(rng, "r");
    const auto m = MatchDetections(inst.detections, inst.image, 0.5);
    std::vector<int> claims(inst.image.ground_truth.size(), 0);
    for (const auto& r : m.records) {
      if (r.outcome == MatchOutcome::kTruePositive) ++claims[*r.matched_gt];
    }
    for (int c : claims) EXPECT_LE(c, 1);
    EXPECT_LE(m.CountTruePositives(), inst.image.ground_truth.size());
    for (std::size_t k = 1; k < m.records.size(); ++k) {
      EXPECT_GE(m.records[k - 1].detection.score, m.records[k].detection.score);
    }
  }
}

TEST(MatchPropertyTest, RaisingThresholdNeverAddsTruePositives) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = MakeRandomInstance(rng, "r");
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (double t = 0.05; t <= 1.0; t += 0.05) {
      const std::size_t tp = MatchDetections(inst.detections, inst.image, t).CountTruePositives();
      EXPECT_LE(tp, prev);
      prev = tp;
    }
  }
}

TEST(ApPropertyTest, InvariantUnderMonotoneScoreRescaling) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    auto inst = MakeRandomInstance(rng, "r");
    const std::size_t positives = inst.image.ground_truth.size();
    const std::vector<MatchResult> m1{MatchDetections(inst.detections, inst.image, 0.5)};
    for (auto& d : inst.detections) d.score = d.score * d.score * 0.5 + 0.1;
    const std::vector<MatchResult> m2{MatchDetections(inst.detections, inst.image, 0.5)};
    EXPECT_EQ(AveragePrecision(BuildPrCurve(m1, 1, positives)),
              AveragePrecision(BuildPrCurve(m2, 1, positives)));
  }
}

TEST(PrCurvePropertyTest, PrecisionIsExactRatioAndRecallMonotone) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = MakeRandomInstance(rng, "a");
    const auto b = MakeRandomInstance(rng, "b");
    const std::vector<MatchResult> m{MatchDetections(a.detections, a.image, 0.5),
                                     MatchDetections(b.detections, b.image, 0.5)};
    const std::size_t positives = a.image.ground_truth.size() + b.image.ground_truth.size();
    const auto c = BuildPrCurve(m, 1, positives);
    EXPECT_EQ(c.samples.size(), a.detections.size() + b.detections.size());
    std::size_t tp = 0;
    for (std::size_t k = 0; k < c.samples.size(); ++k) {
      tp += c.samples[k].true_positive;
      EXPECT_EQ(c.samples[k].precision, static_cast<double>(tp) / static_cast<double>(k + 1));
      if (k > 0) {
        EXPECT_GE(c.samples[k].recall, c.samples[k - 1].recall);
      }
    }
  }
}

DatasetManifest TwoImageManifest() {
  DatasetManifest m;
  m.label_map = DefaultLabelMap();
  m.images.push_back(OneBoxImage("pos"));
  m.images.push_back({"neg", "neg.ppm", {100, 100}, {}});
  return m;
}

TEST(EvaluateTest, PerfectDetections) {
  const auto m = TwoImageManifest();
  const std::vector<Detection> d{Det("pos", 0.9, 0.1, 0.1, 0.5, 0.5)};
  const auto r = Evaluate(m, d);
  EXPECT_EQ(r.map_continuous, 1.0);
  EXPECT_EQ(r.map_eleven_point, 1.0);
  EXPECT_EQ(r.counts, (ConfusionCounts{1, 0, 1, 0}));
  EXPECT_EQ(r.accuracy, 100.0);
}

TEST(EvaluateTest, NoDetections) {
  const auto r = Evaluate(TwoImageManifest(), {});
  EXPECT_EQ(r.map_continuous, 0.0);
  EXPECT_EQ(r.recall, 0.0);
  EXPECT_FALSE(r.precision.has_value());
}

TEST(EvaluateTest, ImageFilterRestrictsEvaluation) {
  const auto m = TwoImageManifest();
  const std::vector<Detection> d{Det("neg", 0.9, 0.1, 0.1, 0.5, 0.5),
                                 Det("pos", 0.8, 0.1, 0.1, 0.5, 0.5)};
  EvalOptions opt;
  opt.image_filter = std::set<std::string>{"pos"};
  const auto r = Evaluate(m, d, opt);
  EXPECT_EQ(r.images_evaluated, 1u);
  EXPECT_EQ(r.map_continuous, 1.0);
  // Including the negative image, its false positive outranks the hit.
  EXPECT_EQ(Evaluate(m, d).map_continuous, 0.5);
}

TEST(EvaluateTest, RejectsUnknownImageOrLabel) {
  const auto m = TwoImageManifest();
  const std::vector<Detection> ghost{Det("ghost", 0.9, 0, 0, 1, 1)};
  EXPECT_THROW(Evaluate(m, ghost), ValidationError);
  const std::vector<Detection> alien{Det("pos", 0.9, 0, 0, 1, 1, 7)};
  EXPECT_THROW(Evaluate(m, alien), ValidationError);
}

TEST(EvaluateTest, NoGroundTruthAnywhereIsAnError) {
  DatasetManifest m;
  m.label_map = DefaultLabelMap();
  m.images.push_back({"neg", "neg.ppm", {10, 10}, {}});
  EXPECT_THROW(Evaluate(m, {}), ValidationError);
}

TEST(ReportTest, JsonRoundTripIsByteStable) {
  const auto m = TwoImageManifest();
  const std::vector<Detection> d{Det("pos", 0.9, 0.1, 0.1, 0.5, 0.5),
                                 Det("neg", 0.3, 0.1, 0.1, 0.5, 0.5)};
  const std::string text = SerializeEvalReport(Evaluate(m, d));
  EXPECT_EQ(SerializeEvalReport(ParseEvalReport(text)), text);
  for (const char* field : {"map_continuous", "map_eleven_point", "per_class_ap", "iou_threshold",
                            "score_threshold", "accuracy", "precision", "recall", "counts"}) {
    EXPECT_THAT(text, ::testing::HasSubstr(std::string("\"") + field + "\""));
  }
}

TEST(ReportTest, PrCsvLayout) {
  const auto c = CurveFromOutcomes({true, false}, 1);
  EXPECT_EQ(PrCurveToCsv(c), "rank,score,recall,precision\n1,1,1,1\n2,0.99,1,0.5\n");
}

}  // namespace
}  // namespace algaeval
