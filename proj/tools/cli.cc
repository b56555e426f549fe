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

#include "cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "algaeval/backend.h"
#include "algaeval/baseline_detector.h"
#include "algaeval/dataset.h"
#include "algaeval/detection.h"
#include "algaeval/errors.h"
#include "algaeval/file_util.h"
#include "algaeval/image.h"
#include "algaeval/metrics.h"
#include "algaeval/overlay.h"

namespace algaeval::cli {
namespace {

namespace fs = std::filesystem;

// Thrown for bad flag values so the message can name the flag.
class FlagError : public std::runtime_error {
 public:
  FlagError(const std::string& flag, const std::string& what)
      : std::runtime_error(flag + ": " + what) {}
};

std::string Percent(const std::optional<double>& pct) {
  if (!pct) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", *pct);
  return buf;
}

std::string Fraction(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", *v * 100.0);
  return buf;
}

// One row per model, columns as in the usual detector comparison table.
void PrintSummary(const std::string& model, const std::optional<double>& accuracy,
                  const std::optional<double>& precision, const std::optional<double>& recall,
                  const std::optional<double>& map, const std::optional<double>& fps) {
  char fps_text[32] = "-";
  if (fps) std::snprintf(fps_text, sizeof(fps_text), "%.2f", *fps);
  std::printf("%-20s %10s %10s %10s %10s %10s\n", "Model", "Accuracy", "Precision", "Recall",
              "mAP", "FPS");
  std::printf("%-20s %10s %10s %10s %10s %10s\n", model.c_str(), Percent(accuracy).c_str(),
              Percent(precision).c_str(), Percent(recall).c_str(), Fraction(map).c_str(),
              fps_text);
}

SplitRatios ParseRatios(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw FlagError("--ratios", "not a number: \"" + part + "\"");
    }
  }
  if (values.size() != 3) throw FlagError("--ratios", "expected train,val,test");
  SplitRatios r{values[0], values[1], values[2]};
  try {
    ValidateRatios(r);
  } catch (const ValidationError& e) {
    throw FlagError("--ratios", e.what());
  }
  return r;
}

Rgb ParseColor(const std::string& text) {
  std::vector<int> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      v.push_back(std::stoi(part));
    } catch (const std::exception&) {
      throw FlagError("--color", "expected R,G,B");
    }
  }
  if (v.size() != 3) throw FlagError("--color", "expected R,G,B");
  Rgb out{};
  for (int i = 0; i < 3; ++i) {
    if (v[i] < 0 || v[i] > 255) throw FlagError("--color", "channel out of 0..255");
    out[i] = static_cast<std::uint8_t>(v[i]);
  }
  return out;
}

LabelMap LoadLabelMapText(const std::string& path) {
  return LabelMap::FromText(ReadFileToString(path));
}

// split

struct SplitArgs {
  std::string manifest;
  std::string ratios = "0.7,0.2,0.1";
  std::uint64_t seed = 0;
  std::string output;
};

int RunSplit(const SplitArgs& a) {
  const SplitRatios ratios = ParseRatios(a.ratios);
  const DatasetManifest manifest = LoadManifest(a.manifest);
  const SplitAssignment split = SplitDataset(manifest, ratios, a.seed);
  WriteFileAtomic(a.output, SerializeSplit(split));
  const auto c = split.Counts();
  std::printf("train %zu  val %zu  test %zu  (seed %llu)\n", c[0], c[1], c[2],
              static_cast<unsigned long long>(a.seed));
  return kExitOk;
}

// evaluate

struct EvaluateArgs {
  std::string manifest;
  std::string detections;
  std::string split_file;
  std::string subset = "test";
  std::string label_map;
  double iou_threshold = 0.5;
  double score_threshold = 0.5;
  std::string ap_method = "continuous";
  std::string output = "report.json";
  std::string pr_csv;
  std::string benchmark_report;
  std::string name;
};

int RunEvaluate(const EvaluateArgs& a) {
  const auto method = ParseApMethod(a.ap_method);
  if (!method) throw FlagError("--ap-method", "expected continuous or eleven-point");
  if (!(a.iou_threshold > 0.0 && a.iou_threshold <= 1.0)) {
    throw FlagError("--iou-threshold", "must lie in (0, 1]");
  }
  if (!(a.score_threshold >= 0.0 && a.score_threshold <= 1.0)) {
    throw FlagError("--score-threshold", "must lie in [0, 1]");
  }
  DatasetManifest manifest = LoadManifest(a.manifest);
  if (!a.label_map.empty()) {
    manifest.label_map = LoadLabelMapText(a.label_map);
    ValidateManifest(manifest);
  }
  const std::vector<Detection> detections = LoadDetections(a.detections);
  std::optional<double> fps;
  if (!a.benchmark_report.empty()) {
    fps = ParseBenchmarkReport(ReadFileToString(a.benchmark_report), a.benchmark_report).fps;
  }

  EvalOptions options;
  options.iou_threshold = a.iou_threshold;
  options.score_threshold = a.score_threshold;
  if (!a.split_file.empty()) {
    const auto subset = ParseSubset(a.subset);
    if (!subset) throw FlagError("--subset", "expected train, val or test");
    const SplitAssignment split = LoadSplit(a.split_file);
    for (const auto& [id, _] : split.assignments) {
      if (manifest.Find(id) == nullptr) {
        throw ValidationError("split names image \"" + id + "\" absent from the manifest");
      }
    }
    const auto members = split.Members(*subset);
    options.image_filter.emplace(members.begin(), members.end());
  }

  const EvalReport report = Evaluate(manifest, detections, options);
  WriteFileAtomic(a.output, SerializeEvalReport(report));
  if (!a.pr_csv.empty()) {
    for (const auto& curve : report.curves) {
      fs::path path = a.pr_csv;
      if (report.curves.size() > 1) {
        path = path.parent_path() / (path.stem().string() + "_class" +
                                     std::to_string(curve.label_id) + path.extension().string());
      }
      WriteFileAtomic(path, PrCurveToCsv(curve));
    }
  }

  const std::string model = a.name.empty() ? fs::path(a.detections).stem().string() : a.name;
  std::printf("images evaluated: %zu  iou>%.2f  score>%.2f  ap=%s\n", report.images_evaluated,
              report.iou_threshold, report.score_threshold,
              std::string(ApMethodName(*method)).c_str());
  PrintSummary(model, report.accuracy, report.precision, report.recall, report.map(*method), fps);
  std::printf("tp %lld  fp %lld  tn %lld  fn %lld\n", static_cast<long long>(report.counts.tp),
              static_cast<long long>(report.counts.fp), static_cast<long long>(report.counts.tn),
              static_cast<long long>(report.counts.fn));
  return kExitOk;
}

// visualize

struct VisualizeArgs {
  std::string image;
  std::string detections;
  std::string image_id;
  std::string label_map;
  double score_threshold = 0.5;
  bool paper_compat = false;
  std::string color = "0,255,0";
  int stroke = 2;
  bool no_labels = false;
  std::string output;
};

int RunVisualize(const VisualizeArgs& a) {
  if (a.stroke < 1) throw FlagError("--stroke", "must be >= 1");
  if (!(a.score_threshold >= 0.0 && a.score_threshold <= 1.0)) {
    throw FlagError("--score-threshold", "must lie in [0, 1]");
  }
  OverlaySpec spec;
  spec.color = ParseColor(a.color);
  spec.stroke = a.stroke;
  spec.labels = !a.no_labels;
  const LabelMap labels = a.label_map.empty() ? DefaultLabelMap() : LoadLabelMapText(a.label_map);

  const Image image = ReadImage(a.image);
  const std::string id = a.image_id.empty() ? fs::path(a.image).stem().string() : a.image_id;
  std::vector<Detection> mine;
  for (auto& d : LoadDetections(a.detections)) {
    if (d.image_id == id) mine.push_back(std::move(d));
  }
  const DetectionBatch batch = DetectionBatch::FromDetections(id, mine);
  const auto boxes = ThresholdAndConvert(
      batch, image.size(), a.score_threshold,
      a.paper_compat ? ConversionMode::kPaperCompat : ConversionMode::kDefault);
  WriteImage(RenderOverlay(image, boxes, spec, labels), a.output);

  int clamped = 0;
  for (const auto& b : boxes) clamped += b.clamped ? 1 : 0;
  std::printf("%s: %zu of %zu detections above %.2f", id.c_str(), boxes.size(), mine.size(),
              a.score_threshold);
  if (clamped > 0) std::printf(", %d clamped to the image", clamped);
  std::printf("\n");
  return kExitOk;
}

// Frames and detector configuration shared by benchmark and baseline-detect.

struct FrameArgs {
  std::vector<std::string> images;
  std::string frames_dir;
  std::string manifest;
};

std::vector<Frame> CollectFrames(const FrameArgs& a) {
  std::vector<Frame> frames;
  if (!a.manifest.empty()) {
    const DatasetManifest m = LoadManifest(a.manifest);
    for (const auto& image : m.images) frames.push_back({image.id, m.ResolvePath(image)});
  }
  if (!a.frames_dir.empty()) {
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(a.frames_dir)) {
      const auto ext = entry.path().extension().string();
      if (entry.is_regular_file() && (ext == ".ppm" || ext == ".png" || ext == ".PPM" ||
                                      ext == ".PNG")) {
        paths.push_back(entry.path());
      }
    }
    std::sort(paths.begin(), paths.end());
    for (auto& f : FramesFromPaths(paths)) frames.push_back(std::move(f));
  }
  std::vector<fs::path> explicit_paths(a.images.begin(), a.images.end());
  for (auto& f : FramesFromPaths(explicit_paths)) frames.push_back(std::move(f));
  if (frames.empty()) throw FlagError("--frames", "no input images");
  return frames;
}

struct DetectorArgs {
  double hue_min = 70.0;
  double hue_max = 170.0;
  double sat_min = 0.25;
  double val_min = 0.15;
  double min_area_fraction = kDefaultMinAreaFraction;

  ColorThresholds Thresholds() const {
    ColorThresholds t{hue_min, hue_max, sat_min, val_min};
    try {
      t.Validate();
    } catch (const ValidationError& e) {
      throw FlagError("--hue-min/--hue-max/--sat-min/--val-min", e.what());
    }
    if (!(min_area_fraction >= 0.0 && min_area_fraction < 1.0)) {
      throw FlagError("--min-area-fraction", "must lie in [0, 1)");
    }
    return t;
  }
};

void AddDetectorFlags(CLI::App* sub, DetectorArgs& d) {
  sub->add_option("--hue-min", d.hue_min, "lower hue bound in degrees")->capture_default_str();
  sub->add_option("--hue-max", d.hue_max, "upper hue bound in degrees (wraps if < hue-min)")
      ->capture_default_str();
  sub->add_option("--sat-min", d.sat_min, "minimum HSV saturation")->capture_default_str();
  sub->add_option("--val-min", d.val_min, "minimum HSV value")->capture_default_str();
  sub->add_option("--min-area-fraction", d.min_area_fraction,
                  "drop blobs smaller than this fraction of the image")
      ->capture_default_str();
}

// benchmark

struct BenchmarkArgs {
  FrameArgs frames;
  DetectorArgs detector;
  bool builtin = false;
  std::vector<std::string> command;
  int warmup = 10;
  int max_in_flight = 1;
  double timeout_s = 0.0;
  std::string output = "benchmark.json";
  std::string detections_output;
};

int RunBenchmark(const BenchmarkArgs& a) {
  if (a.builtin == !a.command.empty()) {
    throw FlagError("--builtin-baseline", "give either --builtin-baseline or -- <command>");
  }
  if (a.max_in_flight < 1) throw FlagError("--max-in-flight", "must be >= 1");
  const std::vector<Frame> frames = CollectFrames(a.frames);
  if (a.warmup < 0 || static_cast<std::size_t>(a.warmup) >= frames.size()) {
    throw FlagError("--warmup", "must be smaller than the number of frames (" +
                                    std::to_string(frames.size()) + ")");
  }

  std::unique_ptr<DetectorBackend> backend;
  if (a.builtin) {
    const ColorThresholds thresholds = a.detector.Thresholds();
    backend = MakeBaselineBackend(thresholds, a.detector.min_area_fraction);
  } else {
    const auto timeout = a.timeout_s > 0.0 ? std::chrono::duration<double>(a.timeout_s)
                                           : BackendTimeoutFromEnv();
    backend = std::make_unique<ProcessBackend>(a.command, timeout);
  }

  const BenchmarkResult result =
      Benchmark(*backend, frames, {a.warmup, a.max_in_flight});
  WriteFileAtomic(a.output, SerializeBenchmarkReport(result.report));
  if (!a.detections_output.empty()) {
    std::vector<Detection> all;
    for (const auto& o : result.run.outcomes) {
      if (!o.ok()) continue;
      for (auto& d : o.batch->ToDetections()) all.push_back(std::move(d));
    }
    WriteFileAtomic(a.detections_output, SerializeDetections(all));
  }

  const auto& r = result.report;
  std::printf("%s: %lld frames (%lld warmup, %lld failed), max in flight %d\n",
              r.backend.c_str(), static_cast<long long>(r.frames_total),
              static_cast<long long>(r.frames_warmup), static_cast<long long>(r.frames_failed),
              r.max_in_flight);
  std::printf("wall %.3f s  fps %.2f  p50 %.2f ms  p95 %.2f ms\n", r.wall_time_s, r.fps,
              r.latency_p50_ms, r.latency_p95_ms);
  PrintSummary(a.builtin ? "builtin-baseline" : fs::path(a.command[0]).filename().string(),
               std::nullopt, std::nullopt, std::nullopt, std::nullopt, r.fps);
  for (const auto& o : result.run.outcomes) {
    if (!o.ok()) std::fprintf(stderr, "frame %s: %s\n", o.image_id.c_str(), o.error.c_str());
  }
  if (result.run.aborted) {
    std::fprintf(stderr, "run aborted: %s\n", result.run.diagnostics.c_str());
    return kExitBackendFailure;
  }
  return r.frames_failed > 0 ? kExitPartialFailure : kExitOk;
}

// baseline-detect

struct BaselineArgs {
  FrameArgs frames;
  DetectorArgs detector;
  std::string output = "detections.json";
};

int RunBaselineDetect(const BaselineArgs& a) {
  const ColorThresholds thresholds = a.detector.Thresholds();
  const std::vector<Frame> frames = CollectFrames(a.frames);
  std::vector<Detection> all;
  int failed = 0;
  for (const auto& frame : frames) {
    try {
      const DetectionBatch batch = Detect(ReadImage(frame.path), frame.image_id, thresholds,
                                          a.detector.min_area_fraction);
      for (auto& d : batch.ToDetections()) all.push_back(std::move(d));
    } catch (const std::exception& e) {
      ++failed;
      std::fprintf(stderr, "%s: %s\n", frame.path.string().c_str(), e.what());
    }
  }
  WriteFileAtomic(a.output, SerializeDetections(all));
  std::printf("%zu images, %zu detections, %d failed\n", frames.size(), all.size(), failed);
  return failed > 0 ? kExitPartialFailure : kExitOk;
}

void AddFrameFlags(CLI::App* sub, FrameArgs& f) {
  sub->add_option("--frames", f.images, "image files (PNG or binary PPM)");
  sub->add_option("--frames-dir", f.frames_dir, "directory of .png/.ppm images");
  sub->add_option("--manifest", f.manifest, "take images (and their ids) from a manifest");
}

}  // namespace

int Main(int argc, char** argv) {
  CLI::App app{"Evaluation, baseline detection and benchmarking for algae detectors"};
  app.require_subcommand(1);

  SplitArgs split_args;
  auto* split = app.add_subcommand("split", "Assign manifest images to train/val/test");
  split->add_option("--manifest", split_args.manifest, "manifest JSON")->required();
  split->add_option("--ratios", split_args.ratios, "train,val,test fractions")
      ->capture_default_str();
  split->add_option("--seed", split_args.seed, "shuffle seed")->capture_default_str();
  split->add_option("-o,--output", split_args.output, "split JSON to write")->required();

  EvaluateArgs eval_args;
  auto* evaluate = app.add_subcommand("evaluate", "Score detections against a manifest");
  evaluate->add_option("--manifest", eval_args.manifest, "manifest JSON")->required();
  evaluate->add_option("--detections", eval_args.detections, "detections JSON")->required();
  evaluate->add_option("--split-file", eval_args.split_file, "split JSON");
  evaluate->add_option("--subset", eval_args.subset, "train|val|test (with --split-file)")
      ->capture_default_str();
  evaluate->add_option("--label-map", eval_args.label_map, "id:name label map text file");
  evaluate->add_option("--iou-threshold", eval_args.iou_threshold, "match when IoU > this")
      ->capture_default_str();
  evaluate->add_option("--score-threshold", eval_args.score_threshold,
                       "image is positive when a score > this")
      ->capture_default_str();
  evaluate->add_option("--ap-method", eval_args.ap_method, "continuous|eleven-point")
      ->capture_default_str();
  evaluate->add_option("-o,--output", eval_args.output, "report JSON to write")
      ->capture_default_str();
  evaluate->add_option("--pr-csv", eval_args.pr_csv, "precision-recall CSV to write");
  evaluate->add_option("--benchmark-report", eval_args.benchmark_report,
                       "benchmark JSON whose fps fills the FPS column");
  evaluate->add_option("--name", eval_args.name, "model name for the summary table");

  VisualizeArgs vis_args;
  auto* visualize = app.add_subcommand("visualize", "Draw detections onto an image");
  visualize->add_option("--image", vis_args.image, "input image")->required();
  visualize->add_option("--detections", vis_args.detections, "detections JSON")->required();
  visualize->add_option("--image-id", vis_args.image_id, "defaults to the image file stem");
  visualize->add_option("--label-map", vis_args.label_map, "id:name label map text file");
  visualize->add_option("--score-threshold", vis_args.score_threshold, "draw scores > this")
      ->capture_default_str();
  visualize->add_flag("--paper-compat", vis_args.paper_compat,
                      "scale every coordinate by image width");
  visualize->add_option("--color", vis_args.color, "R,G,B")->capture_default_str();
  visualize->add_option("--stroke", vis_args.stroke, "line width in pixels")
      ->capture_default_str();
  visualize->add_flag("--no-labels", vis_args.no_labels, "boxes only");
  visualize->add_option("-o,--output", vis_args.output, ".ppm or .png to write")->required();

  BenchmarkArgs bench_args;
  auto* benchmark = app.add_subcommand("benchmark", "Measure detector throughput and latency");
  AddFrameFlags(benchmark, bench_args.frames);
  AddDetectorFlags(benchmark, bench_args.detector);
  benchmark->add_flag("--builtin-baseline", bench_args.builtin, "use the color baseline");
  benchmark->add_option("--warmup", bench_args.warmup, "untimed leading frames")
      ->capture_default_str();
  benchmark->add_option("--max-in-flight", bench_args.max_in_flight, "outstanding frames")
      ->capture_default_str();
  benchmark->add_option("--timeout", bench_args.timeout_s,
                        "per-frame timeout in seconds (default: $ALGAEVAL_BACKEND_TIMEOUT_SECS "
                        "or 30)");
  benchmark->add_option("-o,--output", bench_args.output, "report JSON to write")
      ->capture_default_str();
  benchmark->add_option("--detections-output", bench_args.detections_output,
                        "also write the collected detections");
  benchmark->add_option("command", bench_args.command, "backend command, after --");

  BaselineArgs base_args;
  auto* baseline = app.add_subcommand("baseline-detect", "Run the color baseline detector");
  AddFrameFlags(baseline, base_args.frames);
  AddDetectorFlags(baseline, base_args.detector);
  baseline->add_option("images", base_args.frames.images, "image files");
  baseline->add_option("-o,--output", base_args.output, "detections JSON to write")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalidInput;
  }

  try {
    if (*split) return RunSplit(split_args);
    if (*evaluate) return RunEvaluate(eval_args);
    if (*visualize) return RunVisualize(vis_args);
    if (*benchmark) return RunBenchmark(bench_args);
    if (*baseline) return RunBaselineDetect(base_args);
  } catch (const BackendError& e) {
    std::fprintf(stderr, "backend failure: %s\n", e.what());
    return kExitBackendFailure;
  } catch (const FlagError& e) {
    std::fprintf(stderr, "invalid flag %s\n", e.what());
    return kExitInvalidInput;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitInvalidInput;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalidInput;
  }
  return kExitInvalidInput;
}

}  // namespace algaeval::cli
