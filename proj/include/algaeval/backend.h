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

#ifndef ALGAEVAL_BACKEND_H_
#define ALGAEVAL_BACKEND_H_

#include <sys/types.h>

#include <chrono>
#include <deque>
#include <filesystem>
#include <functional>
#include <future>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "algaeval/baseline_detector.h"
#include "algaeval/detection.h"

namespace algaeval {

struct Frame {
  std::string image_id;
  std::filesystem::path path;
};

// Frames named by file stem.
std::vector<Frame> FramesFromPaths(const std::vector<std::filesystem::path>& paths);

// What a backend hands back for one frame: a validated, truncated batch or a
// per-frame error message.
struct BackendResponse {
  std::string image_id;
  std::optional<DetectionBatch> batch;
  std::string error;
};

// A detector that accepts frames and returns responses in submission order.
// Submit may be called several times before the matching Receive calls.
class DetectorBackend {
 public:
  virtual ~DetectorBackend() = default;

  virtual void Submit(const Frame& frame) = 0;
  // Blocks for the oldest outstanding frame. Throws BackendError when the
  // backend can no longer answer at all.
  virtual BackendResponse Receive() = 0;
  virtual std::string Describe() const = 0;
};

// Runs a callable per frame on std::async workers; frames in flight overlap.
class AsyncBackend : public DetectorBackend {
 public:
  using Fn = std::function<DetectionBatch(const Frame&)>;

  AsyncBackend(Fn fn, std::string name);
  ~AsyncBackend() override;

  void Submit(const Frame& frame) override;
  BackendResponse Receive() override;
  std::string Describe() const override { return name_; }

 private:
  Fn fn_;
  std::string name_;
  std::deque<std::pair<std::string, std::future<DetectionBatch>>> pending_;
};

// The color-heuristic detector behind the backend interface. Reads PNG or
// PPM frames from disk.
std::unique_ptr<DetectorBackend> MakeBaselineBackend(
    const ColorThresholds& thresholds = {},
    double min_area_fraction = kDefaultMinAreaFraction);

inline constexpr std::chrono::seconds kDefaultBackendTimeout{30};

// Honors ALGAEVAL_BACKEND_TIMEOUT_SECS when it parses as a positive number.
std::chrono::duration<double> BackendTimeoutFromEnv(
    std::chrono::duration<double> fallback = kDefaultBackendTimeout);

// Child process speaking newline-delimited JSON on stdin/stdout.
//   request:  {"image_path":"...","image_id":"..."}
//   response: {"image_id":"...","boxes":[[y,x,y,x],...],"scores":[...],
//              "classes":[...],"num_detections":N}
// A frame that times out is reported as an error; its late response, if
// one arrives, is discarded by image id.
class ProcessBackend : public DetectorBackend {
 public:
  // Throws BackendError if the executable cannot be started.
  explicit ProcessBackend(std::vector<std::string> argv,
                          std::chrono::duration<double> timeout = BackendTimeoutFromEnv());
  ~ProcessBackend() override;

  ProcessBackend(const ProcessBackend&) = delete;
  ProcessBackend& operator=(const ProcessBackend&) = delete;

  void Submit(const Frame& frame) override;
  BackendResponse Receive() override;
  std::string Describe() const override;

 private:
  // nullopt on timeout; throws BackendError on EOF.
  std::optional<std::string> ReadLine(std::chrono::steady_clock::time_point deadline);
  [[noreturn]] void Fail(const std::string& what);
  std::string ExitDiagnostics();

  std::vector<std::string> argv_;
  std::chrono::duration<double> timeout_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string read_buffer_;
  std::deque<std::string> outstanding_;
  std::set<std::string> timed_out_;
  std::optional<int> exit_status_;
};

// Parses one response line against the wire protocol and validates it.
// Throws ProtocolError.
DetectionBatch ParseBackendResponse(std::string_view line);
std::string SerializeBackendRequest(const Frame& frame);
std::string SerializeBackendResponse(const DetectionBatch& batch);

struct FrameOutcome {
  std::string image_id;
  std::optional<DetectionBatch> batch;
  std::string error;  // set when batch is empty
  double latency_ms = 0.0;

  bool ok() const { return batch.has_value(); }
};

struct RunResult {
  // One entry per input frame, in input order. Frames never answered
  // because the run aborted carry an error.
  std::vector<FrameOutcome> outcomes;
  bool aborted = false;
  std::string diagnostics;

  std::size_t failed() const;
};

struct RunOptions {
  int max_in_flight = 1;
};

RunResult RunBackend(DetectorBackend& backend, const std::vector<Frame>& frames,
                     const RunOptions& options = {});

struct BenchmarkOptions {
  int warmup = 10;
  int max_in_flight = 1;
};

struct BenchmarkReport {
  std::string backend;
  std::int64_t frames_total = 0;
  std::int64_t frames_warmup = 0;
  std::int64_t frames_failed = 0;
  int max_in_flight = 1;
  double wall_time_s = 0.0;  // first post-warmup submit to last receive
  double fps = 0.0;          // (frames_total - frames_warmup) / wall_time_s
  double latency_p50_ms = 0.0;
  double latency_p95_ms = 0.0;
  std::vector<double> latencies_ms;  // post-warmup, input order
};

// Nearest-rank percentile: the ceil(p/100 * n)-th smallest value.
double NearestRankPercentile(std::vector<double> values, double percent);

struct BenchmarkResult {
  BenchmarkReport report;
  RunResult run;
};

// Warmup frames run serially and untimed; the clock starts once the last
// warmup frame has been received. Throws ValidationError unless
// warmup < frames.size() and max_in_flight >= 1.
BenchmarkResult Benchmark(DetectorBackend& backend, const std::vector<Frame>& frames,
                          const BenchmarkOptions& options = {});

std::string SerializeBenchmarkReport(const BenchmarkReport& report);
BenchmarkReport ParseBenchmarkReport(std::string_view json_text,
                                     std::string_view source_name = "benchmark");

struct ScoredBox {
  int label_id = 1;
  double score = 0.0;
  BoundingBox box;  // pixel space, inside the image
  bool clamped = false;
  bool degenerate = false;
};

// Keeps entries with score strictly above `score_threshold`, converts wire
// order to (x, y, x, y), denormalizes and clamps to the image.
std::vector<ScoredBox> ThresholdAndConvert(const DetectionBatch& batch,
                                           const ImageSize& size,
                                           double score_threshold = 0.5,
                                           ConversionMode mode = ConversionMode::kDefault);

}  // namespace algaeval

#endif  // ALGAEVAL_BACKEND_H_
