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

#include "algaeval/backend.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <sstream>
#include <thread>

#include "algaeval/errors.h"
#include "algaeval/image.h"
#include "json_util.h"

namespace algaeval {

using internal::Json;
using internal::OrderedJson;
using Clock = std::chrono::steady_clock;

std::vector<Frame> FramesFromPaths(const std::vector<std::filesystem::path>& paths) {
  std::vector<Frame> frames;
  frames.reserve(paths.size());
  for (const auto& p : paths) frames.push_back({p.stem().string(), p});
  return frames;
}

AsyncBackend::AsyncBackend(Fn fn, std::string name)
    : fn_(std::move(fn)), name_(std::move(name)) {}

AsyncBackend::~AsyncBackend() {
  for (auto& [_, f] : pending_) {
    if (f.valid()) f.wait();
  }
}

void AsyncBackend::Submit(const Frame& frame) {
  pending_.emplace_back(frame.image_id,
                        std::async(std::launch::async, fn_, frame));
}

BackendResponse AsyncBackend::Receive() {
  if (pending_.empty()) throw std::logic_error("Receive without Submit");
  auto [id, future] = std::move(pending_.front());
  pending_.pop_front();
  BackendResponse response;
  response.image_id = id;
  try {
    DetectionBatch batch = future.get();
    batch.Validate();
    batch.Truncate();
    response.batch = std::move(batch);
  } catch (const std::exception& e) {
    response.error = e.what();
  }
  return response;
}

std::unique_ptr<DetectorBackend> MakeBaselineBackend(const ColorThresholds& thresholds,
                                                     double min_area_fraction) {
  thresholds.Validate();
  return std::make_unique<AsyncBackend>(
      [thresholds, min_area_fraction](const Frame& frame) {
        return Detect(ReadImage(frame.path), frame.image_id, thresholds, min_area_fraction);
      },
      "builtin-baseline");
}

std::chrono::duration<double> BackendTimeoutFromEnv(std::chrono::duration<double> fallback) {
  const char* raw = std::getenv("ALGAEVAL_BACKEND_TIMEOUT_SECS");
  if (raw == nullptr || *raw == '\0') return fallback;
  char* end = nullptr;
  const double secs = std::strtod(raw, &end);
  if (end == raw || *end != '\0' || !(secs > 0.0) || !std::isfinite(secs)) return fallback;
  return std::chrono::duration<double>(secs);
}

// Wire protocol.

std::string SerializeBackendRequest(const Frame& frame) {
  OrderedJson j;
  j["image_path"] = frame.path.string();
  j["image_id"] = frame.image_id;
  return j.dump() + "\n";
}

std::string SerializeBackendResponse(const DetectionBatch& batch) {
  OrderedJson boxes = OrderedJson::array();
  for (Eigen::Index i = 0; i < batch.boxes.rows(); ++i) {
    boxes.push_back({batch.boxes(i, 0), batch.boxes(i, 1), batch.boxes(i, 2),
                     batch.boxes(i, 3)});
  }
  OrderedJson scores = OrderedJson::array();
  for (Eigen::Index i = 0; i < batch.scores.size(); ++i) scores.push_back(batch.scores[i]);
  OrderedJson j;
  j["image_id"] = batch.image_id;
  j["boxes"] = std::move(boxes);
  j["scores"] = std::move(scores);
  j["classes"] = batch.classes;
  j["num_detections"] = batch.num_detections;
  return j.dump() + "\n";
}

DetectionBatch ParseBackendResponse(std::string_view line) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw ProtocolError(std::string("response is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw ProtocolError("response is not a JSON object");
  auto field = [&](const char* key) -> const Json& {
    auto it = j.find(key);
    if (it == j.end()) throw ProtocolError(std::string("response lacks \"") + key + "\"");
    return *it;
  };
  DetectionBatch batch;
  const Json& id = field("image_id");
  if (!id.is_string()) throw ProtocolError("image_id must be a string");
  batch.image_id = id.get<std::string>();

  const Json& boxes = field("boxes");
  const Json& scores = field("scores");
  const Json& classes = field("classes");
  const Json& num = field("num_detections");
  if (!boxes.is_array() || !scores.is_array() || !classes.is_array()) {
    throw ProtocolError(batch.image_id + ": boxes, scores and classes must be arrays");
  }
  if (!num.is_number_integer()) {
    throw ProtocolError(batch.image_id + ": num_detections must be an integer");
  }
  batch.boxes.resize(static_cast<Eigen::Index>(boxes.size()), 4);
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (!boxes[i].is_array() || boxes[i].size() != 4) {
      throw ProtocolError(batch.image_id + ": box " + std::to_string(i) +
                          " is not a 4-element array");
    }
    for (int k = 0; k < 4; ++k) {
      if (!boxes[i][k].is_number()) {
        throw ProtocolError(batch.image_id + ": box " + std::to_string(i) + " is not numeric");
      }
      batch.boxes(static_cast<Eigen::Index>(i), k) = boxes[i][k].get<double>();
    }
  }
  batch.scores.resize(static_cast<Eigen::Index>(scores.size()));
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!scores[i].is_number()) throw ProtocolError(batch.image_id + ": non-numeric score");
    batch.scores[static_cast<Eigen::Index>(i)] = scores[i].get<double>();
  }
  for (const auto& c : classes) {
    if (!c.is_number_integer()) throw ProtocolError(batch.image_id + ": non-integer class");
    batch.classes.push_back(c.get<int>());
  }
  batch.num_detections = num.get<int>();
  batch.Validate();
  batch.Truncate();
  return batch;
}

namespace {

std::optional<std::string> PeekImageId(std::string_view line) {
  try {
    const Json j = Json::parse(line);
    if (j.is_object() && j.contains("image_id") && j["image_id"].is_string()) {
      return j["image_id"].get<std::string>();
    }
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

void IgnoreSigpipeOnce() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

std::string JoinArgv(const std::vector<std::string>& argv) {
  std::string out;
  for (const auto& a : argv) {
    if (!out.empty()) out += ' ';
    out += a;
  }
  return out;
}

}  // namespace

ProcessBackend::ProcessBackend(std::vector<std::string> argv,
                               std::chrono::duration<double> timeout)
    : argv_(std::move(argv)), timeout_(timeout) {
  if (argv_.empty()) throw BackendError("empty backend command");
  IgnoreSigpipeOnce();

  int to_child[2], from_child[2], exec_err[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0 || ::pipe2(from_child, O_CLOEXEC) != 0 ||
      ::pipe2(exec_err, O_CLOEXEC) != 0) {
    throw BackendError(std::string("pipe: ") + std::strerror(errno));
  }
  std::vector<char*> cargv;
  for (auto& a : argv_) cargv.push_back(a.data());
  cargv.push_back(nullptr);

  pid_ = ::fork();
  if (pid_ < 0) throw BackendError(std::string("fork: ") + std::strerror(errno));
  if (pid_ == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::execvp(cargv[0], cargv.data());
    const int err = errno;
    [[maybe_unused]] auto n = ::write(exec_err[1], &err, sizeof(err));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  ::close(exec_err[1]);
  to_child_ = to_child[1];
  from_child_ = from_child[0];

  int child_errno = 0;
  ssize_t n;
  do {
    n = ::read(exec_err[0], &child_errno, sizeof(child_errno));
  } while (n < 0 && errno == EINTR);
  ::close(exec_err[0]);
  if (n == static_cast<ssize_t>(sizeof(child_errno))) {
    int status = 0;
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
    ::close(to_child_);
    ::close(from_child_);
    to_child_ = from_child_ = -1;
    throw BackendError("cannot start backend \"" + argv_[0] +
                       "\": " + std::strerror(child_errno));
  }
}

ProcessBackend::~ProcessBackend() {
  if (to_child_ >= 0) ::close(to_child_);
  if (pid_ > 0 && !exit_status_) {
    const auto deadline = Clock::now() + std::chrono::seconds(2);
    int status = 0;
    while (::waitpid(pid_, &status, WNOHANG) == 0) {
      if (Clock::now() > deadline) {
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, &status, 0);
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
  }
  if (from_child_ >= 0) ::close(from_child_);
}

std::string ProcessBackend::Describe() const { return JoinArgv(argv_); }

std::string ProcessBackend::ExitDiagnostics() {
  if (!exit_status_ && pid_ > 0) {
    const auto deadline = Clock::now() + std::chrono::seconds(1);
    int status = 0;
    pid_t r;
    while ((r = ::waitpid(pid_, &status, WNOHANG)) == 0 && Clock::now() < deadline) {
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    if (r == pid_) exit_status_ = status;
  }
  if (!exit_status_) return "backend still running";
  const int status = *exit_status_;
  if (WIFEXITED(status)) return "backend exited with status " + std::to_string(WEXITSTATUS(status));
  if (WIFSIGNALED(status)) return "backend killed by signal " + std::to_string(WTERMSIG(status));
  return "backend stopped";
}

void ProcessBackend::Fail(const std::string& what) {
  throw BackendError(what + " (" + ExitDiagnostics() + ")");
}

void ProcessBackend::Submit(const Frame& frame) {
  const std::string line = SerializeBackendRequest(frame);
  std::size_t off = 0;
  while (off < line.size()) {
    const ssize_t n = ::write(to_child_, line.data() + off, line.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      Fail(std::string("write to backend failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
  outstanding_.push_back(frame.image_id);
}

std::optional<std::string> ProcessBackend::ReadLine(Clock::time_point deadline) {
  for (;;) {
    const auto nl = read_buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = read_buffer_.substr(0, nl);
      read_buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto remaining =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (remaining.count() <= 0) return std::nullopt;
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(
                                          remaining.count(), 1 << 30)));
    if (ready < 0) {
      if (errno == EINTR) continue;
      Fail(std::string("poll: ") + std::strerror(errno));
    }
    if (ready == 0) continue;
    char buf[65536];
    const ssize_t n = ::read(from_child_, buf, sizeof(buf));
    if (n < 0) {
      if (errno == EINTR) continue;
      Fail(std::string("read from backend failed: ") + std::strerror(errno));
    }
    if (n == 0) Fail("backend closed its output");
    read_buffer_.append(buf, static_cast<std::size_t>(n));
  }
}

BackendResponse ProcessBackend::Receive() {
  if (outstanding_.empty()) throw std::logic_error("Receive without Submit");
  const std::string expected = outstanding_.front();
  const auto deadline =
      Clock::now() + std::chrono::duration_cast<Clock::duration>(timeout_);
  BackendResponse response;
  response.image_id = expected;
  for (;;) {
    const auto line = ReadLine(deadline);
    if (!line) {
      outstanding_.pop_front();
      timed_out_.insert(expected);
      std::ostringstream msg;
      msg << "timeout after " << timeout_.count() << " s";
      response.error = msg.str();
      return response;
    }
    const auto peeked = PeekImageId(*line);
    if (peeked && *peeked != expected && timed_out_.erase(*peeked) > 0) continue;
    outstanding_.pop_front();
    try {
      DetectionBatch batch = ParseBackendResponse(*line);
      if (batch.image_id != expected) {
        response.error = "response for \"" + batch.image_id + "\", expected \"" + expected + "\"";
      } else {
        response.batch = std::move(batch);
      }
    } catch (const ProtocolError& e) {
      response.error = std::string("protocol error: ") + e.what();
    }
    return response;
  }
}

// Runs.

std::size_t RunResult::failed() const {
  return static_cast<std::size_t>(std::count_if(
      outcomes.begin(), outcomes.end(), [](const FrameOutcome& o) { return !o.ok(); }));
}

namespace {

double MillisSince(Clock::time_point start, Clock::time_point end) {
  return std::chrono::duration<double, std::milli>(end - start).count();
}

// Pushes frames [begin, end) through the backend with at most `max_in_flight`
// outstanding. Returns false if the backend aborted.
bool Pump(DetectorBackend& backend, const std::vector<Frame>& frames, std::size_t begin,
          std::size_t end, int max_in_flight, RunResult& run) {
  std::vector<Clock::time_point> submitted(end - begin);
  std::size_t next_submit = begin;
  std::size_t next_receive = begin;
  try {
    while (next_receive < end) {
      while (next_submit < end &&
             next_submit - next_receive < static_cast<std::size_t>(max_in_flight)) {
        submitted[next_submit - begin] = Clock::now();
        backend.Submit(frames[next_submit]);
        ++next_submit;
      }
      BackendResponse r = backend.Receive();
      const auto done = Clock::now();
      FrameOutcome& out = run.outcomes[next_receive];
      out.latency_ms = MillisSince(submitted[next_receive - begin], done);
      out.batch = std::move(r.batch);
      out.error = std::move(r.error);
      ++next_receive;
    }
  } catch (const BackendError& e) {
    run.aborted = true;
    run.diagnostics = e.what();
    for (std::size_t i = next_receive; i < run.outcomes.size(); ++i) {
      run.outcomes[i].error = "not processed: backend aborted";
    }
    return false;
  }
  return true;
}

RunResult EmptyRun(const std::vector<Frame>& frames) {
  RunResult run;
  run.outcomes.resize(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) run.outcomes[i].image_id = frames[i].image_id;
  return run;
}

}  // namespace

RunResult RunBackend(DetectorBackend& backend, const std::vector<Frame>& frames,
                     const RunOptions& options) {
  if (options.max_in_flight < 1) throw ValidationError("max_in_flight must be >= 1");
  RunResult run = EmptyRun(frames);
  Pump(backend, frames, 0, frames.size(), options.max_in_flight, run);
  return run;
}

double NearestRankPercentile(std::vector<double> values, double percent) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(percent / 100.0 * n));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

BenchmarkResult Benchmark(DetectorBackend& backend, const std::vector<Frame>& frames,
                          const BenchmarkOptions& options) {
  if (options.warmup < 0 || static_cast<std::size_t>(options.warmup) >= frames.size()) {
    throw ValidationError("warmup must be non-negative and smaller than the frame count");
  }
  if (options.max_in_flight < 1) throw ValidationError("max_in_flight must be >= 1");

  BenchmarkResult result;
  result.run = EmptyRun(frames);
  BenchmarkReport& report = result.report;
  report.backend = backend.Describe();
  report.frames_total = static_cast<std::int64_t>(frames.size());
  report.frames_warmup = options.warmup;
  report.max_in_flight = options.max_in_flight;

  const auto warm = static_cast<std::size_t>(options.warmup);
  if (Pump(backend, frames, 0, warm, 1, result.run)) {
    const auto start = Clock::now();
    Pump(backend, frames, warm, frames.size(), options.max_in_flight, result.run);
    const auto stop = Clock::now();
    report.wall_time_s = std::chrono::duration<double>(stop - start).count();
  }
  const auto timed = static_cast<double>(report.frames_total - report.frames_warmup);
  report.fps = report.wall_time_s > 0.0 ? timed / report.wall_time_s : 0.0;
  for (std::size_t i = warm; i < frames.size(); ++i) {
    report.latencies_ms.push_back(result.run.outcomes[i].latency_ms);
  }
  report.frames_failed = static_cast<std::int64_t>(result.run.failed());
  report.latency_p50_ms = NearestRankPercentile(report.latencies_ms, 50.0);
  report.latency_p95_ms = NearestRankPercentile(report.latencies_ms, 95.0);
  return result;
}

std::string SerializeBenchmarkReport(const BenchmarkReport& r) {
  OrderedJson j;
  j["backend"] = r.backend;
  j["frames_total"] = r.frames_total;
  j["frames_warmup"] = r.frames_warmup;
  j["frames_failed"] = r.frames_failed;
  j["max_in_flight"] = r.max_in_flight;
  j["wall_time_s"] = r.wall_time_s;
  j["fps"] = r.fps;
  j["latency_p50_ms"] = r.latency_p50_ms;
  j["latency_p95_ms"] = r.latency_p95_ms;
  j["latencies_ms"] = r.latencies_ms;
  return internal::Dump(j);
}

BenchmarkReport ParseBenchmarkReport(std::string_view json_text, std::string_view source_name) {
  const std::string src(source_name);
  const Json j = internal::ParseJsonText(json_text, src);
  if (!j.is_object()) throw ParseError(src + ": top level must be an object");
  BenchmarkReport r;
  r.backend = internal::RequireString(j, "backend", src);
  r.frames_total = internal::RequireInteger(j, "frames_total", src);
  r.frames_warmup = internal::RequireInteger(j, "frames_warmup", src);
  r.frames_failed = internal::RequireInteger(j, "frames_failed", src);
  r.max_in_flight = static_cast<int>(internal::RequireInteger(j, "max_in_flight", src));
  r.wall_time_s = internal::RequireNumber(j, "wall_time_s", src);
  r.fps = internal::RequireNumber(j, "fps", src);
  r.latency_p50_ms = internal::RequireNumber(j, "latency_p50_ms", src);
  r.latency_p95_ms = internal::RequireNumber(j, "latency_p95_ms", src);
  for (const auto& v : internal::RequireArray(j, "latencies_ms", src)) {
    if (!v.is_number()) throw ParseError(src + ".latencies_ms: expected numbers");
    r.latencies_ms.push_back(v.get<double>());
  }
  if (r.frames_warmup < 0 || r.frames_warmup >= r.frames_total || r.max_in_flight < 1 ||
      r.frames_failed < 0 || r.frames_failed > r.frames_total) {
    throw ValidationError(src + ": inconsistent frame counts");
  }
  return r;
}

std::vector<ScoredBox> ThresholdAndConvert(const DetectionBatch& batch, const ImageSize& size,
                                           double score_threshold, ConversionMode mode) {
  std::vector<ScoredBox> out;
  const auto n = std::min<Eigen::Index>(batch.num_detections, batch.boxes.rows());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(batch.scores[i] > score_threshold)) continue;
    const BoundingBox normalized =
        BoundingBox::FromWireOrder(batch.boxes.row(i).transpose(), CoordinateSpace::kNormalized);
    const auto clamped = ClampToImage(Denormalize(normalized, size, mode), size);
    out.push_back({batch.classes[static_cast<std::size_t>(i)], batch.scores[i], clamped.box,
                   clamped.clamped, clamped.degenerate});
  }
  return out;
}

}  // namespace algaeval
