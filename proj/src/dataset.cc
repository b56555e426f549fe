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

#include "algaeval/dataset.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "algaeval/errors.h"
#include "algaeval/file_util.h"
#include "json_util.h"
#include "random_util.h"

namespace algaeval {

using internal::Json;
using internal::OrderedJson;

LabelMap::LabelMap(std::vector<LabelEntry> entries) : entries_(std::move(entries)) {
  std::set<int> ids;
  std::set<std::string> names;
  for (const auto& e : entries_) {
    if (e.id < 1) {
      throw ValidationError("label map: id " + std::to_string(e.id) + " must be >= 1");
    }
    if (e.name.empty()) {
      throw ValidationError("label map: empty name for id " + std::to_string(e.id));
    }
    if (!ids.insert(e.id).second) {
      throw ValidationError("label map: duplicate id " + std::to_string(e.id));
    }
    if (!names.insert(e.name).second) {
      throw ValidationError("label map: duplicate name \"" + e.name + "\"");
    }
  }
}

LabelMap LabelMap::FromText(std::string_view text) {
  std::vector<LabelEntry> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw ParseError("label map line " + std::to_string(line_no) +
                       ": expected id:name");
    }
    std::string id_text = line.substr(0, colon);
    std::string name = line.substr(colon + 1);
    auto trim = [](std::string& s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    trim(id_text);
    trim(name);
    int id = 0;
    std::size_t consumed = 0;
    try {
      id = std::stoi(id_text, &consumed);
    } catch (const std::exception&) {
      consumed = 0;
    }
    if (consumed == 0 || consumed != id_text.size()) {
      throw ParseError("label map line " + std::to_string(line_no) +
                       ": bad id \"" + id_text + "\"");
    }
    entries.push_back({id, name});
  }
  return LabelMap(std::move(entries));
}

std::string LabelMap::ToText() const {
  std::string out;
  for (const auto& e : entries_) {
    out += std::to_string(e.id) + ":" + e.name + "\n";
  }
  return out;
}

std::optional<std::string> LabelMap::Name(int id) const {
  for (const auto& e : entries_) {
    if (e.id == id) return e.name;
  }
  return std::nullopt;
}

std::optional<int> LabelMap::Id(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return e.id;
  }
  return std::nullopt;
}

LabelMap DefaultLabelMap() { return LabelMap({{1, "algae"}}); }

const ImageEntry* DatasetManifest::Find(std::string_view image_id) const {
  for (const auto& image : images) {
    if (image.id == image_id) return &image;
  }
  return nullptr;
}

std::filesystem::path DatasetManifest::ResolvePath(const ImageEntry& entry) const {
  std::filesystem::path p(entry.path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

void ValidateManifest(const DatasetManifest& manifest) {
  std::set<std::string> seen;
  for (const auto& image : manifest.images) {
    if (image.id.empty()) throw ValidationError("manifest: image with empty id");
    if (!seen.insert(image.id).second) {
      throw ValidationError("manifest: duplicate image id \"" + image.id + "\"");
    }
    if (!image.size.IsValid()) {
      throw ValidationError("manifest: image \"" + image.id +
                            "\" has non-positive dimensions");
    }
    for (std::size_t i = 0; i < image.ground_truth.size(); ++i) {
      const auto& gt = image.ground_truth[i];
      if (!manifest.label_map.Contains(gt.label_id)) {
        throw ValidationError("manifest: image \"" + image.id + "\" box " +
                              std::to_string(i) + " has unknown label_id " +
                              std::to_string(gt.label_id));
      }
      if (!gt.box.IsValidPixel(image.size)) {
        std::ostringstream msg;
        msg << "manifest: image \"" << image.id << "\" box " << i << " " << gt.box
            << " is outside " << image.size.width << "x" << image.size.height
            << " or has inverted corners";
        throw ValidationError(msg.str());
      }
    }
  }
}

namespace {

LabelMap LabelMapFromJson(const Json& j, const std::string& ctx) {
  if (j.is_string()) return LabelMap::FromText(j.get<std::string>());
  if (!j.is_array()) throw ParseError(ctx + ": expected an array or id:name text");
  std::vector<LabelEntry> entries;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string c = ctx + "[" + std::to_string(i) + "]";
    entries.push_back({static_cast<int>(internal::RequireInteger(j[i], "id", c)),
                       internal::RequireString(j[i], "name", c)});
  }
  return LabelMap(std::move(entries));
}

}  // namespace

DatasetManifest ParseManifest(std::string_view json_text, std::string_view source_name) {
  const std::string src(source_name);
  const Json root = internal::ParseJsonText(json_text, src);
  if (!root.is_object()) throw ParseError(src + ": top level must be an object");
  for (const auto& [key, _] : root.items()) {
    if (key != "label_map" && key != "images") {
      throw ParseError(src + ": unknown top-level key \"" + key + "\"");
    }
  }
  DatasetManifest manifest;
  manifest.label_map =
      LabelMapFromJson(internal::RequireField(root, "label_map", src), src + ".label_map");
  const Json& images = internal::RequireArray(root, "images", src);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string ctx = src + ".images[" + std::to_string(i) + "]";
    const Json& img = images[i];
    ImageEntry entry;
    entry.id = internal::RequireString(img, "id", ctx);
    entry.path = internal::RequireString(img, "path", ctx);
    entry.size.width = static_cast<int>(internal::RequireInteger(img, "width", ctx));
    entry.size.height = static_cast<int>(internal::RequireInteger(img, "height", ctx));
    const Json& boxes = internal::RequireArray(img, "boxes", ctx);
    for (std::size_t b = 0; b < boxes.size(); ++b) {
      const std::string bctx = ctx + ".boxes[" + std::to_string(b) + "]";
      GroundTruthBox gt;
      gt.label_id = static_cast<int>(internal::RequireInteger(boxes[b], "label_id", bctx));
      gt.box = BoundingBox(internal::RequireNumber(boxes[b], "x_min", bctx),
                           internal::RequireNumber(boxes[b], "y_min", bctx),
                           internal::RequireNumber(boxes[b], "x_max", bctx),
                           internal::RequireNumber(boxes[b], "y_max", bctx),
                           CoordinateSpace::kPixel);
      entry.ground_truth.push_back(gt);
    }
    manifest.images.push_back(std::move(entry));
  }
  ValidateManifest(manifest);
  return manifest;
}

DatasetManifest LoadManifest(const std::filesystem::path& path) {
  DatasetManifest m = ParseManifest(ReadFileToString(path), path.string());
  m.base_dir = path.parent_path();
  return m;
}

std::string SerializeManifest(const DatasetManifest& manifest) {
  OrderedJson root;
  OrderedJson labels = OrderedJson::array();
  for (const auto& e : manifest.label_map.entries()) {
    labels.push_back({{"id", e.id}, {"name", e.name}});
  }
  root["label_map"] = std::move(labels);
  OrderedJson images = OrderedJson::array();
  for (const auto& image : manifest.images) {
    OrderedJson boxes = OrderedJson::array();
    for (const auto& gt : image.ground_truth) {
      boxes.push_back({{"label_id", gt.label_id},
                       {"x_min", gt.box.x_min()},
                       {"y_min", gt.box.y_min()},
                       {"x_max", gt.box.x_max()},
                       {"y_max", gt.box.y_max()}});
    }
    images.push_back({{"id", image.id},
                      {"path", image.path},
                      {"width", image.size.width},
                      {"height", image.size.height},
                      {"boxes", std::move(boxes)}});
  }
  root["images"] = std::move(images);
  return internal::Dump(root);
}

void SaveManifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  WriteFileAtomic(path, SerializeManifest(manifest));
}

std::string_view SubsetName(Subset subset) {
  switch (subset) {
    case Subset::kTraining: return "train";
    case Subset::kValidation: return "val";
    case Subset::kTest: return "test";
  }
  return "test";
}

std::optional<Subset> ParseSubset(std::string_view name) {
  if (name == "train") return Subset::kTraining;
  if (name == "val") return Subset::kValidation;
  if (name == "test") return Subset::kTest;
  return std::nullopt;
}

void ValidateRatios(const SplitRatios& r) {
  if (!(r.train >= 0) || !(r.val >= 0) || !(r.test >= 0)) {
    throw ValidationError("split ratios must be non-negative");
  }
  const double sum = r.train + r.val + r.test;
  if (std::fabs(sum - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "split ratios must sum to 1 (got " << sum << ")";
    throw ValidationError(msg.str());
  }
}

std::array<std::size_t, 3> ApportionCounts(std::size_t n, const SplitRatios& ratios) {
  ValidateRatios(ratios);
  const std::array<double, 3> r{ratios.train, ratios.val, ratios.test};
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainders{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double quota = r[i] * static_cast<double>(n);
    // Absorb representation error such as 0.7 * 100 = 69.999...
    const double floor_q = std::floor(quota + 1e-9);
    counts[i] = static_cast<std::size_t>(floor_q);
    remainders[i] = std::max(0.0, quota - floor_q);
    assigned += counts[i];
  }
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return remainders[a] > remainders[b]; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) {
    ++counts[order[k % 3]];
  }
  while (assigned > n) {
    // Only reachable through the epsilon above; trim from the smallest quota.
    for (int i = 2; i >= 0 && assigned > n; --i) {
      if (counts[i] > 0) { --counts[i]; --assigned; }
    }
  }
  return counts;
}

std::array<std::size_t, 3> SplitAssignment::Counts() const {
  std::array<std::size_t, 3> counts{};
  for (const auto& [_, subset] : assignments) ++counts[static_cast<int>(subset)];
  return counts;
}

std::vector<std::string> SplitAssignment::Members(Subset subset) const {
  std::vector<std::string> out;
  for (const auto& [id, s] : assignments) {
    if (s == subset) out.push_back(id);
  }
  return out;
}

SplitAssignment SplitDataset(const DatasetManifest& manifest,
                             const SplitRatios& ratios, std::uint64_t seed) {
  const auto counts = ApportionCounts(manifest.images.size(), ratios);
  std::vector<std::string> ids;
  ids.reserve(manifest.images.size());
  for (const auto& image : manifest.images) ids.push_back(image.id);
  std::sort(ids.begin(), ids.end());
  std::mt19937_64 rng(seed);
  internal::Shuffle(ids, rng);

  SplitAssignment out;
  out.seed = seed;
  std::size_t pos = 0;
  for (int s = 0; s < 3; ++s) {
    for (std::size_t k = 0; k < counts[s]; ++k, ++pos) {
      out.assignments.emplace(ids[pos], static_cast<Subset>(s));
    }
  }
  return out;
}

SplitAssignment ParseSplit(std::string_view json_text, std::string_view source_name) {
  const std::string src(source_name);
  const Json root = internal::ParseJsonText(json_text, src);
  if (!root.is_object()) throw ParseError(src + ": top level must be an object");
  const Json& seed = internal::RequireField(root, "seed", src);
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
    throw ParseError(src + ".seed: expected a non-negative integer");
  }
  SplitAssignment out;
  out.seed = seed.get<std::uint64_t>();
  const Json& assignments = internal::RequireField(root, "assignments", src);
  if (!assignments.is_object()) throw ParseError(src + ".assignments: expected an object");
  for (const auto& [id, value] : assignments.items()) {
    const auto subset = value.is_string() ? ParseSubset(value.get<std::string>())
                                          : std::nullopt;
    if (!subset) {
      throw ParseError(src + ".assignments." + id + ": expected train|val|test");
    }
    out.assignments.emplace(id, *subset);
  }
  return out;
}

SplitAssignment LoadSplit(const std::filesystem::path& path) {
  return ParseSplit(ReadFileToString(path), path.string());
}

std::string SerializeSplit(const SplitAssignment& split) {
  OrderedJson root;
  root["seed"] = split.seed;
  OrderedJson assignments = OrderedJson::object();
  for (const auto& [id, subset] : split.assignments) {
    assignments[id] = std::string(SubsetName(subset));
  }
  root["assignments"] = std::move(assignments);
  return internal::Dump(root);
}

}  // namespace algaeval
