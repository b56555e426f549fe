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

#ifndef ALGAEVAL_DATASET_H_
#define ALGAEVAL_DATASET_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "algaeval/geometry.h"

namespace algaeval {

struct LabelEntry {
  int id = 1;
  std::string name;
  friend bool operator==(const LabelEntry&, const LabelEntry&) = default;
};

// Class name <-> integer id. Ids are unique and >= 1, names unique and
// non-empty. Entries keep their declaration order.
class LabelMap {
 public:
  LabelMap() = default;
  explicit LabelMap(std::vector<LabelEntry> entries);

  // One `id:name` line per class; blank lines and '#' comments are skipped.
  static LabelMap FromText(std::string_view text);
  std::string ToText() const;

  const std::vector<LabelEntry>& entries() const { return entries_; }
  bool Contains(int id) const { return Name(id).has_value(); }
  std::optional<std::string> Name(int id) const;
  std::optional<int> Id(std::string_view name) const;
  std::size_t size() const { return entries_.size(); }

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

 private:
  std::vector<LabelEntry> entries_;
};

// The single-class map used throughout: algae <-> 1.
LabelMap DefaultLabelMap();

struct GroundTruthBox {
  int label_id = 1;
  BoundingBox box;  // pixel space
  friend bool operator==(const GroundTruthBox&, const GroundTruthBox&) = default;
};

struct ImageEntry {
  std::string id;
  std::string path;
  ImageSize size;
  std::vector<GroundTruthBox> ground_truth;
  friend bool operator==(const ImageEntry&, const ImageEntry&) = default;
};

struct DatasetManifest {
  LabelMap label_map;
  std::vector<ImageEntry> images;
  // Directory the manifest was loaded from; relative image paths resolve
  // against it. Not serialized.
  std::filesystem::path base_dir;

  const ImageEntry* Find(std::string_view image_id) const;
  std::filesystem::path ResolvePath(const ImageEntry& entry) const;

  friend bool operator==(const DatasetManifest& a, const DatasetManifest& b) {
    return a.label_map == b.label_map && a.images == b.images;
  }
};

// Throws ValidationError naming the offending image when ids repeat, a box
// leaves its image, or a label id is not in the label map.
void ValidateManifest(const DatasetManifest& manifest);

DatasetManifest ParseManifest(std::string_view json_text,
                              std::string_view source_name = "manifest");
DatasetManifest LoadManifest(const std::filesystem::path& path);
std::string SerializeManifest(const DatasetManifest& manifest);
void SaveManifest(const DatasetManifest& manifest, const std::filesystem::path& path);

enum class Subset : std::uint8_t { kTraining, kValidation, kTest };

std::string_view SubsetName(Subset subset);  // "train" | "val" | "test"
std::optional<Subset> ParseSubset(std::string_view name);

struct SplitRatios {
  double train = 0.7;
  double val = 0.2;
  double test = 0.1;
};

// Throws ValidationError when a ratio is negative or the sum is off by more
// than 1e-9.
void ValidateRatios(const SplitRatios& ratios);

// Largest-remainder apportionment of `n` items; remainder ties go to the
// earlier subset (train, val, test).
std::array<std::size_t, 3> ApportionCounts(std::size_t n, const SplitRatios& ratios);

struct SplitAssignment {
  std::uint64_t seed = 0;
  std::map<std::string, Subset> assignments;

  std::array<std::size_t, 3> Counts() const;
  std::vector<std::string> Members(Subset subset) const;
  friend bool operator==(const SplitAssignment&, const SplitAssignment&) = default;
};

// Sorts image ids, shuffles them with a seeded Fisher-Yates pass, then hands
// out the apportioned counts in train, val, test order.
SplitAssignment SplitDataset(const DatasetManifest& manifest,
                             const SplitRatios& ratios, std::uint64_t seed);

SplitAssignment ParseSplit(std::string_view json_text,
                           std::string_view source_name = "split");
SplitAssignment LoadSplit(const std::filesystem::path& path);
std::string SerializeSplit(const SplitAssignment& split);

}  // namespace algaeval

#endif  // ALGAEVAL_DATASET_H_
