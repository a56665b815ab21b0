/* Copyright 2026 The Coop Authors. All Rights Reserved.

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

// YOLO-format corpus handling: class maps, label files, validation and the
// deterministic train/test/val split.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "coop/geometry.hpp"

namespace coop {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised for a malformed label line. `line()` is 1-based.
class LabelError : public DatasetError {
 public:
  LabelError(const std::string& reason, int line);
  const std::string& reason() const noexcept { return reason_; }
  int line() const noexcept { return line_; }

 private:
  std::string reason_;
  int line_;
};

class ClassMap {
 public:
  ClassMap() = default;
  // Throws DatasetError on empty or duplicate names.
  explicit ClassMap(std::vector<std::string> names);

  // Fowl Pox, Healthy, Infectious Coryza, Newcastle Disease.
  static ClassMap poultry_default();
  // classes.txt format: one name per line, id = line index.
  static ClassMap parse(std::string_view text);
  static ClassMap load(const std::filesystem::path& path);

  std::size_t size() const noexcept { return names_.size(); }
  bool contains(int id) const noexcept {
    return id >= 0 && static_cast<std::size_t>(id) < names_.size();
  }
  const std::string& name(int id) const { return names_.at(id); }
  std::optional<int> id_of(std::string_view name) const;
  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  std::vector<std::string> names_;
};

struct LabeledImage {
  std::string image_id;
  ImageSize size;
  std::vector<NormalizedBox> annotations;
};

// One `class_id cx cy w h` record. Throws LabelError tagged with `line_no`.
NormalizedBox parse_label_line(std::string_view line, const ClassMap& classes,
                               int line_no);

// Whole label file; blank lines are skipped, order is preserved.
std::vector<NormalizedBox> parse_label_file(std::string_view text,
                                            const ClassMap& classes);

// Six decimals per coordinate, one box per line, trailing newline.
std::string serialize_label_file(std::span<const NormalizedBox> boxes);

struct ValidationIssue {
  std::string file;  // relative to the dataset root
  int line = 0;      // 0 when the issue is not tied to a line
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::size_t images = 0;
  std::size_t labels = 0;
  std::vector<std::string> images_without_labels;
  std::vector<std::string> labels_without_images;
  std::vector<std::size_t> class_counts;  // indexed by class id
  std::vector<ValidationIssue> violations;

  std::string to_text(const ClassMap& classes) const;
};

struct ValidateOptions {
  // Missing label files count as failures instead of warnings.
  bool strict = false;
};

// Checks `root/images` against `root/labels`. Entries are sorted by image id.
// Throws DatasetError if `root` cannot be read.
ValidationReport validate_dataset(const std::filesystem::path& root,
                                  const ClassMap& classes,
                                  ValidateOptions options = {});

// Reads every image with its label file (missing labels mean no boxes).
// Image sizes come from the file headers. Sorted by image id.
std::vector<LabeledImage> load_corpus(const std::filesystem::path& root,
                                      const ClassMap& classes);

// Class map stored with the corpus, or the poultry default when absent.
ClassMap corpus_classes(const std::filesystem::path& root);

enum class Subset { kTrain, kTest, kVal };

std::string_view subset_name(Subset s) noexcept;

struct SplitRatios {
  double train = 0.7;
  double test = 0.2;
  double val = 0.1;

  // Each in [0, 1], summing to 1 within 1e-9.
  bool valid() const noexcept;
  static SplitRatios parse(std::string_view csv);
};

struct SplitOptions {
  // Split each primary-class group separately.
  bool stratify = false;
};

struct SplitManifest {
  std::uint64_t seed = 0;
  SplitRatios ratios;
  std::map<std::string, Subset> assignment;

  std::size_t count(Subset s) const;
  // {"seed": int, "ratios": [t, e, v], "assignment": {id: name}}, keys sorted.
  std::string to_json() const;
  static SplitManifest from_json(std::string_view text);
};

// Seeded shuffle of the sorted image ids, then the first floor(n*train) go to
// train, the next floor(n*test) to test, and the remainder to val.
SplitManifest split_dataset(std::span<const LabeledImage> corpus,
                            SplitRatios ratios, std::uint64_t seed,
                            SplitOptions options = {});

}  // namespace coop
