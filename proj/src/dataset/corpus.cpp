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

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "coop/dataset.hpp"
#include "coop/image.hpp"

namespace fs = std::filesystem;

namespace coop {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool is_image_ext(const fs::path& p) {
  const auto ext = lower(p.extension().string());
  return ext == ".jpg" || ext == ".jpeg" || ext == ".png";
}

// stem -> path, for regular files under `dir` accepted by `keep`.
template <typename Pred>
std::map<std::string, fs::path> list_stems(const fs::path& dir, Pred keep) {
  std::map<std::string, fs::path> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || !keep(entry.path())) continue;
    out.emplace(entry.path().stem().string(), entry.path());
  }
  return out;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ClassMap corpus_classes(const fs::path& root) {
  const auto path = root / "classes.txt";
  if (fs::exists(path)) return ClassMap::load(path);
  return ClassMap::poultry_default();
}

ValidationReport validate_dataset(const fs::path& root, const ClassMap& classes,
                                  ValidateOptions options) {
  std::error_code ec;
  if (!fs::is_directory(root, ec))
    throw DatasetError("unreadable dataset root: " + root.string());

  ValidationReport report;
  report.class_counts.assign(classes.size(), 0);

  for (const char* sub : {"images", "labels"}) {
    if (!fs::is_directory(root / sub, ec))
      report.violations.push_back({sub, 0, "missing directory"});
  }

  const auto images = list_stems(root / "images", is_image_ext);
  const auto labels = list_stems(root / "labels", [](const fs::path& p) {
    return p.extension() == ".txt";
  });
  report.images = images.size();
  report.labels = labels.size();

  for (const auto& [stem, path] : images) {
    if (!labels.count(stem)) report.images_without_labels.push_back(stem);
    if (!probe_image_file(path)) {
      report.violations.push_back(
          {"images/" + path.filename().string(), 0, "unreadable image header"});
    }
  }
  for (const auto& [stem, path] : labels) {
    if (!images.count(stem)) report.labels_without_images.push_back(stem);
    const std::string rel = "labels/" + path.filename().string();
    std::string text;
    try {
      text = slurp(path);
    } catch (const DatasetError& e) {
      report.violations.push_back({rel, 0, e.what()});
      continue;
    }
    // Collect every bad line rather than stopping at the first.
    int line_no = 0;
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
      ++line_no;
      if (line.find_first_not_of(" \t\r\v\f") == std::string::npos) continue;
      try {
        const auto box = parse_label_line(line, classes, line_no);
        ++report.class_counts[static_cast<std::size_t>(box.class_id)];
      } catch (const LabelError& e) {
        report.violations.push_back({rel, e.line(), e.reason()});
      }
    }
  }

  report.ok = report.violations.empty() &&
              !(options.strict && !report.images_without_labels.empty());
  return report;
}

std::string ValidationReport::to_text(const ClassMap& classes) const {
  std::ostringstream out;
  out << "images: " << images << "\nlabels: " << labels << "\n";
  for (std::size_t c = 0; c < class_counts.size(); ++c) {
    out << "  " << (c < classes.size() ? classes.name(static_cast<int>(c))
                                       : std::to_string(c))
        << ": " << class_counts[c] << "\n";
  }
  for (const auto& s : images_without_labels)
    out << "warning: image without label: " << s << "\n";
  for (const auto& s : labels_without_images)
    out << "warning: label without image: " << s << "\n";
  for (const auto& v : violations) {
    out << "error: " << v.file;
    if (v.line > 0) out << ":" << v.line;
    out << ": " << v.message << "\n";
  }
  out << (ok ? "ok" : "FAILED") << "\n";
  return out.str();
}

std::vector<LabeledImage> load_corpus(const fs::path& root,
                                      const ClassMap& classes) {
  std::error_code ec;
  if (!fs::is_directory(root / "images", ec))
    throw DatasetError("missing images directory under " + root.string());
  std::vector<LabeledImage> corpus;
  for (const auto& [stem, path] : list_stems(root / "images", is_image_ext)) {
    const auto info = probe_image_file(path);
    if (!info) throw DatasetError("unreadable image header: " + path.string());
    LabeledImage img{stem, info->size, {}};
    const auto label = root / "labels" / (stem + ".txt");
    if (fs::exists(label)) {
      try {
        img.annotations = parse_label_file(slurp(label), classes);
      } catch (const LabelError& e) {
        throw DatasetError(label.string() + ": " + e.what());
      }
    }
    corpus.push_back(std::move(img));
  }
  return corpus;
}

}  // namespace coop
