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

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "coop/dataset.hpp"

namespace coop {

LabelError::LabelError(const std::string& reason, int line)
    : DatasetError(reason + ", line " + std::to_string(line)),
      reason_(reason),
      line_(line) {}

ClassMap::ClassMap(std::vector<std::string> names) : names_(std::move(names)) {
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw DatasetError("class names must be non-empty");
    if (!seen.insert(n).second)
      throw DatasetError("duplicate class name: " + n);
  }
}

ClassMap ClassMap::poultry_default() {
  return ClassMap({"Fowl Pox", "Healthy", "Infectious Coryza",
                   "Newcastle Disease"});
}

ClassMap ClassMap::parse(std::string_view text) {
  std::vector<std::string> names;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    names.emplace_back(line);
    pos = end + 1;
  }
  while (!names.empty() && names.back().empty()) names.pop_back();
  if (names.empty()) throw DatasetError("class map is empty");
  return ClassMap(std::move(names));
}

ClassMap ClassMap::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot read class map: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::optional<int> ClassMap::id_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view tok, T& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

}  // namespace

NormalizedBox parse_label_line(std::string_view line, const ClassMap& classes,
                               int line_no) {
  const auto tokens = tokenize(line);
  if (tokens.size() != 5) throw LabelError("expected 5 fields", line_no);
  NormalizedBox box;
  if (!parse_number(tokens[0], box.class_id))
    throw LabelError("non-numeric class_id", line_no);
  double* fields[] = {&box.cx, &box.cy, &box.w, &box.h};
  for (int k = 0; k < 4; ++k) {
    if (!parse_number(tokens[k + 1], *fields[k]))
      throw LabelError("non-numeric coordinate", line_no);
  }
  if (!classes.contains(box.class_id))
    throw LabelError("class_id out of range", line_no);
  for (double v : {box.cx, box.cy, box.w, box.h}) {
    if (!(v >= 0.0 && v <= 1.0))
      throw LabelError("coordinate out of range", line_no);
  }
  if (!(box.w > 0.0 && box.h > 0.0))
    throw LabelError("box size must be positive", line_no);
  return box;
}

std::vector<NormalizedBox> parse_label_file(std::string_view text,
                                            const ClassMap& classes) {
  std::vector<NormalizedBox> out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (tokenize(line).empty()) continue;
    out.push_back(parse_label_line(line, classes, line_no));
  }
  return out;
}

std::string serialize_label_file(std::span<const NormalizedBox> boxes) {
  std::string out;
  char buf[128];
  for (const auto& b : boxes) {
    const int n = std::snprintf(buf, sizeof buf, "%d %.6f %.6f %.6f %.6f\n",
                                b.class_id, b.cx, b.cy, b.w, b.h);
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

}  // namespace coop
