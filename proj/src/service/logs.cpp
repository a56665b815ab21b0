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

#include "coop/logs.hpp"

#include <stdexcept>

namespace fs = std::filesystem;

namespace coop::service {

namespace {

std::vector<nlohmann::json> read_records(const fs::path& path) {
  std::vector<nlohmann::json> out;
  std::ifstream in(path, std::ios::binary);
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    // A torn final line from a crash is skipped.
    auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (!j.is_discarded()) out.push_back(std::move(j));
  }
  return out;
}

fs::path rotated(const fs::path& base, int k) {
  return fs::path(base.string() + "." + std::to_string(k));
}

}  // namespace

JsonlLog::JsonlLog(fs::path path, std::uint64_t max_bytes, int keep)
    : path_(std::move(path)), max_bytes_(max_bytes), keep_(keep) {
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
  for (int k = keep_; k >= 1; --k) {
    for (const auto& r : read_records(rotated(path_, k)))
      last_seq_ = std::max(last_seq_, r.value("seq", std::uint64_t{0}));
  }
  for (const auto& r : read_records(path_))
    last_seq_ = std::max(last_seq_, r.value("seq", std::uint64_t{0}));
  std::error_code ec;
  size_ = fs::exists(path_, ec) ? fs::file_size(path_) : 0;
  bool torn = false;
  if (size_ > 0) {
    std::ifstream in(path_, std::ios::binary);
    in.seekg(-1, std::ios::end);
    torn = in.get() != '\n';
  }
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) throw std::runtime_error("cannot open log " + path_.string());
  if (torn) {
    out_ << '\n';
    out_.flush();
    ++size_;
  }
}

void JsonlLog::rotate() {
  out_.close();
  std::error_code ec;
  fs::remove(rotated(path_, keep_), ec);
  for (int k = keep_ - 1; k >= 1; --k) {
    if (fs::exists(rotated(path_, k), ec))
      fs::rename(rotated(path_, k), rotated(path_, k + 1));
  }
  if (keep_ >= 1)
    fs::rename(path_, rotated(path_, 1));
  else
    fs::remove(path_, ec);
  out_.open(path_, std::ios::binary | std::ios::trunc);
  if (!out_) throw std::runtime_error("cannot reopen log " + path_.string());
  size_ = 0;
}

std::uint64_t JsonlLog::append(nlohmann::json record) {
  std::lock_guard lock(mu_);
  const std::uint64_t seq = last_seq_ + 1;
  record["seq"] = seq;
  const std::string line = record.dump() + "\n";
  if (max_bytes_ > 0 && size_ > 0 && size_ + line.size() > max_bytes_) rotate();
  out_ << line;
  out_.flush();
  if (!out_) throw std::runtime_error("write failed on log " + path_.string());
  size_ += line.size();
  last_seq_ = seq;
  return seq;
}

std::vector<nlohmann::json> JsonlLog::read_all() const {
  std::lock_guard lock(mu_);
  std::vector<nlohmann::json> out;
  for (int k = keep_; k >= 1; --k) {
    auto part = read_records(rotated(path_, k));
    std::move(part.begin(), part.end(), std::back_inserter(out));
  }
  auto live = read_records(path_);
  std::move(live.begin(), live.end(), std::back_inserter(out));
  return out;
}

std::uint64_t JsonlLog::last_sequence() const {
  std::lock_guard lock(mu_);
  return last_seq_;
}

}  // namespace coop::service
