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

// Append-only JSON Lines logs with size-based rotation.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <vector>

#include "json.hpp"

namespace coop::service {

class JsonlLog {
 public:
  // `max_bytes` == 0 disables rotation. Rotated files are named
  // <path>.1 (newest) ... <path>.<keep>.
  explicit JsonlLog(std::filesystem::path path, std::uint64_t max_bytes = 0,
                    int keep = 5);

  JsonlLog(const JsonlLog&) = delete;
  JsonlLog& operator=(const JsonlLog&) = delete;

  // Stamps the next sequence number into record["seq"], appends it and
  // flushes. Sequence numbers start at 1 and continue across rotation and
  // restarts. Returns the number assigned.
  std::uint64_t append(nlohmann::json record);

  // Records from the rotated files (oldest first) and the live file.
  std::vector<nlohmann::json> read_all() const;

  std::uint64_t last_sequence() const;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  void rotate();

  std::filesystem::path path_;
  std::uint64_t max_bytes_;
  int keep_;
  mutable std::mutex mu_;
  std::ofstream out_;
  std::uint64_t size_ = 0;
  std::uint64_t last_seq_ = 0;
};

}  // namespace coop::service
