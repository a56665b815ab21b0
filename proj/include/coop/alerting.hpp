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

// N-of-M rolling-window disease alerts for one frame stream.

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "coop/timestamp.hpp"

namespace coop::service {

struct AlertRule {
  double confidence_floor = 0.497;
  std::size_t window_size = 5;  // M
  std::size_t min_hits = 3;     // N
  // Disease classes switched off for alerting; all others are monitored.
  std::set<int> disabled_classes;

  bool monitors(int class_id) const { return !disabled_classes.count(class_id); }
  // Throws std::invalid_argument unless 1 <= N <= M and the floor is in [0,1].
  void validate() const;
};

struct FrameRef {
  std::uint64_t index = 0;  // position in the stream, from 0
  std::string image_id;

  friend bool operator==(const FrameRef&, const FrameRef&) = default;
};

struct AlertEvent {
  std::string stream_id;
  int class_id = 0;
  std::string class_name;
  std::vector<FrameRef> window;  // the qualifying frames of the window
  TimePoint triggered_at;
  AlertRule rule;
};

// Window state per class. Not synchronized; the owning stream serializes
// access.
//
// A class opens an alert when at least N of the last M frames qualify and no
// alert is open for it. An open alert closes after M consecutive
// non-qualifying frames.
class AlertTracker {
 public:
  struct Transition {
    std::vector<int> opened;
    std::vector<int> closed;
  };

  AlertTracker(AlertRule rule, std::vector<int> classes);

  // `qualifying` holds the classes with a detection at or above the
  // confidence floor in this frame.
  Transition observe(const FrameRef& frame, const std::set<int>& qualifying);

  bool is_open(int class_id) const;
  // Qualifying frames currently inside the window for `class_id`.
  std::vector<FrameRef> window_hits(int class_id) const;
  // Marks an alert open, e.g. when recovering from the alert log.
  void restore_open(int class_id);

 private:
  struct ClassState {
    std::deque<std::pair<FrameRef, bool>> window;
    std::size_t hits = 0;
    bool open = false;
    std::size_t misses = 0;
  };

  AlertRule rule_;
  std::map<int, ClassState> state_;
};

}  // namespace coop::service
