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

#include "coop/alerting.hpp"

#include <stdexcept>

namespace coop::service {

void AlertRule::validate() const {
  if (!(confidence_floor >= 0.0 && confidence_floor <= 1.0))
    throw std::invalid_argument("alert confidence_floor must be in [0, 1]");
  if (min_hits < 1 || min_hits > window_size)
    throw std::invalid_argument("alert rule needs 1 <= min_hits <= window_size");
}

AlertTracker::AlertTracker(AlertRule rule, std::vector<int> classes)
    : rule_(std::move(rule)) {
  rule_.validate();
  for (int c : classes)
    if (rule_.monitors(c)) state_[c];
}

AlertTracker::Transition AlertTracker::observe(const FrameRef& frame,
                                               const std::set<int>& qualifying) {
  Transition t;
  for (auto& [cls, st] : state_) {
    const bool hit = qualifying.count(cls) > 0;
    st.window.emplace_back(frame, hit);
    st.hits += hit ? 1 : 0;
    if (st.window.size() > rule_.window_size) {
      st.hits -= st.window.front().second ? 1 : 0;
      st.window.pop_front();
    }

    if (st.open) {
      st.misses = hit ? 0 : st.misses + 1;
      if (st.misses >= rule_.window_size) {
        st.open = false;
        st.misses = 0;
        t.closed.push_back(cls);
      }
    } else if (st.hits >= rule_.min_hits) {
      st.open = true;
      st.misses = 0;
      t.opened.push_back(cls);
    }
  }
  return t;
}

bool AlertTracker::is_open(int class_id) const {
  const auto it = state_.find(class_id);
  return it != state_.end() && it->second.open;
}

std::vector<FrameRef> AlertTracker::window_hits(int class_id) const {
  std::vector<FrameRef> out;
  const auto it = state_.find(class_id);
  if (it == state_.end()) return out;
  for (const auto& [f, hit] : it->second.window)
    if (hit) out.push_back(f);
  return out;
}

void AlertTracker::restore_open(int class_id) {
  const auto it = state_.find(class_id);
  if (it == state_.end()) return;
  it->second.open = true;
  it->second.misses = 0;
}

}  // namespace coop::service
