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

#include "coop/evaluation.hpp"

namespace coop::eval {

bool ranks_before(const RankedOutcome& a, const RankedOutcome& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  if (a.image_id != b.image_id) return a.image_id < b.image_id;
  return a.x_min < b.x_min;
}

namespace {

constexpr int kRecallSamples = 101;

}  // namespace

bool is_ranked(std::span<const RankedOutcome> ranked) {
  for (std::size_t i = 1; i < ranked.size(); ++i)
    if (ranks_before(ranked[i], ranked[i - 1])) return false;
  return true;
}

void rank(std::vector<RankedOutcome>& outcomes) {
  std::stable_sort(outcomes.begin(), outcomes.end(), ranks_before);
}

std::vector<PrPoint> pr_points(std::span<const RankedOutcome> ranked,
                               std::size_t n_gt) {
  std::vector<PrPoint> points;
  points.reserve(ranked.size());
  std::size_t tp = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    tp += ranked[i].tp ? 1 : 0;
    const double recall =
        n_gt == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(n_gt);
    points.push_back({recall, static_cast<double>(tp) / static_cast<double>(i + 1)});
  }
  return points;
}

namespace {

// env[i] = max precision over points i..end.
std::vector<double> envelope(std::span<const PrPoint> points) {
  std::vector<double> env(points.size());
  double running = 0.0;
  for (std::size_t i = points.size(); i-- > 0;) {
    running = std::max(running, points[i].precision);
    env[i] = running;
  }
  return env;
}

void require_ranked(std::span<const RankedOutcome> ranked) {
  if (!is_ranked(ranked))
    throw EvaluationError("detections are not in ranking order");
}

}  // namespace

std::vector<double> interpolated_precision(std::span<const PrPoint> points) {
  const auto env = envelope(points);
  std::vector<double> samples(kRecallSamples, 0.0);
  std::size_t i = 0;
  for (int k = 0; k < kRecallSamples; ++k) {
    const double r = k / 100.0;
    while (i < points.size() && points[i].recall < r) ++i;
    if (i == points.size()) break;
    samples[k] = env[i];
  }
  return samples;
}

std::optional<double> average_precision(std::span<const RankedOutcome> ranked,
                                        std::size_t n_gt) {
  require_ranked(ranked);
  if (n_gt == 0) return ranked.empty() ? std::nullopt : std::optional(0.0);
  const auto samples = interpolated_precision(pr_points(ranked, n_gt));
  double sum = 0.0;
  for (double s : samples) sum += s;
  return sum / kRecallSamples;
}

std::optional<double> average_precision_exact(
    std::span<const RankedOutcome> ranked, std::size_t n_gt) {
  require_ranked(ranked);
  if (n_gt == 0) return ranked.empty() ? std::nullopt : std::optional(0.0);
  const auto points = pr_points(ranked, n_gt);
  const auto env = envelope(points);
  double area = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].recall > prev_recall) {
      area += (points[i].recall - prev_recall) * env[i];
      prev_recall = points[i].recall;
    }
  }
  return area;
}

OverallMetrics macro_average(std::span<const ClassMetrics> classes) {
  OverallMetrics o;
  std::size_t n = 0;
  for (const auto& c : classes) {
    if (!c.defined()) continue;
    o.precision += c.precision;
    o.recall += c.recall;
    o.map50 += *c.ap50;
    o.map50_95 += c.ap50_95.value_or(*c.ap50);
    ++n;
  }
  if (n == 0) throw EvaluationError("nothing to evaluate");
  const double d = static_cast<double>(n);
  o.precision /= d;
  o.recall /= d;
  o.map50 /= d;
  o.map50_95 /= d;
  return o;
}

}  // namespace coop::eval
