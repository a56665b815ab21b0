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
#include <map>
#include <numeric>
#include <tuple>

#include "coop/evaluation.hpp"
#include "coop/kernels.hpp"

namespace coop::eval {

ConfusionMatrix::ConfusionMatrix(std::size_t num_classes, double conf_threshold,
                                 double iou_threshold)
    : k_(num_classes),
      conf_(conf_threshold),
      iou_(iou_threshold),
      cells_((num_classes + 1) * (num_classes + 1), 0) {}

std::uint64_t ConfusionMatrix::column_sum(std::size_t truth) const {
  std::uint64_t s = 0;
  for (std::size_t p = 0; p <= k_; ++p) s += at(p, truth);
  return s;
}

ConfusionMatrix confusion_matrix(std::span<const ScoredDetection> preds,
                                 std::span<const GroundTruth> gts,
                                 std::size_t num_classes, double conf_threshold,
                                 double iou_threshold) {
  if (!(conf_threshold > 0.0 && conf_threshold <= 1.0) ||
      !(iou_threshold > 0.0 && iou_threshold <= 1.0))
    throw EvaluationError("confusion matrix thresholds must be in (0, 1]");

  ConfusionMatrix cm(num_classes, conf_threshold, iou_threshold);
  const std::size_t bg = cm.background();
  auto check = [&](int c) {
    if (c < 0 || static_cast<std::size_t>(c) >= num_classes)
      throw EvaluationError("class id out of range in confusion matrix");
    return static_cast<std::size_t>(c);
  };

  std::map<std::string, std::pair<std::vector<Detection>, std::vector<Detection>>>
      images;
  for (const auto& p : preds) {
    check(p.detection.class_id);
    if (p.detection.confidence >= conf_threshold)
      images[p.image_id].first.push_back(p.detection);
  }
  for (const auto& g : gts) {
    check(g.class_id);
    images[g.image_id].second.push_back({g.box, g.class_id, 1.0});
  }

  std::vector<double> overlap;
  for (auto& [id, pair] : images) {
    auto& [ps, gs] = pair;
    const auto order = confidence_order(ps);
    kernels::BoxTable table;
    for (const auto& g : gs) table.push_back(g.box);
    overlap.resize(gs.size());

    // (iou, rank of prediction, gt index); best pairs first.
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t r = 0; r < order.size(); ++r) {
      if (gs.empty()) break;
      kernels::iou_one_to_many(ps[order[r]].box, table.columns(), overlap);
      for (std::size_t g = 0; g < gs.size(); ++g)
        if (overlap[g] >= iou_threshold) pairs.emplace_back(overlap[g], r, g);
    }
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
      if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
      if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
      return std::get<2>(a) < std::get<2>(b);
    });

    std::vector<char> pred_used(ps.size(), 0), gt_used(gs.size(), 0);
    for (const auto& [v, r, g] : pairs) {
      if (pred_used[r] || gt_used[g]) continue;
      pred_used[r] = gt_used[g] = 1;
      ++cm.at(check(ps[order[r]].class_id), check(gs[g].class_id));
    }
    for (std::size_t r = 0; r < order.size(); ++r)
      if (!pred_used[r]) ++cm.at(check(ps[order[r]].class_id), bg);
    for (std::size_t g = 0; g < gs.size(); ++g)
      if (!gt_used[g]) ++cm.at(bg, check(gs[g].class_id));
  }
  return cm;
}

}  // namespace coop::eval
