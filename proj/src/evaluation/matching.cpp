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
#include <numeric>

#include "coop/evaluation.hpp"
#include "coop/kernels.hpp"

namespace coop::eval {

std::vector<double> coco_iou_grid() {
  std::vector<double> grid;
  for (int k = 0; k < 10; ++k) grid.push_back((50 + 5 * k) / 100.0);
  return grid;
}

std::vector<double> confidence_grid(std::size_t points) {
  if (points < 2) throw EvaluationError("confidence grid needs >= 2 points");
  std::vector<double> grid(points);
  const double steps = static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = static_cast<double>(i) / steps;
  return grid;
}

ImageMatch match_detections(std::string_view image_id,
                            std::span<const Detection> preds,
                            std::span<const Detection> gts,
                            std::span<const double> iou_grid,
                            std::size_t num_classes) {
  if (iou_grid.empty()) throw EvaluationError("empty IoU grid");
  for (std::size_t k = 0; k < iou_grid.size(); ++k) {
    if (!(iou_grid[k] > 0.0 && iou_grid[k] <= 1.0) ||
        (k > 0 && !(iou_grid[k] > iou_grid[k - 1])))
      throw EvaluationError("IoU grid must be ascending in (0, 1]");
  }

  ImageMatch out;
  out.gt_counts.assign(num_classes, 0);
  for (const auto& g : gts) {
    if (g.class_id < 0 || static_cast<std::size_t>(g.class_id) >= num_classes)
      throw EvaluationError("ground truth class out of range");
    ++out.gt_counts[static_cast<std::size_t>(g.class_id)];
  }

  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (preds[i].confidence != preds[j].confidence)
      return preds[i].confidence > preds[j].confidence;
    return preds[i].box.x_min < preds[j].box.x_min;
  });

  kernels::BoxTable table;
  for (const auto& g : gts) table.push_back(g.box);
  std::vector<char> taken(gts.size(), 0);
  std::vector<double> overlap(gts.size());
  const double floor_iou = iou_grid.front();

  for (std::size_t idx : order) {
    const Detection& p = preds[idx];
    MatchedDetection m{std::string(image_id), p,
                       std::vector<std::uint8_t>(iou_grid.size(), 0),
                       std::nullopt, 0.0};
    if (!gts.empty()) {
      kernels::iou_one_to_many(p.box, table.columns(), overlap);
      std::optional<std::size_t> best;
      for (std::size_t g = 0; g < gts.size(); ++g) {
        if (taken[g] || gts[g].class_id != p.class_id) continue;
        if (overlap[g] < floor_iou) continue;
        if (!best || overlap[g] > overlap[*best]) best = g;
      }
      if (best) {
        taken[*best] = 1;
        m.matched_gt = *best;
        m.matched_iou = overlap[*best];
        for (std::size_t k = 0; k < iou_grid.size(); ++k)
          m.tp[k] = m.matched_iou >= iou_grid[k] ? 1 : 0;
      }
    }
    out.detections.push_back(std::move(m));
  }
  return out;
}

}  // namespace coop::eval
