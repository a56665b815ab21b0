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

#include "coop/evaluation.hpp"
#include "coop/kernels.hpp"

namespace coop::eval {

std::string_view curve_name(CurveKind kind) noexcept {
  switch (kind) {
    case CurveKind::kPrecision:
      return "precision";
    case CurveKind::kRecall:
      return "recall";
    case CurveKind::kF1:
      return "f1";
  }
  return "?";
}

namespace {

double precision_of(std::uint64_t tp, std::uint64_t n) {
  return n == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(n);
}

double recall_of(std::uint64_t tp, std::size_t n_gt) {
  return n_gt == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(n_gt);
}

double f1_of(double p, double r) {
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

}  // namespace

ConfidenceSweep confidence_sweep(std::span<const MatchedDetection> matched,
                                 std::span<const std::size_t> n_gt,
                                 std::span<const double> grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0) || (i > 0 && !(grid[i] > grid[i - 1])))
      throw EvaluationError("confidence grid must be strictly increasing in [0, 1]");
  }
  const std::size_t k = n_gt.size();
  const std::size_t g = grid.size();

  std::vector<std::vector<double>> scores(k);
  std::vector<std::vector<std::uint8_t>> positive(k);
  for (const auto& m : matched) {
    const auto c = static_cast<std::size_t>(m.detection.class_id);
    if (c >= k) throw EvaluationError("detection class out of range");
    scores[c].push_back(m.detection.confidence);
    positive[c].push_back(m.tp.empty() ? 0 : m.tp.front());
  }

  ConfidenceSweep out;
  for (auto* curve : {&out.precision, &out.recall, &out.f1}) {
    curve->confidence.assign(grid.begin(), grid.end());
    curve->per_class.assign(k, std::vector<double>(g, 0.0));
    curve->all_classes.assign(g, 0.0);
  }
  out.precision.kind = CurveKind::kPrecision;
  out.recall.kind = CurveKind::kRecall;
  out.f1.kind = CurveKind::kF1;

  std::vector<std::uint64_t> above(g), pos(g);
  std::vector<std::uint64_t> all_above(g, 0), all_pos(g, 0);
  std::size_t all_gt = 0;
  for (std::size_t c = 0; c < k; ++c) {
    kernels::threshold_counts(scores[c], positive[c], grid, above, pos);
    for (std::size_t i = 0; i < g; ++i) {
      const double p = precision_of(pos[i], above[i]);
      const double r = recall_of(pos[i], n_gt[c]);
      out.precision.per_class[c][i] = p;
      out.recall.per_class[c][i] = r;
      out.f1.per_class[c][i] = f1_of(p, r);
      all_above[i] += above[i];
      all_pos[i] += pos[i];
    }
    all_gt += n_gt[c];
  }

  bool have_best = false;
  for (std::size_t i = 0; i < g; ++i) {
    const double p = precision_of(all_pos[i], all_above[i]);
    const double r = recall_of(all_pos[i], all_gt);
    const double f = f1_of(p, r);
    out.precision.all_classes[i] = p;
    out.recall.all_classes[i] = r;
    out.f1.all_classes[i] = f;
    if (!have_best || f > out.best.f1) {
      out.best = {grid[i], f};
      have_best = true;
    }
  }
  return out;
}

EvaluationResult evaluate(std::span<const ScoredDetection> preds,
                          std::span<const GroundTruth> gts,
                          const ClassMap& classes, const EvalConfig& config) {
  const std::size_t k = classes.size();
  const auto& grid = config.iou_grid;
  if (grid.empty()) throw EvaluationError("empty IoU grid");

  struct PerImage {
    std::vector<Detection> preds;
    std::vector<Detection> gts;
  };
  std::map<std::string, PerImage> images;
  for (const auto& p : preds) {
    if (!classes.contains(p.detection.class_id))
      throw EvaluationError("detection class_id out of range in image " +
                            p.image_id);
    images[p.image_id].preds.push_back(p.detection);
  }
  for (const auto& g : gts) {
    if (!classes.contains(g.class_id))
      throw EvaluationError("ground truth class_id out of range in image " +
                            g.image_id);
    images[g.image_id].gts.push_back({g.box, g.class_id, 1.0});
  }

  std::vector<MatchedDetection> matched;
  std::vector<std::size_t> n_gt(k, 0);
  for (const auto& [id, img] : images) {
    auto m = match_detections(id, img.preds, img.gts, grid, k);
    for (std::size_t c = 0; c < k; ++c) n_gt[c] += m.gt_counts[c];
    std::move(m.detections.begin(), m.detections.end(),
              std::back_inserter(matched));
  }
  if (std::all_of(n_gt.begin(), n_gt.end(), [](std::size_t n) { return n == 0; }))
    throw EvaluationError("nothing to evaluate");

  EvaluationResult result;
  result.sweep = confidence_sweep(matched, n_gt, config.confidence_grid);

  for (std::size_t c = 0; c < k; ++c) {
    std::vector<const MatchedDetection*> mine;
    for (const auto& m : matched)
      if (static_cast<std::size_t>(m.detection.class_id) == c) mine.push_back(&m);

    ClassMetrics cm;
    cm.class_id = static_cast<int>(c);
    cm.n_gt = n_gt[c];
    cm.n_pred = mine.size();

    std::vector<RankedOutcome> ranked;
    std::uint64_t above = 0, tp_above = 0;
    for (const auto* m : mine) {
      ranked.push_back({m->detection.confidence, m->image_id,
                        m->detection.box.x_min, m->tp.front() != 0});
      if (m->detection.confidence >= config.report_confidence) {
        ++above;
        tp_above += m->tp.front();
      }
    }
    cm.precision = precision_of(tp_above, above);
    cm.recall = recall_of(tp_above, n_gt[c]);

    // Ranking does not depend on the threshold, so rank once and only
    // rewrite the TP flags per threshold.
    std::vector<std::size_t> order(ranked.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return ranks_before(ranked[a], ranked[b]);
    });

    std::vector<RankedOutcome> at_threshold(ranked.size());
    double sum = 0.0;
    for (std::size_t t = 0; t < grid.size(); ++t) {
      for (std::size_t i = 0; i < order.size(); ++i) {
        at_threshold[i] = ranked[order[i]];
        at_threshold[i].tp = mine[order[i]]->tp[t] != 0;
      }
      const auto ap = average_precision(at_threshold, n_gt[c]);
      if (!ap) break;
      if (t == 0) {
        cm.ap50 = ap;
        result.pr_curves.push_back(
            {static_cast<int>(c), grid[0], pr_points(at_threshold, n_gt[c])});
      }
      sum += *ap;
    }
    if (cm.ap50) {
      cm.ap50_95 = sum / static_cast<double>(grid.size());
    } else {
      result.pr_curves.push_back({static_cast<int>(c), grid[0], {}});
    }
    result.per_class.push_back(cm);
  }

  result.overall = macro_average(result.per_class);
  result.confusion = confusion_matrix(preds, gts, k, config.cm_confidence,
                                      config.cm_iou);
  return result;
}

}  // namespace coop::eval
