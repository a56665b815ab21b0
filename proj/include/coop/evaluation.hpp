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

// Detection evaluation: matching, average precision, confidence sweeps,
// confusion matrices and per-class / macro-averaged reports.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "coop/dataset.hpp"
#include "coop/geometry.hpp"

namespace coop::eval {

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScoredDetection {
  std::string image_id;
  Detection detection;
};

struct GroundTruth {
  std::string image_id;
  int class_id = 0;
  BoundingBox box;
};

// {0.50, 0.55, ..., 0.95}.
std::vector<double> coco_iou_grid();

// {0, 1/(n-1), ..., 1}; the default has 1001 points (step 0.001).
std::vector<double> confidence_grid(std::size_t points = 1001);

struct MatchedDetection {
  std::string image_id;
  Detection detection;
  // One flag per IoU grid entry; non-increasing along the grid.
  std::vector<std::uint8_t> tp;
  std::optional<std::size_t> matched_gt;  // index into the image's gts
  double matched_iou = 0.0;
};

struct ImageMatch {
  std::vector<MatchedDetection> detections;  // in rank order
  std::vector<std::size_t> gt_counts;        // per class id
};

// Greedy matching for one image. Predictions are visited by confidence
// (descending, ties by x_min then input order); each takes the unmatched
// same-class ground truth with the highest IoU, provided that IoU reaches
// the lowest grid threshold. A matched detection is a true positive at every
// grid threshold its IoU reaches. `iou_grid` must be ascending in (0, 1].
ImageMatch match_detections(std::string_view image_id,
                            std::span<const Detection> preds,
                            std::span<const Detection> gts,
                            std::span<const double> iou_grid,
                            std::size_t num_classes);

// One entry of a dataset-wide ranked list for a single class and threshold.
struct RankedOutcome {
  double confidence = 0.0;
  std::string image_id;
  double x_min = 0.0;
  bool tp = false;
};

// Ranking order: confidence desc, image_id asc, x_min asc.
bool ranks_before(const RankedOutcome& a, const RankedOutcome& b);

// True if `ranked` follows (confidence desc, image_id asc, x_min asc).
bool is_ranked(std::span<const RankedOutcome> ranked);

// Sorts into ranking order.
void rank(std::vector<RankedOutcome>& outcomes);

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

// Cumulative (recall, precision) after each ranked detection.
std::vector<PrPoint> pr_points(std::span<const RankedOutcome> ranked,
                               std::size_t n_gt);

// Precision envelope sampled at 101 recall points {0, 0.01, ..., 1}.
std::vector<double> interpolated_precision(std::span<const PrPoint> points);

// 101-point interpolated AP. nullopt when there is nothing to score
// (n_gt == 0 and no detections); 0 when n_gt == 0 but detections exist.
// Throws EvaluationError if `ranked` is not in ranking order.
std::optional<double> average_precision(std::span<const RankedOutcome> ranked,
                                        std::size_t n_gt);

// Exact area under the monotone precision envelope, same conventions.
std::optional<double> average_precision_exact(
    std::span<const RankedOutcome> ranked, std::size_t n_gt);

struct ClassMetrics {
  int class_id = 0;
  std::size_t n_gt = 0;
  std::size_t n_pred = 0;
  double precision = 0.0;
  double recall = 0.0;
  std::optional<double> ap50;
  std::optional<double> ap50_95;

  bool defined() const noexcept { return ap50.has_value(); }
};

struct OverallMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double map50 = 0.0;
  double map50_95 = 0.0;
};

// Unweighted mean over classes with a defined AP. Throws EvaluationError if
// no class is defined.
OverallMetrics macro_average(std::span<const ClassMetrics> classes);

enum class CurveKind { kPrecision, kRecall, kF1 };

std::string_view curve_name(CurveKind kind) noexcept;

struct ConfidenceCurve {
  CurveKind kind = CurveKind::kPrecision;
  std::vector<double> confidence;
  std::vector<std::vector<double>> per_class;  // [class][grid index]
  std::vector<double> all_classes;             // pooled counts
};

struct BestF1 {
  double confidence = 0.0;
  double f1 = 0.0;
};

struct ConfidenceSweep {
  ConfidenceCurve precision;
  ConfidenceCurve recall;
  ConfidenceCurve f1;
  BestF1 best;
};

// Precision, recall and F1 of the detections scoring >= c, for each c in
// `grid`, using each detection's first-threshold TP flag. Precision is 1
// when nothing scores >= c. The all-class series pools counts across
// classes. Best F1 is the all-class maximum, smallest c on ties.
ConfidenceSweep confidence_sweep(std::span<const MatchedDetection> matched,
                                 std::span<const std::size_t> n_gt,
                                 std::span<const double> grid);

// Rows are predicted class, columns true class; index num_classes is
// background.
class ConfusionMatrix {
 public:
  ConfusionMatrix(std::size_t num_classes, double conf_threshold,
                  double iou_threshold);

  std::size_t num_classes() const noexcept { return k_; }
  std::size_t background() const noexcept { return k_; }
  double conf_threshold() const noexcept { return conf_; }
  double iou_threshold() const noexcept { return iou_; }

  std::uint64_t at(std::size_t predicted, std::size_t truth) const {
    return cells_.at(predicted * (k_ + 1) + truth);
  }
  std::uint64_t& at(std::size_t predicted, std::size_t truth) {
    return cells_.at(predicted * (k_ + 1) + truth);
  }
  std::uint64_t column_sum(std::size_t truth) const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t k_;
  double conf_;
  double iou_;
  std::vector<std::uint64_t> cells_;
};

// Class-agnostic spatial matching: predictions below `conf_threshold` are
// dropped, then pairs with IoU >= `iou_threshold` are taken greedily by
// descending IoU, each box used once.
ConfusionMatrix confusion_matrix(std::span<const ScoredDetection> preds,
                                 std::span<const GroundTruth> gts,
                                 std::size_t num_classes,
                                 double conf_threshold = 0.25,
                                 double iou_threshold = 0.45);

struct EvalConfig {
  std::vector<double> iou_grid = coco_iou_grid();
  std::vector<double> confidence_grid = eval::confidence_grid();
  double report_confidence = 0.25;
  double cm_confidence = 0.25;
  double cm_iou = 0.45;
};

struct PrCurve {
  int class_id = 0;
  double iou_threshold = 0.5;
  std::vector<PrPoint> points;
};

struct EvaluationResult {
  std::vector<ClassMetrics> per_class;
  OverallMetrics overall;
  std::vector<PrCurve> pr_curves;  // one per class at the first grid IoU
  ConfidenceSweep sweep;
  ConfusionMatrix confusion{0, 0.25, 0.45};
};

// Full evaluation. The first entry of config.iou_grid drives ap50, the
// precision/recall columns and the confidence sweep; ap50_95 averages AP
// over the whole grid. Throws EvaluationError when no class has ground truth.
EvaluationResult evaluate(std::span<const ScoredDetection> preds,
                          std::span<const GroundTruth> gts,
                          const ClassMap& classes,
                          const EvalConfig& config = {});

// --- Reporting -------------------------------------------------------------

std::string render_class_table(std::span<const ClassMetrics> per_class,
                               const ClassMap& classes);
std::string render_overall_table(const OverallMetrics& overall);

// Confidence curve as CSV: confidence, one column per class, all classes.
std::string curve_csv(const ConfidenceCurve& curve, const ClassMap& classes);
// PR curves on the 101-point recall grid.
std::string pr_curve_csv(std::span<const PrCurve> curves,
                         const ClassMap& classes);
std::string confusion_csv(const ConfusionMatrix& cm, const ClassMap& classes);

// Writes tables and CSVs into `dir` (created if needed).
void write_report(const std::filesystem::path& dir,
                  const EvaluationResult& result, const ClassMap& classes);

// --- I/O -------------------------------------------------------------------

// JSON Lines: {"image_id", "class_id", "confidence", "box": [x0,y0,x1,y1]}.
std::vector<ScoredDetection> parse_detections_jsonl(std::string_view text);
std::vector<ScoredDetection> load_detections(const std::filesystem::path& path);

std::vector<GroundTruth> ground_truth_from_corpus(
    std::span<const LabeledImage> corpus);

}  // namespace coop::eval
