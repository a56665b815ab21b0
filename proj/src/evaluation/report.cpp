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

#include <cstdio>
#include <fstream>
#include <sstream>

#include "coop/evaluation.hpp"

namespace coop::eval {

namespace {

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

// RFC 4180 field quoting.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void csv_row(std::ostringstream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_field(fields[i]);
  }
  out << "\r\n";
}

std::vector<std::string> class_header(std::string first, const ClassMap& classes) {
  std::vector<std::string> h{std::move(first)};
  for (const auto& n : classes.names()) h.push_back(n);
  return h;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw EvaluationError("cannot write " + path.string());
  out << text;
}

}  // namespace

std::string render_class_table(std::span<const ClassMetrics> per_class,
                               const ClassMap& classes) {
  std::size_t name_w = 5;
  for (const auto& n : classes.names()) name_w = std::max(name_w, n.size());
  name_w += 2;

  std::ostringstream out;
  out << "PER-CLASS PERFORMANCE\n"
      << pad("Class", name_w) << pad("Precision", 11) << pad("Recall", 8)
      << pad("mAP@0.5", 9) << "mAP@0.5-0.95\n";
  for (const auto& c : per_class) {
    out << pad(classes.name(c.class_id), name_w);
    if (!c.defined()) {
      out << pad("n/a", 11) << pad("n/a", 8) << pad("n/a", 9) << "n/a\n";
      continue;
    }
    out << pad(fixed3(c.precision), 11) << pad(fixed3(c.recall), 8)
        << pad(fixed3(*c.ap50), 9) << fixed3(*c.ap50_95) << "\n";
  }
  return out.str();
}

std::string render_overall_table(const OverallMetrics& o) {
  std::ostringstream out;
  out << "OVERALL PERFORMANCE (ALL CLASSES)\n"
      << pad("Metric", 16) << "Value\n"
      << pad("Precision (P)", 16) << fixed3(o.precision) << "\n"
      << pad("Recall (R)", 16) << fixed3(o.recall) << "\n"
      << pad("mAP@0.5", 16) << fixed3(o.map50) << "\n"
      << pad("mAP@0.5-0.95", 16) << fixed3(o.map50_95) << "\n";
  return out.str();
}

std::string curve_csv(const ConfidenceCurve& curve, const ClassMap& classes) {
  std::ostringstream out;
  auto header = class_header("confidence", classes);
  header.push_back("all classes");
  csv_row(out, header);
  for (std::size_t i = 0; i < curve.confidence.size(); ++i) {
    std::vector<std::string> row{fixed6(curve.confidence[i])};
    for (const auto& series : curve.per_class) row.push_back(fixed6(series[i]));
    row.push_back(fixed6(curve.all_classes[i]));
    csv_row(out, row);
  }
  return out.str();
}

std::string pr_curve_csv(std::span<const PrCurve> curves,
                         const ClassMap& classes) {
  std::vector<std::vector<double>> sampled;
  std::vector<bool> defined;
  for (const auto& c : curves) {
    sampled.push_back(interpolated_precision(c.points));
    defined.push_back(!c.points.empty());
  }
  std::ostringstream out;
  auto header = class_header("recall", classes);
  header.push_back("all classes");
  csv_row(out, header);
  for (int k = 0; k <= 100; ++k) {
    std::vector<std::string> row{fixed6(k / 100.0)};
    double sum = 0.0;
    int n = 0;
    for (std::size_t c = 0; c < sampled.size(); ++c) {
      row.push_back(fixed6(sampled[c][k]));
      if (defined[c]) {
        sum += sampled[c][k];
        ++n;
      }
    }
    row.push_back(fixed6(n ? sum / n : 0.0));
    csv_row(out, row);
  }
  return out.str();
}

std::string confusion_csv(const ConfusionMatrix& cm, const ClassMap& classes) {
  std::ostringstream out;
  auto header = class_header("predicted \\ true", classes);
  header.push_back("background");
  csv_row(out, header);
  for (std::size_t p = 0; p <= cm.num_classes(); ++p) {
    std::vector<std::string> row{
        p < cm.num_classes() ? classes.name(static_cast<int>(p)) : "background"};
    for (std::size_t t = 0; t <= cm.num_classes(); ++t)
      row.push_back(std::to_string(cm.at(p, t)));
    csv_row(out, row);
  }
  return out.str();
}

void write_report(const std::filesystem::path& dir,
                  const EvaluationResult& result, const ClassMap& classes) {
  std::filesystem::create_directories(dir);
  write_file(dir / "per_class.txt", render_class_table(result.per_class, classes));
  write_file(dir / "overall.txt", render_overall_table(result.overall));
  write_file(dir / "precision_confidence.csv", curve_csv(result.sweep.precision, classes));
  write_file(dir / "recall_confidence.csv", curve_csv(result.sweep.recall, classes));
  write_file(dir / "f1_confidence.csv", curve_csv(result.sweep.f1, classes));
  write_file(dir / "precision_recall.csv", pr_curve_csv(result.pr_curves, classes));
  write_file(dir / "confusion_matrix.csv", confusion_csv(result.confusion, classes));

  std::ostringstream best;
  best << "best_f1," << fixed6(result.sweep.best.f1) << "\r\n"
       << "confidence," << fixed6(result.sweep.best.confidence) << "\r\n";
  write_file(dir / "best_f1.csv", best.str());
}

}  // namespace coop::eval
