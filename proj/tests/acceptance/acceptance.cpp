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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "coop/cli.hpp"
#include "coop/evaluation.hpp"
#include "coop/geometry.hpp"
#include "coop/http.hpp"
#include "coop/image.hpp"
#include "coop/inference.hpp"
#include "coop/kernels.hpp"
#include "coop/service.hpp"
#include "httplib.h"
#include "json.hpp"
#include "testing.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace coop;
namespace t = coop::testing;

// Tolerances.
constexpr double kMacroTol = 0.0005;
constexpr double kAp101Tol = 0.01;
constexpr double kApExactTol = 1e-9;
constexpr double kBestF1Tol = 0.01;
constexpr double kBestConfTol = 0.002;

// Instance counts.
constexpr int kApInstances = 1000;
constexpr int kNmsInstances = 1000;
constexpr int kMatchInstances = 1000;
constexpr int kAlertSequences = 500;
constexpr int kConcurrentPredicts = 32;

struct Result {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void report(const char* id, const char* title, const std::function<Result()>& check) {
  const auto t0 = std::chrono::steady_clock::now();
  Result r;
  try {
    r = check();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!r.pass) ++g_failures;
  std::printf("[%s] %s %s: %s (%.2fs)\n", r.pass ? "PASS" : "FAIL", id, title,
              r.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// --- 1 ---------------------------------------------------------------------

Result macro_average_reproduction() {
  const std::vector<eval::ClassMetrics> table1{
      {0, 1, 1, 0.683, 0.870, 0.898, 0.744},
      {1, 1, 1, 0.676, 1.000, 0.995, 0.903},
      {2, 1, 1, 0.412, 1.000, 0.995, 0.697},
      {3, 1, 1, 1.000, 0.598, 0.995, 0.554},
  };
  const double table2[4] = {0.693, 0.867, 0.971, 0.724};
  const auto o = eval::macro_average(table1);
  const double got[4] = {o.precision, o.recall, o.map50, o.map50_95};
  double worst = 0;
  for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(got[i] - table2[i]));
  return {worst <= kMacroTol,
          fmt("P %.5f R %.5f mAP50 %.5f mAP50-95 %.5f", got[0], got[1], got[2], got[3]) +
              fmt(", max deviation %.5f <= %.4f", worst, kMacroTol)};
}

Result table_fixture_via_cli() {
  t::TempDir d;
  const auto root = t::fixture_dir() / "table1";
  std::ostringstream out, err;
  const int code = cli::run({"eval", "run", "--gt", root.string(), "--dets",
                             (root / "detections.jsonl").string(), "--out",
                             (d.path() / "report").string()},
                            out, err);
  if (code != 0) return {false, "eval run exited " + std::to_string(code) + ": " + err.str()};
  const std::vector<std::string> rows{
      "Fowl Pox           0.683      0.870   0.898    0.744",
      "Healthy            0.676      1.000   0.995    0.903",
      "Infectious Coryza  0.412      1.000   0.995    0.697",
      "Newcastle Disease  1.000      0.598   0.995    0.554",
      "Precision (P)   0.693", "Recall (R)      0.867",
      "mAP@0.5         0.971", "mAP@0.5-0.95    0.724"};
  int matched = 0;
  std::string missing;
  for (const auto& r : rows) {
    if (out.str().find(r) != std::string::npos) ++matched;
    else missing += " [" + r + "]";
  }
  return {matched == static_cast<int>(rows.size()),
          std::to_string(matched) + "/" + std::to_string(rows.size()) +
              " reference table rows reproduced by eval run" + missing};
}

// --- 2 ---------------------------------------------------------------------

struct Instance {
  std::vector<Detection> preds, gts;
};

Instance random_instance(std::mt19937_64& rng, std::size_t max_classes, std::size_t max_preds,
                         std::size_t max_gts) {
  Instance in;
  const int classes = 1 + static_cast<int>(rng() % max_classes);
  const std::size_t np = rng() % (max_preds + 1), ng = rng() % (max_gts + 1);
  for (std::size_t i = 0; i < ng; ++i)
    in.gts.push_back({t::random_box(rng, 6), static_cast<int>(rng() % classes), 1.0});
  for (std::size_t i = 0; i < np; ++i) {
    Detection d{t::random_box(rng, 6), static_cast<int>(rng() % classes),
                static_cast<double>(1 + rng() % 20) / 20.0};
    // Half the predictions are jittered copies of a truth so matches happen.
    if (!in.gts.empty() && rng() % 2) {
      const auto& g = in.gts[rng() % in.gts.size()];
      std::uniform_real_distribution<double> j(-0.4, 0.4);
      d.box = {g.box.x_min + j(rng), g.box.y_min + j(rng), g.box.x_max + j(rng),
               g.box.y_max + j(rng)};
      if (!d.box.valid() || d.box.width() <= 0 || d.box.height() <= 0) d.box = g.box;
      d.class_id = rng() % 4 ? g.class_id : d.class_id;
    }
    in.preds.push_back(d);
  }
  return in;
}

Result ap_oracle_equivalence() {
  std::mt19937_64 rng(20261016);
  const auto grid = eval::coco_iou_grid();
  int checked = 0;
  double worst_101 = 0, worst_exact = 0, worst_101_ref = 0;
  for (int trial = 0; trial < kApInstances; ++trial) {
    const auto in = random_instance(rng, 4, 6, 4);
    const auto m = eval::match_detections("img", in.preds, in.gts, grid, 4);
    for (int c = 0; c < 4; ++c) {
      const std::size_t n_gt = m.gt_counts[c];
      if (n_gt == 0) continue;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        std::vector<eval::RankedOutcome> ranked;
        for (const auto& d : m.detections)
          if (d.detection.class_id == c)
            ranked.push_back({d.detection.confidence, d.image_id, d.detection.box.x_min,
                              d.tp[k] != 0});
        eval::rank(ranked);
        std::vector<bool> flags;
        for (const auto& r : ranked) flags.push_back(r.tp);
        const double ap = *eval::average_precision(ranked, n_gt);
        const double exact = *eval::average_precision_exact(ranked, n_gt);
        worst_101 = std::max(worst_101, std::abs(ap - t::ref_ap_exact(flags, n_gt)));
        worst_exact = std::max(worst_exact, std::abs(exact - t::ref_ap_rectangles(flags, n_gt)));
        worst_101_ref = std::max(worst_101_ref, std::abs(ap - t::ref_ap_101(flags, n_gt)));
        ++checked;
      }
    }
  }
  const bool ok = worst_101 <= kAp101Tol && worst_exact <= kApExactTol && worst_101_ref <= 1e-12;
  return {ok, std::to_string(kApInstances) + " instances, " + std::to_string(checked) +
                  " (class, threshold) curves; " +
                  fmt("max |AP101 - exact oracle| %.5f <= %.2f, max |exact - rectangle oracle| "
                      "%.1e <= %.0e, ",
                      worst_101, kAp101Tol, worst_exact, kApExactTol) +
                  fmt("max |AP101 - direct 101-point| %.1e", worst_101_ref)};
}

// --- 3 ---------------------------------------------------------------------

Result nms_equivalence() {
  std::mt19937_64 rng(3);
  int mismatches = 0;
  std::size_t total_kept = 0;
  for (int trial = 0; trial < kNmsInstances; ++trial) {
    std::vector<Detection> d;
    const int n = static_cast<int>(rng() % 51);
    for (int i = 0; i < n; ++i)
      d.push_back({t::random_box(rng, 40), static_cast<int>(rng() % 4),
                   static_cast<double>(rng() % 30) / 29.0});
    const double thr = static_cast<double>(rng() % 101) / 100.0;
    const auto got = nms(d, thr);
    total_kept += got.size();
    if (got != t::ref_nms(d, thr)) ++mismatches;
  }
  return {mismatches == 0, std::to_string(kNmsInstances) + " random sets of <= 50 boxes, " +
                               std::to_string(mismatches) + " mismatches vs O(n^2) reference (" +
                               std::to_string(total_kept) + " boxes kept in total)"};
}

// --- 4 ---------------------------------------------------------------------

Result matching_properties() {
  std::mt19937_64 rng(4);
  const auto grid = eval::coco_iou_grid();
  int monotone_violations = 0, column_violations = 0;
  std::size_t detections = 0;
  for (int trial = 0; trial < kMatchInstances; ++trial) {
    const auto in = random_instance(rng, 4, 8, 6);
    const auto m = eval::match_detections("img", in.preds, in.gts, grid, 4);
    for (const auto& d : m.detections) {
      ++detections;
      for (std::size_t k = 1; k < d.tp.size(); ++k)
        if (d.tp[k] > d.tp[k - 1]) ++monotone_violations;
    }
    std::vector<eval::ScoredDetection> preds;
    std::vector<eval::GroundTruth> gts;
    std::vector<std::uint64_t> counts(4, 0);
    for (const auto& p : in.preds) preds.push_back({"img", p});
    for (const auto& g : in.gts) {
      gts.push_back({"img", g.class_id, g.box});
      ++counts[g.class_id];
    }
    const auto cm = eval::confusion_matrix(preds, gts, 4);
    for (std::size_t c = 0; c < 4; ++c)
      if (cm.column_sum(c) != counts[c]) ++column_violations;
  }
  return {monotone_violations == 0 && column_violations == 0,
          std::to_string(kMatchInstances) + " instances, " + std::to_string(detections) +
              " detections; " + std::to_string(monotone_violations) +
              " TP-flag monotonicity violations, " + std::to_string(column_violations) +
              " confusion column-sum mismatches"};
}

// --- 5 ---------------------------------------------------------------------

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(t::read_file(p));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char ch : line) {
      if (ch == '"') quoted = !quoted;
      else if (ch == ',' && !quoted) cells.push_back(std::exchange(cell, {}));
      else cell += ch;
    }
    cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

Result end_to_end_fixture() {
  const auto root = t::fixture_dir() / "replay";
  const auto expected = json::parse(t::read_file(root / "expected.json"));
  t::TempDir d;

  // Replay every image through the detector and post-processing, the way the
  // service does, and write the detections for the evaluator.
  const infer::ReplayDetector detector(infer::ReplayStore::load(root / "replay.jsonl"));
  const infer::PostprocessConfig post{0.001, 0.45, 300};
  std::ofstream dets(d.path() / "dets.jsonl");
  std::size_t n_images = 0, n_dets = 0;
  for (const auto& entry : fs::directory_iterator(root / "images")) {
    const auto text = t::read_file(entry.path());
    const std::vector<std::uint8_t> bytes(text.begin(), text.end());
    const auto raw = detector.infer({bytes, entry.path().stem().string()});
    for (const auto& det : infer::postprocess(raw, post)) {
      dets << json{{"image_id", raw.image_id},
                   {"class_id", det.class_id},
                   {"confidence", det.confidence},
                   {"box", {det.box.x_min, det.box.y_min, det.box.x_max, det.box.y_max}}}
                  .dump()
           << "\n";
      ++n_dets;
    }
    ++n_images;
  }
  dets.close();

  std::ostringstream out, err;
  const int code = cli::run({"eval", "run", "--gt", root.string(), "--dets",
                             (d.path() / "dets.jsonl").string(), "--out",
                             (d.path() / "report").string()},
                            out, err);
  if (code != 0) return {false, "eval run exited " + std::to_string(code) + ": " + err.str()};

  double f1 = -1, conf = -1;
  for (const auto& row : read_csv(d.path() / "report" / "best_f1.csv")) {
    if (row.size() == 2 && row[0] == "best_f1") f1 = std::stod(row[1]);
    if (row.size() == 2 && row[0] == "confidence") conf = std::stod(row[1]);
  }
  const auto cm_rows = read_csv(d.path() / "report" / "confusion_matrix.csv");
  const auto& want = expected["confusion_matrix"];
  bool cm_ok = cm_rows.size() == want.size() + 1;
  for (std::size_t r = 0; cm_ok && r < want.size(); ++r) {
    cm_ok = cm_rows[r + 1].size() == want[r].size() + 1;
    for (std::size_t c = 0; cm_ok && c < want[r].size(); ++c)
      cm_ok = std::stoll(cm_rows[r + 1][c + 1]) == want[r][c].get<long long>();
  }
  const long long pox_as_healthy = cm_ok ? std::stoll(cm_rows[2][1]) : -1;

  const double want_f1 = expected["best_f1"], want_conf = expected["best_confidence"];
  const bool ok = std::abs(f1 - want_f1) <= kBestF1Tol &&
                  std::abs(conf - want_conf) <= kBestConfTol && cm_ok && pox_as_healthy == 1;
  return {ok, std::to_string(n_images) + " images, " + std::to_string(n_dets) +
                  " post-processed detections; " +
                  fmt("best F1 %.4f (designed %.4f, tol %.2f) at confidence %.3f", f1, want_f1,
                      kBestF1Tol, conf) +
                  fmt(" (designed %.3f, tol %.3f); ", want_conf, kBestConfTol) +
                  (cm_ok ? "confusion matrix exact, " : "confusion matrix differs, ") +
                  "Fowl Pox predicted as Healthy = " + std::to_string(pox_as_healthy)};
}

// --- 6 ---------------------------------------------------------------------

Result alert_window_property() {
  std::mt19937_64 rng(6);
  t::TempDir d;
  std::size_t frames_total = 0, events_total = 0, reopen_sequences = 0;
  int mismatches = 0;
  std::string first_mismatch;
  for (int trial = 0; trial < kAlertSequences; ++trial) {
    const std::size_t m = 1 + rng() % 8;
    const std::size_t n = 1 + rng() % m;
    const std::size_t len = 1 + rng() % 100;
    const double density = static_cast<double>(rng() % 101) / 100.0;

    // Disease classes are 0, 2 and 3; class 1 (Healthy) never alerts, and
    // sub-floor detections never qualify.
    infer::ReplayStore store;
    std::vector<std::set<int>> qualifying(len);
    for (std::size_t i = 0; i < len; ++i) {
      std::vector<Detection> dets;
      double x = 0;
      for (int c : {0, 2, 3}) {
        const double u = static_cast<double>(rng() % 1000) / 1000.0;
        if (u < density) {
          dets.push_back({{x, 0, x + 10, 10}, c, 0.497 + 0.5 * u});
          qualifying[i].insert(c);
        } else if (u < density + 0.2) {
          dets.push_back({{x, 0, x + 10, 10}, c, 0.3});
        }
        x += 20;
      }
      if (rng() % 2) dets.push_back({{x, 0, x + 10, 10}, 1, 0.95});
      store.add("f" + std::to_string(i), std::move(dets));
    }

    service::Service::Options o;
    o.alert.window_size = m;
    o.alert.min_hits = n;
    o.log_dir = d.path() / std::to_string(trial);
    service::Service svc(ClassMap::poultry_default(),
                         std::make_shared<infer::ReplayDetector>(std::move(store)), o);
    std::vector<t::SimEvent> got;
    for (std::size_t i = 0; i < len; ++i) {
      const auto r = svc.ingest_frame("barn", {{}, "f" + std::to_string(i)});
      for (const auto& e : r.alerts) {
        std::vector<std::uint64_t> w;
        for (const auto& f : e.window) w.push_back(f.index);
        got.push_back({e.class_id, r.frame_index, w});
      }
    }
    const auto want = t::simulate_alerts(qualifying, n, m);
    bool same = got.size() == want.size();
    for (std::size_t i = 0; same && i < got.size(); ++i)
      same = got[i].class_id == want[i].class_id && got[i].frame == want[i].frame &&
             got[i].window == want[i].window;
    if (!same && mismatches++ == 0)
      first_mismatch = " first mismatch in sequence " + std::to_string(trial);
    std::map<int, int> per_class;
    for (const auto& e : want) ++per_class[e.class_id];
    for (const auto& [c, k] : per_class)
      if (k > 1) {
        ++reopen_sequences;
        break;
      }
    frames_total += len;
    events_total += want.size();
  }
  return {mismatches == 0,
          std::to_string(kAlertSequences) + " sequences, " + std::to_string(frames_total) +
              " frames, " + std::to_string(events_total) + " alert events (" +
              std::to_string(reopen_sequences) + " sequences with reopening); " +
              std::to_string(mismatches) + " mismatches vs brute-force simulator" +
              first_mismatch};
}

// --- 7 ---------------------------------------------------------------------

Result service_contract() {
  const auto root = t::fixture_dir() / "replay";
  t::TempDir d;
  service::Service::Options o;
  o.log_dir = d.path() / "logs";
  service::Service svc(ClassMap::poultry_default(),
                       std::make_shared<infer::ReplayDetector>(
                           infer::ReplayStore::load(root / "replay.jsonl"), "replay-fixture"),
                       o);
  service::HttpServer server(svc);
  const int port = server.bind_any_port("127.0.0.1");
  if (port <= 0) return {false, "cannot bind"};
  std::thread serving([&] { server.listen_after_bind(); });
  for (int i = 0; i < 400 && !server.running(); ++i)
    std::this_thread::sleep_for(std::chrono::milliseconds(5));

  const std::string png = t::read_file(root / "images" / "r_000.png");
  std::vector<std::string> failures;
  int validated = 0;
  httplib::Client client("127.0.0.1", port);
  auto check = [&](const std::string& what, const httplib::Result& res, int status,
                   const std::string& schema) {
    if (!res) {
      failures.push_back(what + ": no response");
      return;
    }
    if (res->status != status)
      failures.push_back(what + ": status " + std::to_string(res->status));
    const auto doc = json::parse(res->body, nullptr, false);
    if (doc.is_discarded()) {
      failures.push_back(what + ": body is not JSON");
      return;
    }
    if (auto v = t::schema_violation(t::load_schema(schema), doc))
      failures.push_back(what + ": " + *v);
    else
      ++validated;
  };
  auto post = [&](const std::string& path, const std::string& id, const std::string& body,
                  const std::string& type) {
    httplib::Headers h;
    if (!id.empty()) h.emplace("X-Image-Id", id);
    return client.Post(path, h, body, type);
  };

  check("predict", post("/v1/predict", "r_000", png, "image/png"), 200, "prediction.schema.json");
  for (int i = 0; i < 3; ++i)
    check("frame", post("/v1/streams/barn-1/frames", "r_000", png, "image/png"), 200,
          "frame.schema.json");
  check("alerts", client.Get("/v1/alerts"), 200, "alerts.schema.json");
  check("alerts filtered", client.Get("/v1/alerts?stream=barn-1&since=2000-01-01T00:00:00Z"),
        200, "alerts.schema.json");
  check("healthz", client.Get("/v1/healthz"), 200, "health.schema.json");
  check("bad since", client.Get("/v1/alerts?since=tomorrow"), 400, "error.schema.json");
  check("unknown image", post("/v1/predict", "missing", png, "image/png"), 400,
        "error.schema.json");
  check("bad bytes", post("/v1/predict", "r_000", "garbage", "image/jpeg"), 400,
        "error.schema.json");
  check("bad content type", post("/v1/predict", "r_000", png, "text/plain"), 400,
        "error.schema.json");
  check("unknown route", client.Get("/v1/nothing"), 404, "error.schema.json");

  // Concurrent predicts.
  std::vector<std::uint64_t> seqs(kConcurrentPredicts, 0);
  std::atomic<int> errors{0};
  std::mutex failures_mu;
  std::vector<std::thread> threads;
  for (int i = 0; i < kConcurrentPredicts; ++i) {
    threads.emplace_back([&, i] {
      httplib::Client c("127.0.0.1", port);
      httplib::Headers h{{"X-Image-Id", "r_" + std::string(i < 10 ? "00" : "0") +
                                            std::to_string(i)}};
      const auto res = c.Post("/v1/predict", h, png, "image/png");
      if (!res || res->status != 200) {
        std::lock_guard lock(failures_mu);
        failures.push_back("concurrent predict " + std::to_string(i) + ": " +
                           (res ? "status " + std::to_string(res->status) + " " + res->body
                                : httplib::to_string(res.error())));
        ++errors;
        return;
      }
      const auto doc = json::parse(res->body);
      if (t::schema_violation(t::load_schema("prediction.schema.json"), doc)) ++errors;
      seqs[i] = doc["seq"].get<std::uint64_t>();
    });
  }
  for (auto& th : threads) th.join();
  server.stop();
  serving.join();

  std::sort(seqs.begin(), seqs.end());
  bool gap_free = errors == 0;
  for (std::size_t i = 1; i < seqs.size(); ++i) gap_free = gap_free && seqs[i] == seqs[i - 1] + 1;
  service::JsonlLog log(o.log_dir / "detections.jsonl");
  const auto records = log.read_all();
  for (std::size_t i = 0; i < records.size(); ++i)
    gap_free = gap_free && records[i]["seq"].get<std::uint64_t>() == i + 1;

  std::string detail = std::to_string(validated) + " endpoint responses schema-valid; " +
                       std::to_string(kConcurrentPredicts) + " concurrent predicts got seq " +
                       std::to_string(seqs.front()) + ".." + std::to_string(seqs.back()) +
                       (gap_free ? " gap-free" : " WITH GAPS") + ", log holds " +
                       std::to_string(records.size()) + " records";
  for (const auto& f : failures) detail += "; " + f;
  return {failures.empty() && gap_free, detail};
}

// --- 8 ---------------------------------------------------------------------

Result non_reproducibility_statement() {
  std::printf(
      "     The reported per-class metrics, the precision of 1.00 at confidence 0.946 and\n"
      "     the mAP@0.5 of 0.912 come from a private dataset and trained detector weights\n"
      "     that were not released. They are not reproducible here. Criteria 2-7 replace\n"
      "     them with property and fixture checks. Criterion 1 checks only the internal\n"
      "     arithmetic of the reported tables, and the table fixture shows the pipeline\n"
      "     can emit those numbers.\n");
  return {true, "statement printed; no absolute model metric is claimed"};
}

}  // namespace

int main() {
  std::printf("coop acceptance (kernels: %s)\n",
              coop::kernels::isa_name(coop::kernels::active_isa()));
  report("1 ", "macro-average reproduction", macro_average_reproduction);
  report("1b", "table fixture through eval run", table_fixture_via_cli);
  report("2 ", "AP oracle equivalence", ap_oracle_equivalence);
  report("3 ", "NMS equivalence", nms_equivalence);
  report("4 ", "matching monotonicity and confusion column sums", matching_properties);
  report("5 ", "end-to-end replay fixture", end_to_end_fixture);
  report("6 ", "alert-window property", alert_window_property);
  report("7 ", "service contract", service_contract);
  report("8 ", "non-reproducibility statement", non_reproducibility_statement);
  std::printf("%s: %d criterion line(s) failed\n", g_failures ? "FAILED" : "ALL PASSED",
              g_failures);
  return g_failures ? 1 : 0;
}
