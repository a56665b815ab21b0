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

#include "coop/cli.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "coop/augment.hpp"
#include "coop/dataset.hpp"
#include "coop/evaluation.hpp"
#include "coop/http.hpp"
#include "coop/image.hpp"
#include "coop/inference.hpp"
#include "coop/kernels.hpp"
#include "coop/service.hpp"

namespace fs = std::filesystem;

namespace coop::cli {

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

ClassMap classes_for(const std::string& classes_path, const fs::path& root) {
  if (!classes_path.empty()) return ClassMap::load(classes_path);
  return corpus_classes(root);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::atomic<service::HttpServer*> g_server{nullptr};

extern "C" void on_signal(int) {
  if (auto* s = g_server.load()) s->stop();
}

struct Options {
  // dataset
  std::string root;
  std::string classes;
  bool strict = false;
  std::string ratios = "0.7,0.2,0.1";
  std::uint64_t seed = 0;
  bool stratify = false;
  std::string split_out;
  std::string spec;
  std::string augment_out;
  // eval
  std::string gt;
  std::string dets;
  std::string report_dir = "report";
  double report_conf = 0.25;
  double cm_conf = 0.25;
  double cm_iou = 0.45;
  std::size_t grid_points = 1001;
  // predict
  std::string fixture;
  std::string image_id;
  std::string image;
  infer::PostprocessConfig post;
  // serve
  std::string config;
};

int dataset_validate(const Options& o, std::ostream& out) {
  const auto classes = classes_for(o.classes, o.root);
  const auto report = validate_dataset(o.root, classes, {o.strict});
  out << report.to_text(classes);
  return report.ok ? kOk : kFailed;
}

int dataset_split(const Options& o, std::ostream& out) {
  const auto classes = classes_for(o.classes, o.root);
  const auto corpus = load_corpus(o.root, classes);
  const auto manifest = split_dataset(corpus, SplitRatios::parse(o.ratios), o.seed,
                                      {o.stratify});
  const fs::path dest = o.split_out.empty() ? fs::path(o.root) / "split.json"
                                            : fs::path(o.split_out);
  write_text(dest, manifest.to_json());
  out << "train " << manifest.count(Subset::kTrain) << ", test "
      << manifest.count(Subset::kTest) << ", val " << manifest.count(Subset::kVal)
      << " -> " << dest.string() << "\n";
  return kOk;
}

int dataset_augment(const Options& o, std::ostream& out) {
  const auto classes = classes_for(o.classes, o.root);
  const auto spec = AugmentationSpec::from_json(read_text(o.spec));
  const fs::path dest = o.augment_out.empty() ? fs::path(o.root) / "augmented"
                                              : fs::path(o.augment_out);
  fs::create_directories(dest / "images");
  fs::create_directories(dest / "labels");

  std::map<std::string, fs::path> sources;
  for (const auto& e : fs::directory_iterator(fs::path(o.root) / "images"))
    if (e.is_regular_file()) sources.emplace(e.path().stem().string(), e.path());

  std::size_t n = 0;
  for (const auto& img : load_corpus(o.root, classes)) {
    const auto& src = sources.at(img.image_id);
    const auto result = apply_augmentations(img, read_image(src), spec);
    write_image(dest / "images" / (img.image_id + ".png"), result.pixels);
    write_text(dest / "labels" / (img.image_id + ".txt"),
               serialize_label_file(result.labels.annotations));
    ++n;
  }
  if (fs::exists(fs::path(o.root) / "classes.txt"))
    fs::copy_file(fs::path(o.root) / "classes.txt", dest / "classes.txt",
                  fs::copy_options::overwrite_existing);
  out << "augmented " << n << " images -> " << dest.string() << "\n";
  return kOk;
}

int eval_run(const Options& o, std::ostream& out, std::ostream& err) {
  if (!fs::exists(o.dets)) {
    err << "error: detections file not found: " << o.dets << "\n";
    return kFailed;
  }
  if (!fs::is_directory(o.gt)) {
    err << "error: ground-truth root not found: " << o.gt << "\n";
    return kFailed;
  }
  const auto classes = classes_for(o.classes, o.gt);
  const auto corpus = load_corpus(o.gt, classes);
  const auto gts = eval::ground_truth_from_corpus(corpus);
  const auto dets = eval::load_detections(o.dets);

  eval::EvalConfig cfg;
  cfg.report_confidence = o.report_conf;
  cfg.cm_confidence = o.cm_conf;
  cfg.cm_iou = o.cm_iou;
  cfg.confidence_grid = eval::confidence_grid(o.grid_points);
  const auto result = eval::evaluate(dets, gts, classes, cfg);
  eval::write_report(o.report_dir, result, classes);

  char best[96];
  std::snprintf(best, sizeof best, "best F1 %.3f at confidence %.3f\n",
                result.sweep.best.f1, result.sweep.best.confidence);
  out << eval::render_class_table(result.per_class, classes) << "\n"
      << eval::render_overall_table(result.overall) << "\n"
      << best << "report written to " << o.report_dir << "\n";
  return kOk;
}

int predict(const Options& o, std::ostream& out) {
  o.post.validate();
  const auto classes = o.classes.empty() ? ClassMap::poultry_default()
                                         : ClassMap::load(o.classes);
  const infer::ReplayDetector backend(infer::ReplayStore::load(o.fixture));
  std::vector<std::uint8_t> bytes;
  if (!o.image.empty()) {
    const auto text = read_text(o.image);
    bytes.assign(text.begin(), text.end());
  }
  infer::FrameRequest req{bytes, std::nullopt};
  if (!o.image_id.empty()) req.image_id = o.image_id;
  const auto raw = backend.infer(req);
  const auto dets = infer::postprocess(raw, o.post);

  auto arr = nlohmann::json::array();
  for (const auto& d : dets) {
    if (!classes.contains(d.class_id))
      throw std::runtime_error("fixture class id out of range: " +
                               std::to_string(d.class_id));
    arr.push_back({{"class_name", classes.name(d.class_id)},
                   {"class_id", d.class_id},
                   {"confidence", d.confidence},
                   {"box", {d.box.x_min, d.box.y_min, d.box.x_max, d.box.y_max}}});
  }
  out << nlohmann::json{{"image_id", raw.image_id},
                        {"model_tag", raw.model_tag},
                        {"detections", arr}}
             .dump(2)
      << "\n";
  return kOk;
}

int serve(const Options& o, std::ostream& out, std::ostream& err) {
  const auto path = service::resolve_config_path(
      o.config.empty() ? std::nullopt : std::optional<fs::path>(o.config));
  if (!path) {
    err << "error: no config given (use --config or COOP_CONFIG)\n";
    return kUsage;
  }
  const auto cfg = service::ServiceConfig::load(*path);
  auto svc = service::Service::from_config(cfg);
  service::HttpServer server(*svc);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  out << "coop serving on " << cfg.host << ":" << cfg.port << " (kernels: "
      << kernels::isa_name(kernels::active_isa()) << ")" << std::endl;
  const bool ok = server.listen(cfg.host, cfg.port);
  g_server = nullptr;
  if (!ok) {
    err << "error: cannot listen on " << cfg.host << ":" << cfg.port << "\n";
    return kFailed;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Poultry disease detection toolkit: dataset preparation, "
               "evaluation, replay inference and the monitoring service.",
               "coop"};
  app.require_subcommand(1);
  Options o;

  auto* dataset = app.add_subcommand("dataset", "YOLO-format corpus tools");
  dataset->require_subcommand(1);

  auto* validate = dataset->add_subcommand("validate", "Check images against labels");
  validate->add_option("root", o.root, "Dataset root")->required();
  validate->add_option("--classes", o.classes, "classes.txt (default: <root>/classes.txt)");
  validate->add_flag("--strict", o.strict, "Treat images without labels as failures");

  auto* split = dataset->add_subcommand("split", "Write a seeded train/test/val split");
  split->add_option("root", o.root, "Dataset root")->required();
  split->add_option("--ratios", o.ratios, "train,test,val")->capture_default_str();
  split->add_option("--seed", o.seed, "Shuffle seed")->capture_default_str();
  split->add_flag("--stratify", o.stratify, "Split per primary class");
  split->add_option("--out", o.split_out, "Output path (default: <root>/split.json)");
  split->add_option("--classes", o.classes, "classes.txt (default: <root>/classes.txt)");

  auto* augment = dataset->add_subcommand("augment", "Apply an augmentation spec");
  augment->add_option("root", o.root, "Dataset root")->required();
  augment->add_option("--spec", o.spec, "Augmentation spec (JSON)")->required();
  augment->add_option("--out", o.augment_out, "Output root (default: <root>/augmented)");
  augment->add_option("--classes", o.classes, "classes.txt (default: <root>/classes.txt)");

  auto* eval = app.add_subcommand("eval", "Detection evaluation");
  eval->require_subcommand(1);
  auto* eval_run_cmd = eval->add_subcommand("run", "Evaluate detections against labels");
  eval_run_cmd->add_option("--gt", o.gt, "Ground-truth dataset root")->required();
  eval_run_cmd->add_option("--dets", o.dets, "Detections (JSON Lines)")->required();
  eval_run_cmd->add_option("--out", o.report_dir, "Report directory")->capture_default_str();
  eval_run_cmd->add_option("--conf", o.report_conf, "Confidence for P/R columns")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));
  eval_run_cmd->add_option("--cm-conf", o.cm_conf, "Confusion matrix confidence")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));
  eval_run_cmd->add_option("--cm-iou", o.cm_iou, "Confusion matrix IoU")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));
  eval_run_cmd->add_option("--grid-points", o.grid_points, "Confidence sweep points")
      ->capture_default_str()->check(CLI::Range(2, 1000001));
  eval_run_cmd->add_option("--classes", o.classes, "classes.txt (default: <gt>/classes.txt)");

  auto* predict_cmd = app.add_subcommand("predict", "Replay one image through post-processing");
  predict_cmd->add_option("--fixture", o.fixture, "Replay fixture (JSON Lines)")->required();
  predict_cmd->add_option("--image-id", o.image_id, "Image id to look up");
  predict_cmd->add_option("--image", o.image, "Image file (id derived from content)");
  predict_cmd->add_option("--conf", o.post.conf_threshold, "Confidence threshold")
      ->capture_default_str();
  predict_cmd->add_option("--nms-iou", o.post.nms_iou_threshold, "NMS IoU threshold")
      ->capture_default_str();
  predict_cmd->add_option("--max-det", o.post.max_detections, "Detection cap")
      ->capture_default_str();
  predict_cmd->add_option("--classes", o.classes, "classes.txt (default: poultry classes)");

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP prediction service");
  serve_cmd->add_option("--config", o.config, "Service config (COOP_CONFIG overrides)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    // Help for the innermost subcommand that was reached.
    const CLI::App* scope = &app;
    while (true) {
      const auto subs = scope->get_subcommands();
      if (subs.empty()) break;
      scope = subs.front();
    }
    err << scope->help();
    return kUsage;
  }

  if (predict_cmd->parsed() && o.image_id.empty() && o.image.empty()) {
    err << "error: predict needs --image-id or --image\n";
    return kUsage;
  }

  try {
    if (validate->parsed()) return dataset_validate(o, out);
    if (split->parsed()) return dataset_split(o, out);
    if (augment->parsed()) return dataset_augment(o, out);
    if (eval_run_cmd->parsed()) return eval_run(o, out, err);
    if (predict_cmd->parsed()) return predict(o, out);
    if (serve_cmd->parsed()) return serve(o, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}

}  // namespace coop::cli
