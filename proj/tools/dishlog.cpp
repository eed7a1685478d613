// Copyright 2026 The dishlog Authors
// SPDX-License-Identifier: Apache-2.0
//
// dishlog: dataset QA, statistics, splitting, stub detection, evaluation and
// the diet service, as one command-line tool.

#include <CLI11.hpp>
#include <signal.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "dishlog/dataset.hpp"
#include "dishlog/detect_io.hpp"
#include "dishlog/error.hpp"
#include "dishlog/metrics.hpp"
#include "dishlog/nutrition.hpp"
#include "dishlog/report.hpp"
#include "dishlog/service/diet_service.hpp"
#include "dishlog/service/http_api.hpp"

namespace fs = std::filesystem;
using namespace dishlog;

namespace {

struct Options {
  std::string classes;
  std::string labels;
  std::string detections;
  std::string counts;
  std::string probs;
  std::string out;
  double iou = kDefaultIouThreshold;
  double conf = kDefaultConfidenceThreshold;
  double fraction = 0.9;
  std::uint64_t seed = 0;
  double drop = 0.0;
  double jitter = 0.0;
  double flip = 0.0;
  std::string listen = "127.0.0.1:8080";
  std::string data_dir = "dishlog-data";
  std::string calorie_table;
  std::size_t snapshot_every = 1000;
};

// Writes to --out when given, stdout otherwise.
void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(o.out, text);
  }
}

std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

struct Evaluation {
  Dataset dataset;
  std::vector<EvalImage> images;
};

Evaluation load_evaluation(const Options& o) {
  auto dataset = load_dataset(o.classes, o.labels);
  auto images = pair_with_detections(dataset, load_detections(o.detections, dataset.registry()));
  return {std::move(dataset), std::move(images)};
}

int cmd_validate(const Options& o) {
  const auto dataset = load_dataset(o.classes, o.labels);
  std::size_t boxes = 0;
  for (const auto& im : dataset.images()) boxes += im.boxes.size();
  std::cout << "labels ok: " << dataset.images().size() << " images, " << boxes << " boxes, "
            << dataset.num_classes() << " classes\n";
  if (!o.detections.empty()) {
    const auto detections = load_detections(o.detections, dataset.registry());
    pair_with_detections(dataset, detections);
    std::size_t predictions = 0;
    for (const auto& [id, set] : detections) predictions += set.predictions.size();
    std::cout << "detections ok: " << detections.size() << " files, " << predictions << " predictions\n";
  }
  return 0;
}

int cmd_stats(const Options& o) {
  std::ostringstream out;
  if (!o.counts.empty()) {
    const auto table = [&] {
      try {
        return parse_class_count_table(read_text_file(o.counts));
      } catch (const Error& e) {
        throw Error(e.code(), o.counts + ": " + e.message(), e.line());
      }
    }();
    write_stats_table(out, table.registry,
                      summarize_class_counts(table.image_counts, table.annotation_counts));
  } else {
    const auto dataset = load_dataset(o.classes, o.labels);
    write_stats_table(out, dataset.registry(), compute_stats(dataset));
  }
  emit(o, out.str());
  return 0;
}

int cmd_split(const Options& o) {
  const auto dataset = load_dataset(o.classes, o.labels);
  const auto [train, test] = split_dataset(dataset, o.fraction, o.seed);
  const auto list = [](const Dataset& d) {
    std::string text;
    for (const auto& im : d.images()) text += im.image_id + "\n";
    return text;
  };
  const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  fs::create_directories(dir);
  write_text_file(dir / "train.txt", list(train));
  write_text_file(dir / "test.txt", list(test));
  std::cout << "train " << train.images().size() << ", test " << test.images().size() << "\n";
  return 0;
}

int cmd_stub_detect(const Options& o) {
  const auto dataset = load_dataset(o.classes, o.labels);
  const DetectorConfig config{o.drop, o.jitter, o.flip, o.seed};
  std::vector<DetectionSet> sets;
  sets.reserve(dataset.images().size());
  for (const auto& im : dataset.images()) sets.push_back(stub_detect(im, config, dataset.num_classes()));
  write_detections(sets, o.out);
  std::cout << "wrote " << sets.size() << " detection files to " << o.out << "\n";
  return 0;
}

int cmd_eval_det(const Options& o) {
  const auto [dataset, images] = load_evaluation(o);
  const auto report = evaluate_detections(images, dataset.num_classes(), o.iou, o.conf);
  std::ostringstream out;
  write_metrics_table(out, dataset.registry(), report);
  emit(o, out.str());
  return 0;
}

// CSV rows `image_id,p_0,...,p_{N-1}`; a first row starting with `image_id` is a header.
std::map<std::string, std::vector<double>> load_probabilities(const std::string& path,
                                                              std::size_t num_classes) {
  std::map<std::string, std::vector<double>> rows;
  std::istringstream in(read_text_file(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (line_no == 1 && line.starts_with("image_id")) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    for (std::string f; std::getline(ls, f, ',');) fields.push_back(f);
    if (fields.size() != num_classes + 1) {
      throw Error(ErrorCode::kFormat,
                  path + ": expected image id and " + std::to_string(num_classes) + " probabilities",
                  line_no);
    }
    std::vector<double> p;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      char* end = nullptr;
      const double v = std::strtod(fields[i].c_str(), &end);
      if (fields[i].empty() || *end != '\0' || !(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorCode::kFormat, path + ": probability must be a number in [0, 1]", line_no);
      }
      p.push_back(v);
    }
    if (!rows.emplace(fields[0], std::move(p)).second) {
      throw Error(ErrorCode::kFormat, path + ": duplicate image id \"" + fields[0] + "\"", line_no);
    }
  }
  return rows;
}

int cmd_eval_cls(const Options& o) {
  const auto dataset = load_dataset(o.classes, o.labels);
  auto probs = load_probabilities(o.probs, dataset.num_classes());
  std::vector<LabelProbabilities> samples;
  for (const auto& im : dataset.images()) {
    const auto it = probs.find(im.image_id);
    if (it == probs.end()) {
      throw Error(ErrorCode::kLengthMismatch, o.probs + ": no probabilities for image \"" + im.image_id + "\"");
    }
    LabelProbabilities s{std::move(it->second), {}};
    for (const auto& b : im.boxes) s.truth.push_back(b.class_id);
    samples.push_back(std::move(s));
    probs.erase(it);
  }
  if (!probs.empty()) {
    throw Error(ErrorCode::kLengthMismatch,
                o.probs + ": probabilities for unknown image \"" + probs.begin()->first + "\"");
  }
  const auto report = classification_metrics(samples, dataset.num_classes(), o.conf);
  std::ostringstream out;
  write_metrics_table(out, dataset.registry(), report);
  emit(o, out.str());
  return 0;
}

int cmd_curves(const Options& o) {
  const auto [dataset, images] = load_evaluation(o);
  const auto sweep = confidence_sweep(images, dataset.num_classes(), o.iou);
  const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  fs::create_directories(dir);
  for (const std::string metric : {"precision", "recall", "f1"}) {
    std::ostringstream out;
    write_confidence_curve(out, dataset.registry(), sweep, metric);
    write_text_file(dir / (metric + ".csv"), out.str());
  }
  std::ostringstream pr;
  write_pr_curve(pr, dataset.registry(), sweep);
  write_text_file(dir / "pr.csv", pr.str());
  std::cout << "best mean F1 " << fixed(sweep.best_f1, 4) << " at confidence "
            << fixed(sweep.best_f1_confidence, 4) << "\n";
  return 0;
}

int cmd_confusion(const Options& o) {
  const auto [dataset, images] = load_evaluation(o);
  const auto matrix = confusion_matrix(images, dataset.num_classes(), o.iou, o.conf);
  std::ostringstream out;
  write_confusion_matrix(out, dataset.registry(), matrix);
  emit(o, out.str());
  return 0;
}

std::pair<std::string, int> split_listen(const std::string& listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "--listen must be host:port");
  const std::string port_text = listen.substr(colon + 1);
  char* end = nullptr;
  const long port = std::strtol(port_text.c_str(), &end, 10);
  if (port_text.empty() || *end != '\0' || port < 0 || port > 65535) {
    throw Error(ErrorCode::kInvalidArgument, "bad port in --listen \"" + listen + "\"");
  }
  return {listen.substr(0, colon), static_cast<int>(port)};
}

int cmd_serve(const Options& o) {
  if (o.calorie_table.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--calorie-table (or DISHLOG_CALORIE_TABLE) is required");
  }
  service::ServiceConfig config;
  config.data_dir = o.data_dir;
  try {
    config.calorie_table = parse_calorie_table(read_text_file(o.calorie_table));
  } catch (const Error& e) {
    throw Error(e.code(), o.calorie_table + ": " + e.message(), e.line());
  }
  config.confidence_threshold = o.conf;
  config.snapshot_every = o.snapshot_every;
  const auto [host, port] = split_listen(o.listen);

  // Signals are handled by a dedicated thread; block them before the server spawns workers.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  service::DietService svc(std::move(config));
  service::HttpApi api(svc);
  const int bound = api.bind(host, port);
  if (bound < 0) throw Error(ErrorCode::kIo, "cannot listen on " + o.listen);
  std::cout << "listening on " << host << ":" << bound << std::endl;

  std::thread waiter([&api, signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    api.stop();
  });
  api.listen_after_bind();
  if (waiter.joinable()) {
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dishlog: food-detection dataset tooling, evaluation and diet tracking"};
  app.require_subcommand(1);
  Options o;

  const auto classes = [&](CLI::App* c) {
    c->add_option("--classes", o.classes, "class list, one name per line")->required()->check(CLI::ExistingFile);
  };
  const auto labels = [&](CLI::App* c) {
    c->add_option("--labels", o.labels, "directory of YOLO label files")->required()->check(CLI::ExistingDirectory);
  };
  const auto detections = [&](CLI::App* c, bool required) {
    auto* opt = c->add_option("--detections", o.detections, "directory of detection files")
                    ->check(CLI::ExistingDirectory);
    if (required) opt->required();
  };
  const auto iou = [&](CLI::App* c) {
    c->add_option("--iou", o.iou, "IoU threshold")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  };
  const auto conf = [&](CLI::App* c, const std::string& help) {
    c->add_option("--conf", o.conf, help)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  };
  const auto out = [&](CLI::App* c, const std::string& help) { c->add_option("--out", o.out, help); };

  auto* validate = app.add_subcommand("validate", "check labels (and detections) for format errors");
  classes(validate);
  labels(validate);
  detections(validate, false);

  auto* stats = app.add_subcommand("stats", "per-class image and annotation counts");
  stats->add_option("--classes", o.classes, "class list")->check(CLI::ExistingFile);
  stats->add_option("--labels", o.labels, "directory of YOLO label files")->check(CLI::ExistingDirectory);
  stats->add_option("--counts", o.counts, "precomputed count table instead of labels")->check(CLI::ExistingFile);
  out(stats, "output file");

  auto* split = app.add_subcommand("split", "seeded train/test split; writes train.txt and test.txt");
  classes(split);
  labels(split);
  split->add_option("--fraction", o.fraction, "training fraction")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  split->add_option("--seed", o.seed, "random seed")->capture_default_str();
  out(split, "output directory");

  auto* stub = app.add_subcommand("stub-detect", "synthesize detections from ground truth");
  classes(stub);
  labels(stub);
  stub->add_option("--drop", o.drop, "probability of dropping a box")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  stub->add_option("--jitter", o.jitter, "box jitter as a fraction of size")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  stub->add_option("--flip", o.flip, "probability of a wrong class")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  stub->add_option("--seed", o.seed, "random seed")->capture_default_str();
  stub->add_option("--out", o.out, "output directory")->required();

  auto* eval_det = app.add_subcommand("eval-det", "per-class P, R, F1, AP and mAP for detections");
  classes(eval_det);
  labels(eval_det);
  detections(eval_det, true);
  iou(eval_det);
  conf(eval_det, "confidence threshold");
  out(eval_det, "output file");

  auto* eval_cls = app.add_subcommand("eval-cls", "multi-label classification metrics");
  classes(eval_cls);
  labels(eval_cls);
  eval_cls->add_option("--probs", o.probs, "CSV of image_id and one probability per class")
      ->required()->check(CLI::ExistingFile);
  conf(eval_cls, "probability threshold");
  out(eval_cls, "output file");

  auto* curves = app.add_subcommand("curves", "confidence sweep curves and the PR curve as CSV");
  classes(curves);
  labels(curves);
  detections(curves, true);
  iou(curves);
  out(curves, "output directory");

  auto* confusion = app.add_subcommand("confusion", "confusion matrix with a background class");
  classes(confusion);
  labels(confusion);
  detections(confusion, true);
  iou(confusion);
  conf(confusion, "confidence threshold");
  out(confusion, "output file");

  auto* serve = app.add_subcommand("serve", "run the diet tracking HTTP service");
  serve->add_option("--listen", o.listen, "host:port")->envname("DISHLOG_LISTEN")->capture_default_str();
  serve->add_option("--data-dir", o.data_dir, "event log directory")->envname("DISHLOG_DATA_DIR")->capture_default_str();
  serve->add_option("--calorie-table", o.calorie_table, "class_id,name,kcal table")
      ->envname("DISHLOG_CALORIE_TABLE")->check(CLI::ExistingFile);
  serve->add_option("--conf", o.conf, "detection confidence threshold for uploads")
      ->envname("DISHLOG_CONF")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  serve->add_option("--snapshot-every", o.snapshot_every, "events between snapshots, 0 disables")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return cmd_validate(o);
    if (*stats) {
      if (o.counts.empty() && (o.classes.empty() || o.labels.empty())) {
        throw Error(ErrorCode::kInvalidArgument, "stats needs --counts or both --classes and --labels");
      }
      return cmd_stats(o);
    }
    if (*split) return cmd_split(o);
    if (*stub) return cmd_stub_detect(o);
    if (*eval_det) return cmd_eval_det(o);
    if (*eval_cls) return cmd_eval_cls(o);
    if (*curves) return cmd_curves(o);
    if (*confusion) return cmd_confusion(o);
    if (*serve) return cmd_serve(o);
  } catch (const std::exception& e) {
    std::cerr << "dishlog: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
