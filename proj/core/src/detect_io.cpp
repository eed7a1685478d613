// Copyright 2026 The dishlog Authors
// SPDX-License-Identifier: Apache-2.0

#include "dishlog/detect_io.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dishlog/error.hpp"
#include "random_util.hpp"
#include "text_util.hpp"

namespace dishlog {

namespace fs = std::filesystem;

DetectionSet parse_detection_file(std::string image_id, std::string_view text,
                                  const ClassRegistry& registry, std::string source) {
  if (image_id.empty()) throw Error(ErrorCode::kInvalidArgument, "detection set needs an image id");
  DetectionSet set{std::move(image_id), {}, std::move(source)};
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto fields = detail::split_whitespace(lines[i]);
    if (fields.empty()) continue;
    if (fields.size() != 6) {
      throw Error(ErrorCode::kFormat,
                  "expected 6 fields `class_id confidence cx cy w h`, got " +
                      std::to_string(fields.size()),
                  line_no);
    }
    const auto id = detail::parse_uint(fields[0]);
    if (!id) throw Error(ErrorCode::kFormat, "class id is not a non-negative integer", line_no);
    if (*id >= registry.size()) {
      throw Error(ErrorCode::kClassOutOfRange,
                  "class id " + std::to_string(*id) + " >= " + std::to_string(registry.size()),
                  line_no);
    }
    const auto confidence = detail::parse_double(fields[1]);
    if (!confidence) throw Error(ErrorCode::kFormat, "confidence is not a finite decimal", line_no);
    if (*confidence < 0.0 || *confidence > 1.0) {
      throw Error(ErrorCode::kConfidenceOutOfRange, "confidence outside [0, 1]", line_no);
    }
    double v[4];
    for (int k = 0; k < 4; ++k) {
      const auto d = detail::parse_double(fields[k + 2]);
      if (!d) throw Error(ErrorCode::kFormat, "coordinate is not a finite decimal", line_no);
      v[k] = *d;
    }
    const BoundingBox box{v[0], v[1], v[2], v[3]};
    if (!box.valid()) throw Error(ErrorCode::kBoxOutOfRange, "box outside the unit square", line_no);
    set.predictions.push_back({static_cast<ClassId>(*id), *confidence, box});
  }
  return set;
}

std::string serialize_detection_file(const DetectionSet& set) {
  std::string out;
  for (const auto& p : set.predictions) {
    out += std::to_string(p.class_id);
    for (const double v : {p.confidence, p.box.cx, p.box.cy, p.box.w, p.box.h}) {
      out += ' ';
      detail::append_double(out, v);
    }
    out += '\n';
  }
  return out;
}

namespace {

constexpr double kMinSize = 1e-6;

double in_range(double rate, const char* name) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, std::string(name) + " must lie in [0, 1]");
  }
  return rate;
}

}  // namespace

DetectionSet stub_detect(const ImageRecord& record, const DetectorConfig& config,
                         std::size_t num_classes) {
  in_range(config.drop_rate, "drop_rate");
  in_range(config.class_flip_rate, "class_flip_rate");
  if (!(config.jitter >= 0.0) || !std::isfinite(config.jitter)) {
    throw Error(ErrorCode::kInvalidArgument, "jitter must be >= 0");
  }
  const double noise = std::min(1.0, config.jitter + config.class_flip_rate);

  std::mt19937_64 rng(detail::mix_seed(config.seed, record.image_id));
  DetectionSet set{record.image_id, {}, "stub"};
  for (const auto& gt : record.boxes) {
    // Fixed number of draws per box keeps later boxes independent of earlier outcomes.
    const double u_drop = detail::unit_double(rng);
    const double u_flip = detail::unit_double(rng);
    const std::uint64_t flip_pick = rng();
    double u_jitter[4];
    for (auto& u : u_jitter) u = detail::unit_double(rng);
    const double u_conf = detail::unit_double(rng);

    if (u_drop < config.drop_rate) continue;

    PredictedBox pred{gt.class_id, 1.0 - u_conf * noise, gt.box};
    if (num_classes > 1 && u_flip < config.class_flip_rate) {
      const auto other = static_cast<ClassId>(flip_pick % (num_classes - 1));
      pred.class_id = other >= gt.class_id ? other + 1 : other;
    }
    if (config.jitter > 0.0) {
      auto shift = [&](double u) { return config.jitter * (2.0 * u - 1.0); };
      pred.box.cx = std::clamp(gt.box.cx + shift(u_jitter[0]), 0.0, 1.0);
      pred.box.cy = std::clamp(gt.box.cy + shift(u_jitter[1]), 0.0, 1.0);
      pred.box.w = std::clamp(gt.box.w + shift(u_jitter[2]), kMinSize, 1.0);
      pred.box.h = std::clamp(gt.box.h + shift(u_jitter[3]), kMinSize, 1.0);
    }
    set.predictions.push_back(pred);
  }
  return set;
}

std::map<ClassId, std::size_t> detections_to_counts(const DetectionSet& set,
                                                    double confidence_threshold) {
  if (!(confidence_threshold >= 0.0 && confidence_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "confidence threshold must lie in [0, 1]");
  }
  std::map<ClassId, std::size_t> counts;
  for (const auto& p : set.predictions) {
    if (p.confidence >= confidence_threshold) ++counts[p.class_id];
  }
  return counts;
}

std::map<std::string, DetectionSet> load_detections(const fs::path& dir,
                                                    const ClassRegistry& registry) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kIo, dir.string() + " is not a directory");
  std::map<std::string, DetectionSet> sets;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    const auto& file = entry.path();
    try {
      auto set = parse_detection_file(file.stem().string(), read_text_file(file), registry,
                                      file.filename().string());
      sets.emplace(set.image_id, std::move(set));
    } catch (const Error& e) {
      throw Error(e.code(), file.string() + ": " + e.message(), e.line());
    }
  }
  return sets;
}

void write_detections(std::span<const DetectionSet> sets, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& set : sets) {
    write_text_file(dir / (set.image_id + ".txt"), serialize_detection_file(set));
  }
}

std::vector<EvalImage> pair_with_detections(const Dataset& dataset,
                                            const std::map<std::string, DetectionSet>& detections) {
  std::vector<EvalImage> images;
  images.reserve(dataset.images().size());
  std::size_t used = 0;
  for (const auto& record : dataset.images()) {
    EvalImage image{record.boxes, {}};
    if (const auto it = detections.find(record.image_id); it != detections.end()) {
      image.predictions = it->second.predictions;
      ++used;
    }
    images.push_back(std::move(image));
  }
  if (used != detections.size()) {
    for (const auto& [id, set] : detections) {
      const bool known = std::any_of(dataset.images().begin(), dataset.images().end(),
                                     [&](const ImageRecord& r) { return r.image_id == id; });
      if (!known) throw Error(ErrorCode::kInvalidArgument, "detections for unknown image \"" + id + "\"");
    }
  }
  return images;
}

}  // namespace dishlog
