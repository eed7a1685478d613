// Copyright 2026 The dishlog Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dishlog/dataset.hpp"
#include "dishlog/metrics.hpp"

namespace dishlog {

/// Model output for one image.
struct DetectionSet {
  std::string image_id;
  std::vector<PredictedBox> predictions;
  std::string source;

  bool operator==(const DetectionSet&) const = default;
};

/// Parses `class_id confidence cx cy w h` lines, with the same line-numbered
/// error discipline as YOLO label parsing.
DetectionSet parse_detection_file(std::string image_id, std::string_view text,
                                  const ClassRegistry& registry, std::string source = {});

std::string serialize_detection_file(const DetectionSet& set);

/// Noise model of the ground-truth replaying detector.
///
/// Each ground-truth box is dropped with probability `drop_rate`; otherwise
/// its class is replaced by a uniformly chosen other class with probability
/// `class_flip_rate`, and center and size are each shifted by a uniform
/// offset in [-jitter, jitter] (then clamped to a valid box). Confidence is
/// 1 - u * min(1, jitter + class_flip_rate) with u uniform in [0, 1), so the
/// all-zero configuration replays the ground truth at confidence 1.
struct DetectorConfig {
  double drop_rate = 0.0;
  double jitter = 0.0;
  double class_flip_rate = 0.0;
  std::uint64_t seed = 0;
};

/// Deterministic per (seed, image_id), independent of call order.
DetectionSet stub_detect(const ImageRecord& record, const DetectorConfig& config,
                         std::size_t num_classes);

std::map<ClassId, std::size_t> detections_to_counts(const DetectionSet& set,
                                                    double confidence_threshold);

/// Loads every `*.txt` in `dir` keyed by file stem.
std::map<std::string, DetectionSet> load_detections(const std::filesystem::path& dir,
                                                    const ClassRegistry& registry);

void write_detections(std::span<const DetectionSet> sets, const std::filesystem::path& dir);

/// Pairs every image with its detections (empty when no file exists).
/// Detection files without a matching image are rejected.
std::vector<EvalImage> pair_with_detections(const Dataset& dataset,
                                            const std::map<std::string, DetectionSet>& detections);

}  // namespace dishlog
