// Copyright 2026 The dishlog Authors
// SPDX-License-Identifier: Apache-2.0
//
// Detection and multi-label classification metrics: IoU matching, precision,
// recall, F1, all-points average precision, confidence sweeps and confusion
// matrices.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dishlog/dataset.hpp"

namespace dishlog {

inline constexpr double kDefaultIouThreshold = 0.5;
inline constexpr double kDefaultConfidenceThreshold = 0.5;

struct PredictedBox {
  ClassId class_id = 0;
  double confidence = 1.0;
  BoundingBox box;

  bool operator==(const PredictedBox&) const = default;
};

/// Ground truth and predictions of one image.
struct EvalImage {
  std::vector<GroundTruthBox> ground_truth;
  std::vector<PredictedBox> predictions;
};

/// Intersection over union of the clamped corner boxes; 0 for a zero-area union.
double iou(const BoundingBox& a, const BoundingBox& b);

struct ClassCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  bool operator==(const ClassCounts&) const = default;
};

struct MatchedPair {
  std::size_t image = 0;
  std::size_t prediction = 0;    // index into that image's predictions
  std::size_t ground_truth = 0;  // index into that image's ground truth
  double iou = 0.0;
};

struct MatchOutcome {
  std::vector<ClassCounts> per_class;
  std::vector<MatchedPair> pairs;

  ClassCounts total() const;
};

/// Greedy per-class matching. Predictions below `confidence_threshold` are
/// dropped; the rest are visited by descending confidence (input order on
/// ties) and each takes the unmatched same-class ground truth with the
/// highest IoU >= `iou_threshold` (lowest index on ties), else counts as FP.
/// Unmatched ground truths are FN.
MatchOutcome match_detections(std::span<const GroundTruthBox> ground_truth,
                              std::span<const PredictedBox> predictions, std::size_t num_classes,
                              double iou_threshold, double confidence_threshold);

/// Same, per image, summed over images.
MatchOutcome match_detections(std::span<const EvalImage> images, std::size_t num_classes,
                              double iou_threshold, double confidence_threshold);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// P = TP/(TP+FP), R = TP/(TP+FN), F1 = 2PR/(P+R), each 0 when its
/// denominator is 0.
Prf prf_from_counts(const ClassCounts& counts);

struct PrfSummary {
  std::vector<Prf> per_class;
  /// Classes with any TP, FP or FN; only these enter the macro mean.
  std::vector<bool> active;
  Prf macro;
};

PrfSummary precision_recall_f1(const MatchOutcome& outcome);

/// One ranked decision: a score and whether it was a true positive.
struct RankedHit {
  double score = 0.0;
  bool true_positive = false;
};

/// Area under the non-increasing precision envelope over recall, with the
/// precision/recall points taken at every distinct score (equal scores enter
/// together). `num_positives` must be > 0.
double average_precision_ranked(std::vector<RankedHit> hits, std::size_t num_positives);

/// AP of one class with all images pooled. nullopt when the class has no
/// ground truth.
std::optional<double> average_precision(std::span<const EvalImage> images, std::size_t num_classes,
                                        ClassId class_id, double iou_threshold);

std::vector<std::optional<double>> per_class_average_precision(std::span<const EvalImage> images,
                                                               std::size_t num_classes,
                                                               double iou_threshold);

/// Mean over the defined entries. Throws kNoEvaluableClasses if there are none.
double mean_average_precision(std::span<const std::optional<double>> per_class_ap);

struct ConfidenceSweep {
  /// Strictly ascending: 0, every distinct prediction confidence, 1.
  std::vector<double> thresholds;
  /// [class][threshold], predictions with confidence >= threshold retained.
  std::vector<std::vector<double>> precision;
  std::vector<std::vector<double>> recall;
  std::vector<std::vector<double>> f1;
  /// Classes with ground truth or predictions; the mean curves average these.
  std::vector<bool> active;
  std::vector<double> mean_precision;
  std::vector<double> mean_recall;
  std::vector<double> mean_f1;

  /// 101-point recall grid 0, 0.01, ..., 1 and the interpolated precision
  /// envelope on it. The mean PR curve averages classes with ground truth.
  std::vector<double> recall_grid;
  std::vector<std::vector<double>> pr_precision;
  std::vector<double> mean_pr_precision;

  /// Threshold maximizing mean F1 (lowest such threshold).
  double best_f1_confidence = 0.0;
  double best_f1 = 0.0;
};

ConfidenceSweep confidence_sweep(std::span<const EvalImage> images, std::size_t num_classes,
                                 double iou_threshold);

/// Counts indexed [true][predicted]; index num_classes() is background.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t num_classes);

  std::size_t num_classes() const noexcept { return num_classes_; }
  std::size_t background() const noexcept { return num_classes_; }
  std::size_t at(std::size_t truth, std::size_t predicted) const;
  void increment(std::size_t truth, std::size_t predicted);
  std::size_t total() const;
  std::size_t row_sum(std::size_t truth) const;
  std::size_t column_sum(std::size_t predicted) const;

 private:
  std::size_t num_classes_;
  std::vector<std::size_t> cells_;
};

/// Class-agnostic greedy matching: within each image, candidate pairs with
/// IoU >= threshold are taken by descending IoU (then prediction, then
/// ground-truth index); each box is used once.
ConfusionMatrix confusion_matrix(std::span<const EvalImage> images, std::size_t num_classes,
                                 double iou_threshold, double confidence_threshold);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> ap;  // nullopt: no ground truth, excluded from mAP
  std::size_t ground_truth = 0;
  std::size_t predictions = 0;  // retained at the confidence threshold
};

struct MetricsReport {
  std::string task;  // "detection" or "classification"
  std::vector<ClassMetrics> per_class;
  Prf macro;
  double map = 0.0;
  std::size_t map_classes = 0;
  std::vector<ClassId> excluded_from_map;
  std::optional<double> iou_threshold;
  double confidence_threshold = kDefaultConfidenceThreshold;
  std::string ap_method;
  std::optional<ConfusionMatrix> confusion;
};

inline constexpr const char* kApMethodDetection =
    "all-points precision envelope; detections ranked by confidence, pooled over images";
inline constexpr const char* kApMethodClassification =
    "all-points precision envelope; images ranked by class probability";

MetricsReport evaluate_detections(std::span<const EvalImage> images, std::size_t num_classes,
                                  double iou_threshold = kDefaultIouThreshold,
                                  double confidence_threshold = kDefaultConfidenceThreshold);

struct LabelProbabilities {
  std::vector<double> probabilities;  // one per class
  std::vector<ClassId> truth;         // labels present in the image
};

/// Thresholded per-class P/R/F1 (probability >= threshold is positive) and
/// ranking-based AP per class.
MetricsReport classification_metrics(std::span<const LabelProbabilities> samples,
                                     std::size_t num_classes, double probability_threshold = 0.5);

}  // namespace dishlog
