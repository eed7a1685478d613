// Copyright 2026 The dishlog Authors
// SPDX-License-Identifier: Apache-2.0

#include "dishlog/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "dishlog/error.hpp"

namespace dishlog {

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::max(0.0, std::min(a.x_max(), b.x_max()) - std::max(a.x_min(), b.x_min()));
  const double iy = std::max(0.0, std::min(a.y_max(), b.y_max()) - std::max(a.y_min(), b.y_min()));
  const double inter = ix * iy;
  const double area_a = (a.x_max() - a.x_min()) * (a.y_max() - a.y_min());
  const double area_b = (b.x_max() - b.x_min()) * (b.y_max() - b.y_min());
  const double uni = area_a + area_b - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

ClassCounts MatchOutcome::total() const {
  ClassCounts sum;
  for (const auto& c : per_class) {
    sum.tp += c.tp;
    sum.fp += c.fp;
    sum.fn += c.fn;
  }
  return sum;
}

namespace {

void check_thresholds(double iou_threshold, double confidence_threshold) {
  if (!(iou_threshold >= 0.0 && iou_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "IoU threshold must lie in [0, 1]");
  }
  if (!(confidence_threshold >= 0.0 && confidence_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "confidence threshold must lie in [0, 1]");
  }
}

void check_boxes(std::span<const GroundTruthBox> ground_truth,
                 std::span<const PredictedBox> predictions, std::size_t num_classes) {
  for (const auto& g : ground_truth) {
    if (g.class_id >= num_classes) {
      throw Error(ErrorCode::kClassOutOfRange, "ground-truth class " + std::to_string(g.class_id));
    }
  }
  for (const auto& p : predictions) {
    if (p.class_id >= num_classes) {
      throw Error(ErrorCode::kClassOutOfRange, "predicted class " + std::to_string(p.class_id));
    }
    if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) {
      throw Error(ErrorCode::kConfidenceOutOfRange, "confidence outside [0, 1]");
    }
  }
}

/// Retained prediction indices by descending confidence, input order on ties.
std::vector<std::size_t> confidence_order(std::span<const PredictedBox> predictions,
                                          double confidence_threshold) {
  std::vector<std::size_t> order;
  order.reserve(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i].confidence >= confidence_threshold) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return predictions[a].confidence > predictions[b].confidence;
  });
  return order;
}

constexpr long kFalsePositive = -1;
constexpr long kDropped = -2;

/// Per-prediction result: matched ground-truth index, kFalsePositive or kDropped.
std::vector<long> match_image(std::span<const GroundTruthBox> ground_truth,
                              std::span<const PredictedBox> predictions, double iou_threshold,
                              double confidence_threshold, std::vector<double>* ious = nullptr) {
  std::vector<long> result(predictions.size(), kDropped);
  if (ious) ious->assign(predictions.size(), 0.0);
  std::vector<char> taken(ground_truth.size(), 0);
  for (const std::size_t p : confidence_order(predictions, confidence_threshold)) {
    long best = kFalsePositive;
    double best_iou = 0.0;
    for (std::size_t g = 0; g < ground_truth.size(); ++g) {
      if (taken[g] || ground_truth[g].class_id != predictions[p].class_id) continue;
      const double v = iou(predictions[p].box, ground_truth[g].box);
      if (v >= iou_threshold && (best == kFalsePositive || v > best_iou)) {
        best = static_cast<long>(g);
        best_iou = v;
      }
    }
    result[p] = best;
    if (best != kFalsePositive) {
      taken[static_cast<std::size_t>(best)] = 1;
      if (ious) (*ious)[p] = best_iou;
    }
  }
  return result;
}

void accumulate_image(std::size_t image_index, std::span<const GroundTruthBox> ground_truth,
                      std::span<const PredictedBox> predictions, double iou_threshold,
                      double confidence_threshold, MatchOutcome& outcome) {
  std::vector<double> ious;
  const auto result =
      match_image(ground_truth, predictions, iou_threshold, confidence_threshold, &ious);
  for (const auto& g : ground_truth) ++outcome.per_class[g.class_id].fn;
  for (std::size_t p = 0; p < predictions.size(); ++p) {
    if (result[p] == kDropped) continue;
    auto& counts = outcome.per_class[predictions[p].class_id];
    if (result[p] == kFalsePositive) {
      ++counts.fp;
    } else {
      ++counts.tp;
      --counts.fn;
      outcome.pairs.push_back({image_index, p, static_cast<std::size_t>(result[p]), ious[p]});
    }
  }
}

/// Ranked hits per class over all images (no confidence cut) plus GT counts.
struct ClassRanking {
  std::vector<std::vector<RankedHit>> hits;
  std::vector<std::size_t> positives;
};

ClassRanking rank_detections(std::span<const EvalImage> images, std::size_t num_classes,
                             double iou_threshold) {
  ClassRanking ranking{std::vector<std::vector<RankedHit>>(num_classes),
                       std::vector<std::size_t>(num_classes, 0)};
  for (const auto& image : images) {
    check_boxes(image.ground_truth, image.predictions, num_classes);
    for (const auto& g : image.ground_truth) ++ranking.positives[g.class_id];
    const auto result = match_image(image.ground_truth, image.predictions, iou_threshold, 0.0);
    for (std::size_t p = 0; p < image.predictions.size(); ++p) {
      const auto& pred = image.predictions[p];
      ranking.hits[pred.class_id].push_back({pred.confidence, result[p] >= 0});
    }
  }
  return ranking;
}

struct PrPoint {
  double recall;
  double precision;
};

/// PR points at the end of each equal-score group, in descending score order.
std::vector<PrPoint> pr_points(std::vector<RankedHit>& hits, std::size_t num_positives) {
  std::sort(hits.begin(), hits.end(),
            [](const RankedHit& a, const RankedHit& b) { return a.score > b.score; });
  std::vector<PrPoint> points;
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    (hits[i].true_positive ? tp : fp) += 1;
    if (i + 1 == hits.size() || hits[i + 1].score != hits[i].score) {
      points.push_back({static_cast<double>(tp) / static_cast<double>(num_positives),
                        static_cast<double>(tp) / static_cast<double>(tp + fp)});
    }
  }
  return points;
}

/// Suffix maximum of precision: the non-increasing envelope.
std::vector<double> precision_envelope(const std::vector<PrPoint>& points) {
  std::vector<double> env(points.size());
  double running = 0.0;
  for (std::size_t i = points.size(); i-- > 0;) {
    running = std::max(running, points[i].precision);
    env[i] = running;
  }
  return env;
}

double mean_of(const std::vector<double>& values, const std::vector<bool>& mask) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!mask[i]) continue;
    sum += values[i];
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

}  // namespace

MatchOutcome match_detections(std::span<const GroundTruthBox> ground_truth,
                              std::span<const PredictedBox> predictions, std::size_t num_classes,
                              double iou_threshold, double confidence_threshold) {
  check_thresholds(iou_threshold, confidence_threshold);
  check_boxes(ground_truth, predictions, num_classes);
  MatchOutcome outcome{std::vector<ClassCounts>(num_classes), {}};
  accumulate_image(0, ground_truth, predictions, iou_threshold, confidence_threshold, outcome);
  return outcome;
}

MatchOutcome match_detections(std::span<const EvalImage> images, std::size_t num_classes,
                              double iou_threshold, double confidence_threshold) {
  check_thresholds(iou_threshold, confidence_threshold);
  MatchOutcome outcome{std::vector<ClassCounts>(num_classes), {}};
  for (std::size_t i = 0; i < images.size(); ++i) {
    check_boxes(images[i].ground_truth, images[i].predictions, num_classes);
    accumulate_image(i, images[i].ground_truth, images[i].predictions, iou_threshold,
                     confidence_threshold, outcome);
  }
  return outcome;
}

Prf prf_from_counts(const ClassCounts& c) {
  Prf r;
  if (c.tp + c.fp > 0) r.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) r.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (r.precision + r.recall > 0) r.f1 = 2 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

PrfSummary precision_recall_f1(const MatchOutcome& outcome) {
  PrfSummary summary;
  std::vector<double> p, r, f;
  for (const auto& c : outcome.per_class) {
    const auto prf = prf_from_counts(c);
    summary.per_class.push_back(prf);
    summary.active.push_back(c.tp + c.fp + c.fn > 0);
    p.push_back(prf.precision);
    r.push_back(prf.recall);
    f.push_back(prf.f1);
  }
  summary.macro = {mean_of(p, summary.active), mean_of(r, summary.active),
                   mean_of(f, summary.active)};
  return summary;
}

double average_precision_ranked(std::vector<RankedHit> hits, std::size_t num_positives) {
  if (num_positives == 0) {
    throw Error(ErrorCode::kInvalidArgument, "average precision needs at least one positive");
  }
  const auto points = pr_points(hits, num_positives);
  const auto env = precision_envelope(points);
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    ap += (points[i].recall - prev_recall) * env[i];
    prev_recall = points[i].recall;
  }
  return ap;
}

std::vector<std::optional<double>> per_class_average_precision(std::span<const EvalImage> images,
                                                               std::size_t num_classes,
                                                               double iou_threshold) {
  check_thresholds(iou_threshold, 0.0);
  auto ranking = rank_detections(images, num_classes, iou_threshold);
  std::vector<std::optional<double>> ap(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (ranking.positives[c] == 0) continue;
    ap[c] = average_precision_ranked(std::move(ranking.hits[c]), ranking.positives[c]);
  }
  return ap;
}

std::optional<double> average_precision(std::span<const EvalImage> images, std::size_t num_classes,
                                        ClassId class_id, double iou_threshold) {
  if (class_id >= num_classes) {
    throw Error(ErrorCode::kClassOutOfRange, "class " + std::to_string(class_id));
  }
  return per_class_average_precision(images, num_classes, iou_threshold)[class_id];
}

double mean_average_precision(std::span<const std::optional<double>> per_class_ap) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& ap : per_class_ap) {
    if (!ap) continue;
    sum += *ap;
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::kNoEvaluableClasses, "no class has ground truth");
  return sum / static_cast<double>(n);
}

ConfidenceSweep confidence_sweep(std::span<const EvalImage> images, std::size_t num_classes,
                                 double iou_threshold) {
  check_thresholds(iou_threshold, 0.0);
  auto ranking = rank_detections(images, num_classes, iou_threshold);

  ConfidenceSweep sweep;
  sweep.thresholds = {0.0, 1.0};
  for (const auto& class_hits : ranking.hits) {
    for (const auto& h : class_hits) sweep.thresholds.push_back(h.score);
  }
  std::sort(sweep.thresholds.begin(), sweep.thresholds.end());
  sweep.thresholds.erase(std::unique(sweep.thresholds.begin(), sweep.thresholds.end()),
                         sweep.thresholds.end());
  const std::size_t t_count = sweep.thresholds.size();

  sweep.precision.assign(num_classes, std::vector<double>(t_count, 0.0));
  sweep.recall.assign(num_classes, std::vector<double>(t_count, 0.0));
  sweep.f1.assign(num_classes, std::vector<double>(t_count, 0.0));
  sweep.active.assign(num_classes, false);
  sweep.recall_grid.resize(101);
  for (std::size_t i = 0; i <= 100; ++i) sweep.recall_grid[i] = static_cast<double>(i) / 100.0;
  sweep.pr_precision.assign(num_classes, std::vector<double>(101, 0.0));
  std::vector<bool> has_positives(num_classes, false);

  for (std::size_t c = 0; c < num_classes; ++c) {
    auto& hits = ranking.hits[c];
    const std::size_t positives = ranking.positives[c];
    sweep.active[c] = positives > 0 || !hits.empty();
    has_positives[c] = positives > 0;

    if (positives > 0) {
      // pr_points sorts hits by descending score, which the sweep below reuses.
      const auto points = pr_points(hits, positives);
      const auto env = precision_envelope(points);
      std::size_t k = 0;
      for (std::size_t i = 0; i <= 100; ++i) {
        while (k < points.size() && points[k].recall < sweep.recall_grid[i]) ++k;
        sweep.pr_precision[c][i] = k < points.size() ? env[k] : 0.0;
      }
    } else {
      std::sort(hits.begin(), hits.end(),
                [](const RankedHit& a, const RankedHit& b) { return a.score > b.score; });
    }

    // Walk thresholds from high to low, admitting hits with score >= t.
    std::size_t next = 0;
    ClassCounts counts;
    for (std::size_t t = t_count; t-- > 0;) {
      while (next < hits.size() && hits[next].score >= sweep.thresholds[t]) {
        (hits[next].true_positive ? counts.tp : counts.fp) += 1;
        ++next;
      }
      counts.fn = positives - counts.tp;
      const auto prf = prf_from_counts(counts);
      sweep.precision[c][t] = prf.precision;
      sweep.recall[c][t] = prf.recall;
      sweep.f1[c][t] = prf.f1;
    }
  }

  auto column_mean = [&](const std::vector<std::vector<double>>& rows, std::size_t col,
                         const std::vector<bool>& mask) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t c = 0; c < num_classes; ++c) {
      if (!mask[c]) continue;
      sum += rows[c][col];
      ++n;
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
  };
  for (std::size_t t = 0; t < t_count; ++t) {
    sweep.mean_precision.push_back(column_mean(sweep.precision, t, sweep.active));
    sweep.mean_recall.push_back(column_mean(sweep.recall, t, sweep.active));
    sweep.mean_f1.push_back(column_mean(sweep.f1, t, sweep.active));
    if (t == 0 || sweep.mean_f1[t] > sweep.best_f1) {
      sweep.best_f1 = sweep.mean_f1[t];
      sweep.best_f1_confidence = sweep.thresholds[t];
    }
  }
  for (std::size_t i = 0; i <= 100; ++i) {
    sweep.mean_pr_precision.push_back(column_mean(sweep.pr_precision, i, has_positives));
  }
  return sweep;
}

ConfusionMatrix::ConfusionMatrix(std::size_t num_classes)
    : num_classes_(num_classes), cells_((num_classes + 1) * (num_classes + 1), 0) {}

std::size_t ConfusionMatrix::at(std::size_t truth, std::size_t predicted) const {
  if (truth > num_classes_ || predicted > num_classes_) {
    throw Error(ErrorCode::kInvalidArgument, "confusion matrix index out of range");
  }
  return cells_[truth * (num_classes_ + 1) + predicted];
}

void ConfusionMatrix::increment(std::size_t truth, std::size_t predicted) {
  if (truth > num_classes_ || predicted > num_classes_) {
    throw Error(ErrorCode::kInvalidArgument, "confusion matrix index out of range");
  }
  if (truth == num_classes_ && predicted == num_classes_) {
    throw Error(ErrorCode::kInvalidArgument, "background/background cell is undefined");
  }
  ++cells_[truth * (num_classes_ + 1) + predicted];
}

std::size_t ConfusionMatrix::total() const {
  return std::accumulate(cells_.begin(), cells_.end(), std::size_t{0});
}

std::size_t ConfusionMatrix::row_sum(std::size_t truth) const {
  std::size_t sum = 0;
  for (std::size_t p = 0; p <= num_classes_; ++p) sum += at(truth, p);
  return sum;
}

std::size_t ConfusionMatrix::column_sum(std::size_t predicted) const {
  std::size_t sum = 0;
  for (std::size_t t = 0; t <= num_classes_; ++t) sum += at(t, predicted);
  return sum;
}

ConfusionMatrix confusion_matrix(std::span<const EvalImage> images, std::size_t num_classes,
                                 double iou_threshold, double confidence_threshold) {
  check_thresholds(iou_threshold, confidence_threshold);
  ConfusionMatrix matrix(num_classes);
  for (const auto& image : images) {
    check_boxes(image.ground_truth, image.predictions, num_classes);
    const auto& gt = image.ground_truth;
    const auto& preds = image.predictions;

    struct Candidate {
      double iou;
      std::size_t pred;
      std::size_t gt;
    };
    std::vector<Candidate> candidates;
    for (std::size_t p = 0; p < preds.size(); ++p) {
      if (preds[p].confidence < confidence_threshold) continue;
      for (std::size_t g = 0; g < gt.size(); ++g) {
        const double v = iou(preds[p].box, gt[g].box);
        if (v >= iou_threshold) candidates.push_back({v, p, g});
      }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      return std::tie(b.iou, a.pred, a.gt) < std::tie(a.iou, b.pred, b.gt);
    });

    std::vector<char> pred_used(preds.size(), 0);
    std::vector<char> gt_used(gt.size(), 0);
    for (const auto& cand : candidates) {
      if (pred_used[cand.pred] || gt_used[cand.gt]) continue;
      pred_used[cand.pred] = 1;
      gt_used[cand.gt] = 1;
      matrix.increment(gt[cand.gt].class_id, preds[cand.pred].class_id);
    }
    for (std::size_t g = 0; g < gt.size(); ++g) {
      if (!gt_used[g]) matrix.increment(gt[g].class_id, matrix.background());
    }
    for (std::size_t p = 0; p < preds.size(); ++p) {
      if (preds[p].confidence >= confidence_threshold && !pred_used[p]) {
        matrix.increment(matrix.background(), preds[p].class_id);
      }
    }
  }
  return matrix;
}

namespace {

void finish_report(MetricsReport& report, const std::vector<ClassCounts>& counts,
                   const std::vector<std::optional<double>>& ap) {
  const std::size_t n = counts.size();
  std::vector<double> p(n), r(n), f(n);
  std::vector<bool> active(n);
  report.per_class.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    const auto prf = prf_from_counts(counts[c]);
    auto& row = report.per_class[c];
    row.precision = p[c] = prf.precision;
    row.recall = r[c] = prf.recall;
    row.f1 = f[c] = prf.f1;
    row.ap = ap[c];
    row.ground_truth = counts[c].tp + counts[c].fn;
    row.predictions = counts[c].tp + counts[c].fp;
    active[c] = counts[c].tp + counts[c].fp + counts[c].fn > 0;
    if (!ap[c]) report.excluded_from_map.push_back(static_cast<ClassId>(c));
  }
  report.macro = {mean_of(p, active), mean_of(r, active), mean_of(f, active)};
  report.map = mean_average_precision(ap);
  report.map_classes = n - report.excluded_from_map.size();
}

}  // namespace

MetricsReport evaluate_detections(std::span<const EvalImage> images, std::size_t num_classes,
                                  double iou_threshold, double confidence_threshold) {
  const auto outcome = match_detections(images, num_classes, iou_threshold, confidence_threshold);
  const auto ap = per_class_average_precision(images, num_classes, iou_threshold);

  MetricsReport report;
  report.task = "detection";
  report.iou_threshold = iou_threshold;
  report.confidence_threshold = confidence_threshold;
  report.ap_method = kApMethodDetection;
  finish_report(report, outcome.per_class, ap);
  report.confusion = confusion_matrix(images, num_classes, iou_threshold, confidence_threshold);
  return report;
}

MetricsReport classification_metrics(std::span<const LabelProbabilities> samples,
                                     std::size_t num_classes, double probability_threshold) {
  if (!(probability_threshold >= 0.0 && probability_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "probability threshold must lie in [0, 1]");
  }
  std::vector<ClassCounts> counts(num_classes);
  std::vector<std::vector<RankedHit>> hits(num_classes);
  std::vector<std::size_t> positives(num_classes, 0);
  std::vector<char> truth(num_classes);

  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& sample = samples[s];
    if (sample.probabilities.size() != num_classes) {
      throw Error(ErrorCode::kLengthMismatch,
                  "sample " + std::to_string(s) + " has " +
                      std::to_string(sample.probabilities.size()) + " probabilities, expected " +
                      std::to_string(num_classes));
    }
    std::fill(truth.begin(), truth.end(), 0);
    for (const auto id : sample.truth) {
      if (id >= num_classes) {
        throw Error(ErrorCode::kClassOutOfRange, "sample " + std::to_string(s) + " label " +
                                                     std::to_string(id));
      }
      truth[id] = 1;
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
      const double prob = sample.probabilities[c];
      if (!(prob >= 0.0 && prob <= 1.0)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "sample " + std::to_string(s) + " probability outside [0, 1]");
      }
      const bool predicted = prob >= probability_threshold;
      if (truth[c]) {
        ++positives[c];
        (predicted ? counts[c].tp : counts[c].fn) += 1;
      } else if (predicted) {
        ++counts[c].fp;
      }
      hits[c].push_back({prob, truth[c] != 0});
    }
  }

  std::vector<std::optional<double>> ap(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (positives[c] > 0) ap[c] = average_precision_ranked(std::move(hits[c]), positives[c]);
  }

  MetricsReport report;
  report.task = "classification";
  report.confidence_threshold = probability_threshold;
  report.ap_method = kApMethodClassification;
  finish_report(report, counts, ap);
  return report;
}

}  // namespace dishlog
