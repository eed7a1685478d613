// Copyright 2026 The dishlog Authors
// SPDX-License-Identifier: Apache-2.0

#include "dishlog/metrics.hpp"

#include <gtest/gtest.h>

#include "dishlog/error.hpp"
#include "oracles.hpp"

namespace dishlog {
namespace {

using testing::Rng;

BoundingBox corners(double x0, double y0, double x1, double y1) {
  return {(x0 + x1) / 2, (y0 + y1) / 2, x1 - x0, y1 - y0};
}

const BoundingBox kBoxA = corners(0.1, 0.1, 0.3, 0.3);
const BoundingBox kBoxB = corners(0.6, 0.6, 0.9, 0.9);

TEST(Iou, HandCases) {
  EXPECT_DOUBLE_EQ(iou(kBoxA, kBoxA), 1.0);
  EXPECT_DOUBLE_EQ(iou(kBoxA, kBoxB), 0.0);
  // (0,0)-(2,2) and (1,1)-(3,3) in a 4x4 frame.
  EXPECT_NEAR(iou(corners(0, 0, 0.5, 0.5), corners(0.25, 0.25, 0.75, 0.75)), 1.0 / 7.0, 1e-12);
  // Touching edges share no area.
  EXPECT_DOUBLE_EQ(iou(corners(0, 0, 0.5, 0.5), corners(0.5, 0, 1, 0.5)), 0.0);
  // Contained box: ratio of areas.
  EXPECT_NEAR(iou(corners(0, 0, 1, 1), corners(0, 0, 0.5, 0.5)), 0.25, 1e-12);
}

TEST(Iou, ClampsToImage) {
  const BoundingBox over{0.0, 0.5, 0.4, 0.4};  // left half falls outside
  const BoundingBox inside = corners(0.0, 0.3, 0.2, 0.7);
  EXPECT_NEAR(iou(over, inside), 1.0, 1e-12);
}

TEST(Iou, PropertiesAgainstReference) {
  Rng rng(21);
  for (int i = 0; i < 20000; ++i) {
    const auto a = testing::random_valid_box(rng);
    const auto b = testing::random_valid_box(rng);
    const double ab = iou(a, b);
    ASSERT_EQ(ab, iou(b, a));
    ASSERT_GE(ab, 0.0);
    ASSERT_LE(ab, 1.0);
    ASSERT_NEAR(iou(a, a), 1.0, 1e-12);
    ASSERT_NEAR(ab, testing::oracle_iou(a, b), 1e-12);
  }
}

TEST(Matching, PerfectDetector) {
  const std::vector<GroundTruthBox> gt{{0, kBoxA}, {1, kBoxB}, {1, kBoxA}};
  std::vector<PredictedBox> preds;
  for (const auto& g : gt) preds.push_back({g.class_id, 1.0, g.box});
  const auto out = match_detections(gt, preds, 2, 0.5, 0.5);
  EXPECT_EQ(out.total(), (ClassCounts{3, 0, 0}));
  EXPECT_EQ(out.pairs.size(), 3u);
}

TEST(Matching, DuplicateDetectionIsFalsePositive) {
  const std::vector<GroundTruthBox> gt{{0, kBoxA}};
  const std::vector<PredictedBox> preds{{0, 0.9, kBoxA}, {0, 0.9, kBoxA}};
  const auto out = match_detections(gt, preds, 1, 0.5, 0.0);
  EXPECT_EQ(out.per_class[0], (ClassCounts{1, 1, 0}));
  ASSERT_EQ(out.pairs.size(), 1u);
  EXPECT_EQ(out.pairs[0].prediction, 0u);  // first in input order wins the tie
}

TEST(Matching, HigherConfidenceClaimsFirst) {
  const std::vector<GroundTruthBox> gt{{0, kBoxA}};
  const std::vector<PredictedBox> preds{{0, 0.3, kBoxA}, {0, 0.8, corners(0.11, 0.1, 0.31, 0.3)}};
  const auto out = match_detections(gt, preds, 1, 0.5, 0.0);
  ASSERT_EQ(out.pairs.size(), 1u);
  EXPECT_EQ(out.pairs[0].prediction, 1u);
}

TEST(Matching, WrongClassIsFpAndFn) {
  const std::vector<GroundTruthBox> gt{{0, kBoxA}};
  const std::vector<PredictedBox> preds{{1, 0.9, kBoxA}};
  const auto out = match_detections(gt, preds, 2, 0.5, 0.5);
  EXPECT_EQ(out.per_class[0], (ClassCounts{0, 0, 1}));
  EXPECT_EQ(out.per_class[1], (ClassCounts{0, 1, 0}));
}

TEST(Matching, PicksHighestIouThenLowestIndex) {
  const BoundingBox g0 = corners(0.1, 0.1, 0.5, 0.5);
  const BoundingBox g1 = corners(0.12, 0.1, 0.52, 0.5);
  const std::vector<GroundTruthBox> gt{{0, g0}, {0, g1}, {0, g1}};
  const std::vector<PredictedBox> preds{{0, 0.9, g1}, {0, 0.8, g1}};
  const auto out = match_detections(gt, preds, 1, 0.5, 0.0);
  ASSERT_EQ(out.pairs.size(), 2u);
  EXPECT_EQ(out.pairs[0].ground_truth, 1u);
  EXPECT_EQ(out.pairs[1].ground_truth, 2u);
}

TEST(Matching, ConfidenceThresholdIsInclusive) {
  const std::vector<GroundTruthBox> gt{{0, kBoxA}};
  const std::vector<PredictedBox> preds{{0, 0.5, kBoxA}, {0, 0.49, kBoxB}};
  const auto out = match_detections(gt, preds, 1, 0.5, 0.5);
  EXPECT_EQ(out.per_class[0], (ClassCounts{1, 0, 0}));
}

TEST(Matching, RejectsInvalidInput) {
  const std::vector<GroundTruthBox> gt{{2, kBoxA}};
  const std::vector<PredictedBox> none;
  EXPECT_THROW(match_detections(gt, none, 2, 0.5, 0.5), Error);
  const std::vector<PredictedBox> bad{{0, 1.5, kBoxA}};
  try {
    match_detections({}, bad, 1, 0.5, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfidenceOutOfRange);
  }
  EXPECT_THROW(match_detections({}, none, 1, 1.5, 0.5), Error);
}

TEST(Matching, AgreesWithReferenceAndKeepsInvariants) {
  Rng rng(31);
  for (int t = 0; t < 3000; ++t) {
    const auto inst = testing::random_instance(rng);
    const double iou_thr = rng.uniform(0.0, 1.0);
    const double conf_thr = rng.chance(0.3) ? 0.0 : rng.uniform(0.0, 1.0);
    const auto out = match_detections(inst.images, inst.num_classes, iou_thr, conf_thr);
    for (ClassId c = 0; c < inst.num_classes; ++c) {
      const auto ref = testing::oracle_match(inst.images, c, iou_thr, conf_thr);
      const auto& got = out.per_class[c];
      ASSERT_EQ(got.tp, ref.tp);
      ASSERT_EQ(got.fp, ref.fp);
      ASSERT_EQ(got.fn, ref.fn);
      std::size_t kept = 0;
      for (const auto& im : inst.images) {
        for (const auto& p : im.predictions) kept += p.class_id == c && p.confidence >= conf_thr;
      }
      ASSERT_EQ(got.tp + got.fn, testing::oracle_num_gt(inst.images, c));
      ASSERT_EQ(got.tp + got.fp, kept);
    }
  }
}

TEST(Matching, TruePositivesNonIncreasingInThresholds) {
  Rng rng(32);
  for (int t = 0; t < 1000; ++t) {
    const auto inst = testing::random_instance(rng);
    double lo = rng.uniform(0.0, 1.0), hi = rng.uniform(0.0, 1.0);
    if (lo > hi) std::swap(lo, hi);
    const double fixed = rng.uniform(0.0, 1.0);
    const auto a = match_detections(inst.images, inst.num_classes, lo, fixed);
    const auto b = match_detections(inst.images, inst.num_classes, hi, fixed);
    const auto c = match_detections(inst.images, inst.num_classes, fixed, lo);
    const auto d = match_detections(inst.images, inst.num_classes, fixed, hi);
    for (std::size_t k = 0; k < inst.num_classes; ++k) {
      ASSERT_GE(a.per_class[k].tp, b.per_class[k].tp);
      ASSERT_GE(c.per_class[k].tp, d.per_class[k].tp);
    }
  }
}

TEST(Prf, HandCases) {
  const auto r = prf_from_counts({3, 1, 2});
  EXPECT_NEAR(r.precision, 0.75, 1e-12);
  EXPECT_NEAR(r.recall, 0.6, 1e-12);
  EXPECT_NEAR(r.f1, 2.0 / 3.0, 1e-12);
  const auto z = prf_from_counts({0, 0, 0});
  EXPECT_EQ(z.precision, 0.0);
  EXPECT_EQ(z.recall, 0.0);
  EXPECT_EQ(z.f1, 0.0);
  const auto onlyfp = prf_from_counts({0, 4, 0});
  EXPECT_EQ(onlyfp.precision, 0.0);
  EXPECT_EQ(onlyfp.f1, 0.0);
  const auto perfect = prf_from_counts({5, 0, 0});
  EXPECT_EQ(perfect.precision, 1.0);
  EXPECT_EQ(perfect.recall, 1.0);
  EXPECT_EQ(perfect.f1, 1.0);
}

TEST(Prf, MacroOverActiveClasses) {
  MatchOutcome out{{{1, 0, 0}, {0, 0, 0}, {1, 1, 0}}, {}};
  const auto s = precision_recall_f1(out);
  EXPECT_EQ(s.active, (std::vector<bool>{true, false, true}));
  EXPECT_NEAR(s.macro.precision, 0.75, 1e-12);
  EXPECT_NEAR(s.macro.recall, 1.0, 1e-12);
}

TEST(AveragePrecision, RankedHandCase) {
  const std::vector<RankedHit> hits{{0.9, true}, {0.8, false}, {0.7, true}};
  EXPECT_NEAR(average_precision_ranked(hits, 2), 0.5 + 0.5 * (2.0 / 3.0), 1e-12);
  EXPECT_NEAR(average_precision_ranked({{0.9, true}, {0.5, true}}, 2), 1.0, 1e-12);
  EXPECT_NEAR(average_precision_ranked({{0.9, false}}, 2), 0.0, 1e-12);
  EXPECT_NEAR(average_precision_ranked({}, 3), 0.0, 1e-12);
  EXPECT_THROW(average_precision_ranked({}, 0), Error);
}

TEST(AveragePrecision, TiedScoresEnterTogether) {
  // FP and TP share a score: one point at (0.5, 0.5), not (0.5, 1.0).
  const std::vector<RankedHit> hits{{0.5, false}, {0.5, true}};
  EXPECT_NEAR(average_precision_ranked(hits, 2), 0.25, 1e-12);
  EXPECT_NEAR(average_precision_ranked(hits, 2), testing::oracle_ranked_ap(hits, 2), 1e-12);
}

TEST(AveragePrecision, MatchesEveryThresholdOracle) {
  Rng rng(41);
  for (int t = 0; t < 2000; ++t) {
    const auto inst = testing::random_instance(rng);
    const double thr = rng.chance(0.5) ? 0.5 : rng.uniform(0.05, 0.95);
    const auto ap = per_class_average_precision(inst.images, inst.num_classes, thr);
    for (ClassId c = 0; c < inst.num_classes; ++c) {
      const auto ref = testing::oracle_average_precision(inst.images, c, thr);
      ASSERT_EQ(ap[c].has_value(), ref.has_value());
      if (ref) {
        ASSERT_NEAR(*ap[c], *ref, 1e-9);
      }
    }
  }
}

TEST(AveragePrecision, DependsOnlyOnRanking) {
  Rng rng(42);
  for (int t = 0; t < 500; ++t) {
    auto inst = testing::random_instance(rng);
    const auto before = per_class_average_precision(inst.images, inst.num_classes, 0.5);
    for (auto& im : inst.images) {
      for (auto& p : im.predictions) p.confidence = p.confidence * 0.5 + 0.25;
    }
    const auto after = per_class_average_precision(inst.images, inst.num_classes, 0.5);
    for (std::size_t c = 0; c < before.size(); ++c) {
      ASSERT_EQ(before[c].has_value(), after[c].has_value());
      if (before[c]) {
        ASSERT_NEAR(*before[c], *after[c], 1e-12);
      }
    }
  }
}

TEST(AveragePrecision, UndefinedWithoutGroundTruth) {
  const std::vector<EvalImage> images{{{{0, kBoxA}}, {{1, 0.9, kBoxB}}}};
  const auto ap = per_class_average_precision(images, 2, 0.5);
  EXPECT_NEAR(*ap[0], 0.0, 1e-12);
  EXPECT_FALSE(ap[1]);
  EXPECT_FALSE(average_precision(images, 2, 1, 0.5));
}

TEST(MeanAveragePrecision, ArithmeticMeanOverDefined) {
  const std::vector<std::optional<double>> a{1.0, 0.5};
  EXPECT_DOUBLE_EQ(mean_average_precision(a), 0.75);
  const std::vector<std::optional<double>> b{std::nullopt, 0.4};
  EXPECT_DOUBLE_EQ(mean_average_precision(b), 0.4);
  const std::vector<std::optional<double>> none{std::nullopt};
  try {
    mean_average_precision(none);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoEvaluableClasses);
  }
}

TEST(MeanAveragePrecision, PerfectAndEmptyDetectors) {
  Rng rng(43);
  for (int t = 0; t < 200; ++t) {
    auto inst = testing::random_instance(rng);
    bool any_gt = false;
    for (const auto& im : inst.images) any_gt |= !im.ground_truth.empty();
    if (!any_gt) continue;
    const auto perfect = testing::perfect_predictions(inst.images);
    const auto ap = per_class_average_precision(perfect, inst.num_classes, 0.5);
    ASSERT_EQ(mean_average_precision(ap), 1.0);
    for (auto& im : inst.images) im.predictions.clear();
    const auto empty = per_class_average_precision(inst.images, inst.num_classes, 0.5);
    ASSERT_EQ(mean_average_precision(empty), 0.0);
  }
}

TEST(ConfidenceSweep, MatchesRematchingAtEveryThreshold) {
  Rng rng(51);
  for (int t = 0; t < 300; ++t) {
    const auto inst = testing::random_instance(rng);
    const auto sweep = confidence_sweep(inst.images, inst.num_classes, 0.5);
    ASSERT_EQ(sweep.thresholds.front(), 0.0);
    ASSERT_EQ(sweep.thresholds.back(), 1.0);
    for (std::size_t i = 1; i < sweep.thresholds.size(); ++i) {
      ASSERT_LT(sweep.thresholds[i - 1], sweep.thresholds[i]);
    }
    for (std::size_t k = 0; k < sweep.thresholds.size(); ++k) {
      const double thr = sweep.thresholds[k];
      const auto prf = precision_recall_f1(match_detections(inst.images, inst.num_classes, 0.5, thr));
      for (ClassId c = 0; c < inst.num_classes; ++c) {
        const auto ref = testing::oracle_match(inst.images, c, 0.5, thr);
        ASSERT_NEAR(sweep.precision[c][k], testing::safe_div(ref.tp, ref.tp + ref.fp), 1e-12);
        ASSERT_NEAR(sweep.recall[c][k], testing::safe_div(ref.tp, ref.tp + ref.fn), 1e-12);
        ASSERT_NEAR(sweep.f1[c][k], prf.per_class[c].f1, 1e-12);
      }
      // Mean curves average a fixed class set: classes with any ground truth
      // or any prediction, whatever the threshold.
      double sum = 0;
      std::size_t used = 0;
      for (ClassId c = 0; c < inst.num_classes; ++c) {
        const auto all = testing::oracle_match(inst.images, c, 0.5, 0.0);
        if (all.tp + all.fp + all.fn == 0) continue;
        ASSERT_TRUE(sweep.active[c]);
        sum += prf.per_class[c].f1;
        ++used;
      }
      ASSERT_NEAR(sweep.mean_f1[k], used == 0 ? 0.0 : sum / used, 1e-12);
    }
  }
}

TEST(ConfidenceSweep, BestF1IsLowestArgmax) {
  Rng rng(52);
  for (int t = 0; t < 200; ++t) {
    const auto inst = testing::random_instance(rng);
    const auto sweep = confidence_sweep(inst.images, inst.num_classes, 0.5);
    const auto best = std::max_element(sweep.mean_f1.begin(), sweep.mean_f1.end());
    ASSERT_EQ(sweep.best_f1, *best);
    ASSERT_EQ(sweep.best_f1_confidence, sweep.thresholds[best - sweep.mean_f1.begin()]);
  }
}

TEST(ConfidenceSweep, PerfectDetectorPrecisionIsOne) {
  Rng rng(53);
  const auto ds = testing::random_dataset(rng, 3, 10, 4);
  std::vector<EvalImage> images;
  for (const auto& im : ds.images()) images.push_back({im.boxes, {}});
  images = testing::perfect_predictions(images);
  const auto sweep = confidence_sweep(images, 3, 0.5);
  for (ClassId c = 0; c < 3; ++c) {
    if (!sweep.active[c]) continue;
    for (std::size_t k = 0; k < sweep.thresholds.size(); ++k) {
      EXPECT_EQ(sweep.precision[c][k], 1.0);
      EXPECT_EQ(sweep.recall[c][k], 1.0);
    }
    for (const double p : sweep.pr_precision[c]) EXPECT_EQ(p, 1.0);
  }
}

TEST(ConfidenceSweep, PrEnvelopeNonIncreasing) {
  Rng rng(54);
  for (int t = 0; t < 300; ++t) {
    const auto inst = testing::random_instance(rng);
    const auto sweep = confidence_sweep(inst.images, inst.num_classes, 0.5);
    ASSERT_EQ(sweep.recall_grid.size(), 101u);
    for (std::size_t c = 0; c < inst.num_classes; ++c) {
      for (std::size_t i = 1; i < 101; ++i) {
        ASSERT_LE(sweep.pr_precision[c][i], sweep.pr_precision[c][i - 1]);
      }
    }
  }
}

// Reference confusion matrix: repeatedly take the best remaining pair.
ConfusionMatrix oracle_confusion(const std::vector<EvalImage>& images, std::size_t n, double iou_thr,
                                 double conf_thr) {
  ConfusionMatrix m(n);
  for (const auto& im : images) {
    std::vector<bool> gt_used(im.ground_truth.size()), pred_used(im.predictions.size());
    for (std::size_t p = 0; p < im.predictions.size(); ++p) {
      pred_used[p] = im.predictions[p].confidence < conf_thr;
    }
    while (true) {
      double best = -1;
      std::size_t bp = 0, bg = 0;
      for (std::size_t p = 0; p < im.predictions.size(); ++p) {
        if (pred_used[p]) continue;
        for (std::size_t g = 0; g < im.ground_truth.size(); ++g) {
          if (gt_used[g]) continue;
          const double v = testing::oracle_iou(im.predictions[p].box, im.ground_truth[g].box);
          if (v >= iou_thr && v > best) {
            best = v;
            bp = p;
            bg = g;
          }
        }
      }
      if (best < 0) break;
      pred_used[bp] = gt_used[bg] = true;
      m.increment(im.ground_truth[bg].class_id, im.predictions[bp].class_id);
    }
    for (std::size_t g = 0; g < im.ground_truth.size(); ++g) {
      if (!gt_used[g]) m.increment(im.ground_truth[g].class_id, n);
    }
    for (std::size_t p = 0; p < im.predictions.size(); ++p) {
      if (!pred_used[p]) m.increment(n, im.predictions[p].class_id);
    }
  }
  return m;
}

TEST(Confusion, HandCases) {
  const std::vector<EvalImage> perfect{{{{0, kBoxA}, {1, kBoxB}}, {{0, 1.0, kBoxA}, {1, 1.0, kBoxB}}}};
  const auto m = confusion_matrix(perfect, 2, 0.5, 0.5);
  EXPECT_EQ(m.at(0, 0), 1u);
  EXPECT_EQ(m.at(1, 1), 1u);
  EXPECT_EQ(m.row_sum(2) + m.column_sum(2), 0u);

  const std::vector<EvalImage> swapped{{{{0, kBoxA}}, {{1, 0.9, kBoxA}}}};
  const auto s = confusion_matrix(swapped, 2, 0.5, 0.5);
  EXPECT_EQ(s.at(0, 1), 1u);
  EXPECT_EQ(s.total(), 1u);

  const std::vector<EvalImage> missed{{{{1, kBoxA}}, {}}};
  EXPECT_EQ(confusion_matrix(missed, 2, 0.5, 0.5).at(1, 2), 1u);

  const std::vector<EvalImage> spurious{{{}, {{0, 0.9, kBoxA}, {0, 0.1, kBoxB}}}};
  const auto sp = confusion_matrix(spurious, 2, 0.5, 0.5);
  EXPECT_EQ(sp.at(2, 0), 1u);
  EXPECT_EQ(sp.total(), 1u);
}

TEST(Confusion, BackgroundCellIsNeverIncremented) {
  ConfusionMatrix m(2);
  EXPECT_THROW(m.increment(2, 2), Error);
  EXPECT_THROW(m.at(3, 0), Error);
}

TEST(Confusion, AgreesWithReferenceAndTotals) {
  Rng rng(61);
  for (int t = 0; t < 1000; ++t) {
    const auto inst = testing::random_instance(rng);
    const double conf = rng.uniform(0.0, 1.0);
    const auto m = confusion_matrix(inst.images, inst.num_classes, 0.5, conf);
    const auto ref = oracle_confusion(inst.images, inst.num_classes, 0.5, conf);
    std::size_t gt = 0, kept = 0;
    for (const auto& im : inst.images) {
      gt += im.ground_truth.size();
      for (const auto& p : im.predictions) kept += p.confidence >= conf;
    }
    std::size_t matched = 0;
    for (std::size_t r = 0; r <= inst.num_classes; ++r) {
      for (std::size_t c = 0; c <= inst.num_classes; ++c) {
        ASSERT_EQ(m.at(r, c), ref.at(r, c)) << r << "," << c;
        if (r < inst.num_classes && c < inst.num_classes) matched += m.at(r, c);
      }
    }
    ASSERT_EQ(m.total(), gt + (kept - matched));
    for (ClassId c = 0; c < inst.num_classes; ++c) {
      ASSERT_EQ(m.row_sum(c), testing::oracle_num_gt(inst.images, c));
    }
  }
}

TEST(EvaluateDetections, ReportShape) {
  const std::vector<EvalImage> images{{{{0, kBoxA}}, {{0, 0.9, kBoxA}, {1, 0.8, kBoxB}}}};
  const auto r = evaluate_detections(images, 3);
  EXPECT_EQ(r.task, "detection");
  ASSERT_EQ(r.per_class.size(), 3u);
  EXPECT_EQ(r.per_class[0].ap, 1.0);
  EXPECT_FALSE(r.per_class[1].ap);
  EXPECT_EQ(r.map, 1.0);
  EXPECT_EQ(r.map_classes, 1u);
  EXPECT_EQ(r.excluded_from_map, (std::vector<ClassId>{1, 2}));
  EXPECT_EQ(r.iou_threshold, 0.5);
  EXPECT_EQ(r.per_class[1].predictions, 1u);
  ASSERT_TRUE(r.confusion);
  EXPECT_EQ(r.confusion->at(3, 1), 1u);
  // Class 2 is idle; class 1 (one FP) pulls macro precision down.
  EXPECT_NEAR(r.macro.precision, 0.5, 1e-12);
}

TEST(EvaluateDetections, NoGroundTruthAnywhere) {
  const std::vector<EvalImage> images{{{}, {{0, 0.9, kBoxA}}}};
  try {
    evaluate_detections(images, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoEvaluableClasses);
  }
}

TEST(Classification, HandCases) {
  const std::vector<LabelProbabilities> samples{{{0.7, 0.2, 0.9}, {0, 2}}};
  const auto r = classification_metrics(samples, 3);
  EXPECT_EQ(r.task, "classification");
  for (const ClassId c : {0u, 2u}) {
    EXPECT_EQ(r.per_class[c].precision, 1.0);
    EXPECT_EQ(r.per_class[c].recall, 1.0);
    EXPECT_EQ(r.per_class[c].f1, 1.0);
  }
  EXPECT_FALSE(r.iou_threshold);

  const std::vector<LabelProbabilities> zeros{{{0.0, 0.0}, {0}}, {{0.0, 0.0}, {1}}};
  const auto z = classification_metrics(zeros, 2);
  EXPECT_EQ(z.per_class[0].recall, 0.0);
  EXPECT_EQ(z.per_class[1].recall, 0.0);
}

TEST(Classification, LengthMismatch) {
  const std::vector<LabelProbabilities> samples{{{0.7, 0.2}, {0}}};
  try {
    classification_metrics(samples, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLengthMismatch);
  }
}

TEST(Classification, ApMatchesRankingOracle) {
  Rng rng(71);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = rng.between(1, 3);
    const std::size_t m = rng.between(1, 8);
    std::vector<LabelProbabilities> samples(m);
    for (auto& s : samples) {
      for (std::size_t c = 0; c < n; ++c) {
        s.probabilities.push_back(rng.chance(0.3) ? static_cast<double>(rng.between(0, 4)) / 4.0
                                                  : rng.uniform(0.0, 1.0));
        if (rng.chance(0.4)) s.truth.push_back(static_cast<ClassId>(c));
      }
    }
    bool any = false;
    for (const auto& s : samples) any |= !s.truth.empty();
    if (!any) continue;
    const auto r = classification_metrics(samples, n);
    for (ClassId c = 0; c < n; ++c) {
      std::vector<RankedHit> hits;
      std::size_t positives = 0;
      for (const auto& s : samples) {
        const bool truth = std::find(s.truth.begin(), s.truth.end(), c) != s.truth.end();
        positives += truth;
        hits.push_back({s.probabilities[c], truth});
      }
      if (positives == 0) {
        ASSERT_FALSE(r.per_class[c].ap);
      } else {
        ASSERT_NEAR(*r.per_class[c].ap, testing::oracle_ranked_ap(hits, positives), 1e-9);
      }
    }
  }
}

}  // namespace
}  // namespace dishlog
