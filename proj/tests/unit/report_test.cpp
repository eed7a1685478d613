// Copyright 2026 The dishlog Authors
// SPDX-License-Identifier: Apache-2.0

#include "dishlog/report.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "dishlog/error.hpp"

namespace dishlog {
namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

const BoundingBox kBox{0.3, 0.3, 0.2, 0.2};

TEST(Report, PercentFormatting) {
  EXPECT_EQ(format_percent(1.0), "100.00");
  EXPECT_EQ(format_percent(0.0), "0.00");
  EXPECT_EQ(format_percent(0.83333), "83.33");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("plain"), "plain");
}

TEST(Report, MetricsTableLayout) {
  const ClassRegistry reg({"samosa", "jalebi"});
  const std::vector<EvalImage> images{{{{0, kBox}}, {{0, 1.0, kBox}}}};
  const auto report = evaluate_detections(images, 2);
  std::ostringstream out;
  write_metrics_table(out, reg, report);
  const auto rows = lines(out.str());
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], "class,P,R,F1,AP");
  EXPECT_EQ(rows[1], "samosa,100.00,100.00,100.00,100.00");
  EXPECT_EQ(rows[2], "jalebi,0.00,0.00,0.00,n/a");
  EXPECT_EQ(rows[3], "macro,100.00,100.00,100.00,100.00");
  EXPECT_EQ(rows[4].rfind("# mAP 100.00 over 1/2 classes", 0), 0u);

  EXPECT_THROW(write_metrics_table(out, ClassRegistry({"x"}), report), Error);
}

TEST(Report, CurveHeadersAndRows) {
  const ClassRegistry reg({"a", "b"});
  const std::vector<EvalImage> images{{{{0, kBox}}, {{0, 0.8, kBox}, {1, 0.4, kBox}}}};
  const auto sweep = confidence_sweep(images, 2, 0.5);
  for (const char* metric : {"precision", "recall", "f1"}) {
    std::ostringstream out;
    write_confidence_curve(out, reg, sweep, metric);
    const auto rows = lines(out.str());
    EXPECT_EQ(rows[0], "confidence,a,b,mean");
    EXPECT_EQ(rows.size(), sweep.thresholds.size() + 1);
  }
  std::ostringstream bad;
  EXPECT_THROW(write_confidence_curve(bad, reg, sweep, "accuracy"), Error);

  std::ostringstream pr;
  write_pr_curve(pr, reg, sweep);
  const auto rows = lines(pr.str());
  EXPECT_EQ(rows[0], "recall,a,b,mean");
  EXPECT_EQ(rows.size(), 102u);
}

TEST(Report, ConfusionLayout) {
  const ClassRegistry reg({"a", "b"});
  ConfusionMatrix m(2);
  m.increment(0, 1);
  m.increment(2, 0);
  std::ostringstream out;
  write_confusion_matrix(out, reg, m);
  const auto rows = lines(out.str());
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], "true\\predicted,a,b,background");
  EXPECT_EQ(rows[1], "a,0,1,0");
  EXPECT_EQ(rows[2], "b,0,0,0");
  EXPECT_EQ(rows[3], "background,1,0,0");
}

}  // namespace
}  // namespace dishlog
