// Copyright 2026 The dishlog Authors
// SPDX-License-Identifier: Apache-2.0
//
// Comma-separated exports of metrics reports, curves and confusion matrices.
// Percentages carry two decimals.

#pragma once

#include <ostream>
#include <string>

#include "dishlog/dataset.hpp"
#include "dishlog/metrics.hpp"

namespace dishlog {

/// Fixed two-decimal percentage, e.g. 0.8770 -> "87.70".
std::string format_percent(double fraction);

/// `class,P,R,F1,AP` rows, a `macro` row whose last column is mAP, then a
/// `# ...` summary line describing thresholds and the AP convention.
void write_metrics_table(std::ostream& out, const ClassRegistry& registry,
                         const MetricsReport& report);

/// `confidence,<class names...>,mean` for one of "precision", "recall", "f1".
void write_confidence_curve(std::ostream& out, const ClassRegistry& registry,
                            const ConfidenceSweep& sweep, const std::string& metric);

/// `recall,<class names...>,mean` on the 101-point recall grid.
void write_pr_curve(std::ostream& out, const ClassRegistry& registry, const ConfidenceSweep& sweep);

/// Square table with a header row of predicted classes plus `background`.
void write_confusion_matrix(std::ostream& out, const ClassRegistry& registry,
                            const ConfusionMatrix& matrix);

/// Quotes a field when it contains a comma, quote or newline.
std::string csv_field(const std::string& text);

}  // namespace dishlog
