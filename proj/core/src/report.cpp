// Copyright 2026 The dishlog Authors
// SPDX-License-Identifier: Apache-2.0

#include "dishlog/report.hpp"

#include "dishlog/error.hpp"
#include "text_util.hpp"

namespace dishlog {

std::string format_percent(double fraction) { return detail::format_fixed(fraction * 100.0, 2); }

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (const char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

std::string number(double v) {
  std::string out;
  detail::append_double(out, v);
  return out;
}

void write_header(std::ostream& out, const char* first, const ClassRegistry& registry) {
  out << first;
  for (const auto& name : registry.names()) out << ',' << csv_field(name);
  out << ",mean\n";
}

}  // namespace

void write_metrics_table(std::ostream& out, const ClassRegistry& registry,
                         const MetricsReport& report) {
  if (report.per_class.size() != registry.size()) {
    throw Error(ErrorCode::kLengthMismatch, "report and registry disagree on class count");
  }
  out << "class,P,R,F1,AP\n";
  for (std::size_t c = 0; c < registry.size(); ++c) {
    const auto& row = report.per_class[c];
    out << csv_field(registry.name(static_cast<ClassId>(c))) << ',' << format_percent(row.precision)
        << ',' << format_percent(row.recall) << ',' << format_percent(row.f1) << ','
        << (row.ap ? format_percent(*row.ap) : std::string("n/a")) << '\n';
  }
  out << "macro," << format_percent(report.macro.precision) << ','
      << format_percent(report.macro.recall) << ',' << format_percent(report.macro.f1) << ','
      << format_percent(report.map) << '\n';
  out << "# mAP " << format_percent(report.map) << " over " << report.map_classes << '/'
      << registry.size() << " classes with ground truth";
  if (report.iou_threshold) out << "; iou " << detail::format_fixed(*report.iou_threshold, 2);
  out << "; " << (report.task == "classification" ? "probability " : "confidence ")
      << detail::format_fixed(report.confidence_threshold, 2) << "; AP: " << report.ap_method
      << '\n';
}

void write_confidence_curve(std::ostream& out, const ClassRegistry& registry,
                            const ConfidenceSweep& sweep, const std::string& metric) {
  const std::vector<std::vector<double>>* rows = nullptr;
  const std::vector<double>* mean = nullptr;
  if (metric == "precision") {
    rows = &sweep.precision;
    mean = &sweep.mean_precision;
  } else if (metric == "recall") {
    rows = &sweep.recall;
    mean = &sweep.mean_recall;
  } else if (metric == "f1") {
    rows = &sweep.f1;
    mean = &sweep.mean_f1;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown curve metric \"" + metric + "\"");
  }
  write_header(out, "confidence", registry);
  for (std::size_t t = 0; t < sweep.thresholds.size(); ++t) {
    out << number(sweep.thresholds[t]);
    for (const auto& row : *rows) out << ',' << number(row[t]);
    out << ',' << number((*mean)[t]) << '\n';
  }
}

void write_pr_curve(std::ostream& out, const ClassRegistry& registry, const ConfidenceSweep& sweep) {
  write_header(out, "recall", registry);
  for (std::size_t i = 0; i < sweep.recall_grid.size(); ++i) {
    out << number(sweep.recall_grid[i]);
    for (const auto& row : sweep.pr_precision) out << ',' << number(row[i]);
    out << ',' << number(sweep.mean_pr_precision[i]) << '\n';
  }
}

void write_confusion_matrix(std::ostream& out, const ClassRegistry& registry,
                            const ConfusionMatrix& matrix) {
  const std::size_t n = matrix.num_classes();
  auto label = [&](std::size_t i) {
    return i == n ? std::string("background") : csv_field(registry.name(static_cast<ClassId>(i)));
  };
  out << "true\\predicted";
  for (std::size_t p = 0; p <= n; ++p) out << ',' << label(p);
  out << '\n';
  for (std::size_t t = 0; t <= n; ++t) {
    out << label(t);
    for (std::size_t p = 0; p <= n; ++p) out << ',' << matrix.at(t, p);
    out << '\n';
  }
}

}  // namespace dishlog
