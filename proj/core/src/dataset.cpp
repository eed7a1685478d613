// Copyright 2026 The dishlog Authors
// SPDX-License-Identifier: Apache-2.0

#include "dishlog/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include "dishlog/error.hpp"
#include "random_util.hpp"
#include "text_util.hpp"

namespace dishlog {

namespace fs = std::filesystem;

ClassRegistry::ClassRegistry(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw Error(ErrorCode::kEmptyRegistry, "class list is empty");
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) {
      throw Error(ErrorCode::kInvalidArgument, "class " + std::to_string(i) + " has an empty name");
    }
    if (!index_.emplace(names_[i], static_cast<ClassId>(i)).second) {
      throw Error(ErrorCode::kDuplicateClass, "duplicate class \"" + names_[i] + "\"");
    }
  }
}

std::optional<ClassId> ClassRegistry::find(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double BoundingBox::x_min() const { return std::clamp(cx - w / 2, 0.0, 1.0); }
double BoundingBox::y_min() const { return std::clamp(cy - h / 2, 0.0, 1.0); }
double BoundingBox::x_max() const { return std::clamp(cx + w / 2, 0.0, 1.0); }
double BoundingBox::y_max() const { return std::clamp(cy + h / 2, 0.0, 1.0); }

bool BoundingBox::valid() const {
  const bool finite = std::isfinite(cx) && std::isfinite(cy) && std::isfinite(w) && std::isfinite(h);
  return finite && cx >= 0 && cx <= 1 && cy >= 0 && cy <= 1 && w > 0 && w <= 1 && h > 0 && h <= 1;
}

Dataset::Dataset(ClassRegistry registry, std::vector<ImageRecord> images)
    : registry_(std::move(registry)), images_(std::move(images)) {
  std::unordered_set<std::string> seen;
  for (const auto& image : images_) {
    if (!seen.insert(image.image_id).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate image id \"" + image.image_id + "\"");
    }
    for (const auto& box : image.boxes) {
      if (box.class_id >= registry_.size()) {
        throw Error(ErrorCode::kClassOutOfRange,
                    "image \"" + image.image_id + "\" uses class " + std::to_string(box.class_id));
      }
    }
  }
}

ClassRegistry parse_class_list(std::string_view text) {
  std::vector<std::string> names;
  std::set<std::string> seen;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto name = detail::trim(lines[i]);
    if (name.empty()) continue;
    if (!seen.emplace(name).second) {
      throw Error(ErrorCode::kDuplicateClass, "duplicate class \"" + std::string(name) + "\"", i + 1);
    }
    names.emplace_back(name);
  }
  return ClassRegistry(std::move(names));
}

ImageRecord parse_yolo_label_file(std::string image_id, std::string_view text,
                                  const ClassRegistry& registry) {
  ImageRecord record{std::move(image_id), {}};
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto fields = detail::split_whitespace(lines[i]);
    if (fields.empty()) continue;
    if (fields.size() != 5) {
      throw Error(ErrorCode::kFormat,
                  "expected 5 fields `class_id cx cy w h`, got " + std::to_string(fields.size()),
                  line_no);
    }
    const auto id = detail::parse_uint(fields[0]);
    if (!id) throw Error(ErrorCode::kFormat, "class id is not a non-negative integer", line_no);
    if (*id >= registry.size()) {
      throw Error(ErrorCode::kClassOutOfRange,
                  "class id " + std::to_string(*id) + " >= " + std::to_string(registry.size()),
                  line_no);
    }
    double v[4];
    for (int k = 0; k < 4; ++k) {
      const auto d = detail::parse_double(fields[k + 1]);
      if (!d) throw Error(ErrorCode::kFormat, "coordinate is not a finite decimal", line_no);
      v[k] = *d;
    }
    const BoundingBox box{v[0], v[1], v[2], v[3]};
    if (!box.valid()) throw Error(ErrorCode::kBoxOutOfRange, "box outside the unit square", line_no);
    record.boxes.push_back({static_cast<ClassId>(*id), box});
  }
  return record;
}

std::string serialize_yolo_label(const ImageRecord& record) {
  std::string out;
  for (const auto& b : record.boxes) {
    out += std::to_string(b.class_id);
    for (const double v : {b.box.cx, b.box.cy, b.box.w, b.box.h}) {
      out += ' ';
      detail::append_double(out, v);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::pair<double, double> mean_and_sample_std(std::span<const std::size_t> values) {
  if (values.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (const auto v : values) sum += static_cast<double>(v);
  const double mean = sum / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (const auto v : values) {
    const double d = static_cast<double>(v) - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / (n - 1))};
}

}  // namespace

DatasetStats summarize_class_counts(std::span<const std::size_t> image_counts,
                                    std::span<const std::size_t> annotation_counts) {
  if (image_counts.size() != annotation_counts.size()) {
    throw Error(ErrorCode::kLengthMismatch, "image and annotation count vectors differ in length");
  }
  DatasetStats stats;
  stats.per_class_image_count.assign(image_counts.begin(), image_counts.end());
  stats.per_class_annotation_count.assign(annotation_counts.begin(), annotation_counts.end());
  std::tie(stats.image_mean, stats.image_std) = mean_and_sample_std(image_counts);
  std::tie(stats.annotation_mean, stats.annotation_std) = mean_and_sample_std(annotation_counts);
  stats.image_column_sum = std::accumulate(image_counts.begin(), image_counts.end(), std::size_t{0});
  stats.total_annotations =
      std::accumulate(annotation_counts.begin(), annotation_counts.end(), std::size_t{0});
  return stats;
}

DatasetStats compute_stats(const Dataset& dataset) {
  const std::size_t n = dataset.num_classes();
  std::vector<std::size_t> images(n, 0);
  std::vector<std::size_t> annotations(n, 0);
  std::vector<char> present(n, 0);
  for (const auto& image : dataset.images()) {
    std::fill(present.begin(), present.end(), 0);
    for (const auto& box : image.boxes) {
      ++annotations[box.class_id];
      present[box.class_id] = 1;
    }
    for (std::size_t c = 0; c < n; ++c) images[c] += present[c];
  }
  auto stats = summarize_class_counts(images, annotations);
  stats.total_images = dataset.images().size();
  return stats;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset, double train_fraction,
                                          std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "train fraction must lie in (0, 1)");
  }
  const auto& images = dataset.images();
  std::vector<std::size_t> order(images.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[detail::uniform_index(rng, i)]);
  }
  const auto train_size =
      static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(images.size())));

  std::vector<ImageRecord> train, test;
  train.reserve(train_size);
  test.reserve(images.size() - train_size);
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < train_size ? train : test).push_back(images[order[i]]);
  }
  return {Dataset(dataset.registry(), std::move(train)), Dataset(dataset.registry(), std::move(test))};
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

ClassRegistry load_class_list(const fs::path& path) {
  try {
    return parse_class_list(read_text_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message(), e.line());
  }
}

Dataset load_dataset(const fs::path& classes_file, const fs::path& labels_dir) {
  auto registry = load_class_list(classes_file);
  if (!fs::is_directory(labels_dir)) {
    throw Error(ErrorCode::kIo, labels_dir.string() + " is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(labels_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<ImageRecord> images;
  images.reserve(files.size());
  for (const auto& file : files) {
    try {
      images.push_back(parse_yolo_label_file(file.stem().string(), read_text_file(file), registry));
    } catch (const Error& e) {
      throw Error(e.code(), file.string() + ": " + e.message(), e.line());
    }
  }
  return Dataset(std::move(registry), std::move(images));
}

void write_labels(const Dataset& dataset, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& image : dataset.images()) {
    write_text_file(dir / (image.image_id + ".txt"), serialize_yolo_label(image));
  }
}

void write_stats_table(std::ostream& out, const ClassRegistry& registry, const DatasetStats& stats) {
  out << "class_id,name,images,annotations\n";
  for (std::size_t c = 0; c < registry.size(); ++c) {
    out << c << ',' << registry.name(static_cast<ClassId>(c)) << ','
        << stats.per_class_image_count.at(c) << ',' << stats.per_class_annotation_count.at(c)
        << '\n';
  }
  out << '\n';
  out << "classes," << registry.size() << '\n';
  if (stats.total_images != 0) out << "unique_images," << stats.total_images << '\n';
  out << "image_column_sum," << stats.image_column_sum << '\n';
  out << "total_annotations," << stats.total_annotations << '\n';
  out << "images_per_class_mean," << detail::format_fixed(stats.image_mean, 2) << '\n';
  out << "images_per_class_std," << detail::format_fixed(stats.image_std, 2) << '\n';
  out << "annotations_per_class_mean," << detail::format_fixed(stats.annotation_mean, 2) << '\n';
  out << "annotations_per_class_std," << detail::format_fixed(stats.annotation_std, 2) << '\n';
}

ClassCountTable parse_class_count_table(std::string_view text) {
  std::vector<std::string> names;
  std::vector<std::size_t> images, annotations;
  const auto lines = detail::split_lines(text);
  bool header_seen = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = detail::trim(lines[i]);
    if (line.empty()) {
      if (header_seen) break;  // summary block follows
      continue;
    }
    if (line.front() == '#') continue;
    if (!header_seen) {
      if (line != "class_id,name,images,annotations") {
        throw Error(ErrorCode::kFormat, "expected header class_id,name,images,annotations", i + 1);
      }
      header_seen = true;
      continue;
    }
    const auto fields = detail::split_char(line, ',');
    if (fields.size() != 4) throw Error(ErrorCode::kFormat, "expected 4 comma-separated fields", i + 1);
    const auto id = detail::parse_uint(detail::trim(fields[0]));
    const auto im = detail::parse_uint(detail::trim(fields[2]));
    const auto an = detail::parse_uint(detail::trim(fields[3]));
    if (!id || !im || !an) throw Error(ErrorCode::kFormat, "non-integer count", i + 1);
    if (*id != names.size()) throw Error(ErrorCode::kFormat, "class ids must be 0..N-1 in order", i + 1);
    names.emplace_back(detail::trim(fields[1]));
    images.push_back(*im);
    annotations.push_back(*an);
  }
  return {ClassRegistry(std::move(names)), std::move(images), std::move(annotations)};
}

}  // namespace dishlog
