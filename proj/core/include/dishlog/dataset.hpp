// Copyright 2026 The dishlog Authors
// SPDX-License-Identifier: Apache-2.0
//
// YOLO-format annotated datasets: class lists, label files, statistics and
// train/test splitting.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dishlog {

using ClassId = std::uint32_t;

/// Ordered class names; a class id is the zero-based position of its name.
class ClassRegistry {
 public:
  /// Throws kEmptyRegistry / kDuplicateClass.
  explicit ClassRegistry(std::vector<std::string> names);

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(ClassId id) const { return names_.at(id); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<ClassId> find(std::string_view name) const;

  bool operator==(const ClassRegistry& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, ClassId> index_;
};

/// Normalized center/size box. All values are fractions of the image size.
struct BoundingBox {
  double cx = 0.5;
  double cy = 0.5;
  double w = 1.0;
  double h = 1.0;

  // Corners, clamped to the unit square.
  double x_min() const;
  double y_min() const;
  double x_max() const;
  double y_max() const;

  /// 0 <= cx,cy <= 1 and 0 < w,h <= 1 (finite).
  bool valid() const;

  bool operator==(const BoundingBox&) const = default;
};

struct GroundTruthBox {
  ClassId class_id = 0;
  BoundingBox box;

  bool operator==(const GroundTruthBox&) const = default;
};

struct ImageRecord {
  std::string image_id;
  std::vector<GroundTruthBox> boxes;

  bool operator==(const ImageRecord&) const = default;
};

/// Registry plus images. Construction validates class ids and image id
/// uniqueness.
class Dataset {
 public:
  Dataset(ClassRegistry registry, std::vector<ImageRecord> images);

  const ClassRegistry& registry() const noexcept { return registry_; }
  const std::vector<ImageRecord>& images() const noexcept { return images_; }
  std::size_t num_classes() const noexcept { return registry_.size(); }

 private:
  ClassRegistry registry_;
  std::vector<ImageRecord> images_;
};

/// Per-class counts and their spread across classes.
///
/// An image counts once towards every distinct class it contains, so
/// `image_column_sum` can exceed `total_images` for multi-class platters.
/// Standard deviations are sample (n - 1) deviations over the per-class
/// vectors, and 0 when there is a single class.
struct DatasetStats {
  std::vector<std::size_t> per_class_image_count;
  std::vector<std::size_t> per_class_annotation_count;
  double image_mean = 0.0;
  double image_std = 0.0;
  double annotation_mean = 0.0;
  double annotation_std = 0.0;
  std::size_t total_images = 0;  // unique images; 0 when built from counts
  std::size_t image_column_sum = 0;
  std::size_t total_annotations = 0;
};

ClassRegistry parse_class_list(std::string_view text);

/// Parses `class_id cx cy w h` lines. LF and CRLF accepted, blank lines skipped.
ImageRecord parse_yolo_label_file(std::string image_id, std::string_view text,
                                  const ClassRegistry& registry);

/// One LF-terminated line per box, shortest round-trip decimals.
std::string serialize_yolo_label(const ImageRecord& record);

DatasetStats compute_stats(const Dataset& dataset);

/// Summary over already-tallied per-class counts (both spans of equal length).
DatasetStats summarize_class_counts(std::span<const std::size_t> image_counts,
                                    std::span<const std::size_t> annotation_counts);

/// Seeded image-level shuffle; train size is round(fraction * images).
std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset, double train_fraction,
                                          std::uint64_t seed);

// ---- filesystem helpers ----------------------------------------------------

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

ClassRegistry load_class_list(const std::filesystem::path& path);

/// Loads every `*.txt` in `labels_dir` (sorted by file name). Errors are
/// rethrown with the offending file path prepended to the message.
Dataset load_dataset(const std::filesystem::path& classes_file,
                     const std::filesystem::path& labels_dir);

/// Writes one `<image_id>.txt` per image into `dir` (created if needed).
void write_labels(const Dataset& dataset, const std::filesystem::path& dir);

/// `class_id,name,images,annotations` rows followed by a blank line and a
/// `key,value` summary block.
void write_stats_table(std::ostream& out, const ClassRegistry& registry,
                       const DatasetStats& stats);

/// Reads the per-class table emitted by write_stats_table (summary block and
/// `#` comments ignored). Returns the registry and the tallied counts.
struct ClassCountTable {
  ClassRegistry registry;
  std::vector<std::size_t> image_counts;
  std::vector<std::size_t> annotation_counts;
};
ClassCountTable parse_class_count_table(std::string_view text);

}  // namespace dishlog
