// Copyright 2026 The dishlog Authors
// SPDX-License-Identifier: Apache-2.0
//
// Transport-independent backend of the diet app: users, goals, meal logging,
// tracker and history over an event-sourced ledger, plus evaluation jobs.

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "dishlog/metrics.hpp"
#include "dishlog/nutrition.hpp"
#include "dishlog/service/event_store.hpp"
#include "dishlog/service/json_codec.hpp"

namespace dishlog::service {

struct ServiceConfig {
  std::filesystem::path data_dir;
  CalorieTable calorie_table;
  double confidence_threshold = kDefaultConfidenceThreshold;
  BandThresholds bands;
  std::size_t snapshot_every = 1000;  // 0 disables snapshots
  std::ptrdiff_t evaluation_workers = 2;
  std::function<Instant()> clock;  // defaults to the system clock
};

/// Ground-truth and detection bundles keyed by image id, as label-file text.
struct EvaluationRequest {
  std::vector<std::string> classes;
  std::map<std::string, std::string> ground_truth;
  std::map<std::string, std::string> detections;
  double iou_threshold = kDefaultIouThreshold;
  double confidence_threshold = kDefaultConfidenceThreshold;
};

EvaluationRequest evaluation_request_from_json(const Json& j);

struct EvaluationResult {
  ClassRegistry registry;
  MetricsReport report;
};

class DietService {
 public:
  /// Replays snapshot and event log found in `config.data_dir`.
  explicit DietService(ServiceConfig config);

  // Writes are appended to the event log before they are applied and
  // acknowledged. A repeated `request_id` returns the original result.
  std::string create_user(UserProfile profile, const std::optional<std::string>& request_id = {});
  CalorieGoal set_goal(std::string_view user_id, BmrFormula formula,
                       const std::optional<std::string>& request_id = {});
  MealLog post_meal(std::string_view user_id, const DishCounts& counts,
                    std::optional<Instant> timestamp = {},
                    const std::optional<std::string>& request_id = {});
  /// Counts detections at the configured confidence threshold.
  MealLog post_meal_detections(std::string_view user_id, std::string_view detection_lines,
                               std::optional<Instant> timestamp = {},
                               const std::optional<std::string>& request_id = {});

  UserProfile get_user(std::string_view user_id) const;
  std::optional<CalorieGoal> get_goal(std::string_view user_id) const;
  TrackerState get_tracker(std::string_view user_id, std::optional<Instant> now = {}) const;
  std::vector<HistoryDay> get_history(std::string_view user_id, CivilDate from, CivilDate to) const;
  const CalorieTable& dishes() const noexcept { return config_.calorie_table; }
  double confidence_threshold() const noexcept { return config_.confidence_threshold; }

  /// Runs on at most `evaluation_workers` concurrent jobs; never holds the
  /// ledger lock.
  EvaluationResult post_evaluation(const EvaluationRequest& request);

  /// Full state as JSON, the snapshot payload.
  Json state_json() const;

 private:
  struct RequestResult {
    EventKind kind;
    Json result;
  };

  void apply(const StoredEvent& event);
  void load_state(const Json& state);
  void after_append();
  std::optional<Json> replayed(const std::optional<std::string>& request_id, EventKind kind) const;
  MealLog record_meal(MealLog meal, const std::optional<std::string>& request_id);
  Instant now() const;

  ServiceConfig config_;
  ClassRegistry detection_registry_;
  mutable std::shared_mutex mutex_;
  DietLedger ledger_;
  std::unique_ptr<EventStore> store_;
  std::map<std::string, RequestResult> requests_;
  std::size_t events_since_snapshot_ = 0;
  std::counting_semaphore<> evaluation_slots_;
};

}  // namespace dishlog::service
