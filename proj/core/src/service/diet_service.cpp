// Copyright 2026 The dishlog Authors
// SPDX-License-Identifier: Apache-2.0

#include "dishlog/service/diet_service.hpp"

#include <mutex>

#include "dishlog/detect_io.hpp"
#include "dishlog/error.hpp"

namespace dishlog::service {

namespace {

/// Registry for parsing uploaded detection lines: ids up to the largest
/// priced dish are accepted, unpriced ids fail later with MissingDishCalories.
ClassRegistry registry_for(const CalorieTable& table) {
  if (table.empty()) throw Error(ErrorCode::kInvalidArgument, "calorie table is empty");
  const ClassId max_id = table.entries().rbegin()->first;
  std::vector<std::string> names;
  names.reserve(max_id + 1);
  for (ClassId id = 0; id <= max_id; ++id) {
    const auto it = table.entries().find(id);
    names.push_back(it != table.entries().end() ? it->second.name : "unlisted:" + std::to_string(id));
  }
  return ClassRegistry(std::move(names));
}

Json request_field(const std::optional<std::string>& request_id) {
  return request_id ? Json(*request_id) : Json(nullptr);
}

class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<>& slots) : slots_(slots) { slots_.acquire(); }
  ~SlotGuard() { slots_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<>& slots_;
};

}  // namespace

EvaluationRequest evaluation_request_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "evaluation request must be an object");
  EvaluationRequest req;
  try {
    req.classes = j.at("classes").get<std::vector<std::string>>();
    req.ground_truth = j.at("ground_truth").get<std::map<std::string, std::string>>();
    if (j.contains("detections")) {
      req.detections = j.at("detections").get<std::map<std::string, std::string>>();
    }
    if (j.contains("iou")) req.iou_threshold = j.at("iou").get<double>();
    if (j.contains("conf")) req.confidence_threshold = j.at("conf").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad evaluation request: ") + e.what());
  }
  return req;
}

DietService::DietService(ServiceConfig config)
    : config_(std::move(config)),
      detection_registry_(registry_for(config_.calorie_table)),
      ledger_(config_.bands),
      evaluation_slots_(std::max<std::ptrdiff_t>(1, config_.evaluation_workers)) {
  if (!(config_.confidence_threshold >= 0.0 && config_.confidence_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "confidence threshold must lie in [0, 1]");
  }
  store_ = std::make_unique<EventStore>(config_.data_dir);
  auto recovered = store_->recover();
  if (recovered.snapshot) load_state(*recovered.snapshot);
  for (const auto& event : recovered.events) apply(event);
  events_since_snapshot_ = recovered.events.size();
}

Instant DietService::now() const {
  if (config_.clock) return config_.clock();
  return std::chrono::floor<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

void DietService::apply(const StoredEvent& event) {
  const auto& p = event.payload;
  Json result;
  switch (event.kind) {
    case EventKind::kUserCreated: {
      auto profile = profile_from_json(p.at("profile"));
      result = {{"user_id", profile.user_id}};
      ledger_.add_user(std::move(profile));
      break;
    }
    case EventKind::kGoalSet: {
      const auto goal = goal_from_json(p.at("goal"));
      ledger_.restore_goal(p.at("user_id").get<std::string>(), goal);
      result = goal_to_json(goal);
      break;
    }
    case EventKind::kMealLogged: {
      auto meal = meal_from_json(p.at("meal"));
      result = meal_to_json(meal);
      ledger_.restore_meal(std::move(meal));
      break;
    }
  }
  if (p.contains("request_id") && p.at("request_id").is_string()) {
    requests_[p.at("request_id").get<std::string>()] = {event.kind, std::move(result)};
  }
}

Json DietService::state_json() const {
  Json users = Json::array();
  for (const auto& id : ledger_.user_ids()) {
    Json meals = Json::array();
    for (const auto& m : ledger_.meals(id)) meals.push_back(meal_to_json(m));
    const auto goal = ledger_.goal(id);
    users.push_back({{"profile", profile_to_json(ledger_.user(id))},
                     {"goal", goal ? goal_to_json(*goal) : Json(nullptr)},
                     {"meals", meals}});
  }
  Json requests = Json::object();
  for (const auto& [rid, r] : requests_) {
    requests[rid] = {{"kind", to_string(r.kind)}, {"result", r.result}};
  }
  return {{"users", users}, {"requests", requests}};
}

void DietService::load_state(const Json& state) {
  for (const auto& u : state.at("users")) {
    auto profile = profile_from_json(u.at("profile"));
    const auto id = profile.user_id;
    ledger_.add_user(std::move(profile));
    if (!u.at("goal").is_null()) ledger_.restore_goal(id, goal_from_json(u.at("goal")));
    for (const auto& m : u.at("meals")) ledger_.restore_meal(meal_from_json(m));
  }
  for (const auto& [rid, r] : state.at("requests").items()) {
    requests_[rid] = {parse_event_kind(r.at("kind").get<std::string>()), r.at("result")};
  }
}

void DietService::after_append() {
  ++events_since_snapshot_;
  if (config_.snapshot_every != 0 && events_since_snapshot_ >= config_.snapshot_every) {
    store_->write_snapshot(store_->last_seq(), state_json());
    events_since_snapshot_ = 0;
  }
}

std::optional<Json> DietService::replayed(const std::optional<std::string>& request_id,
                                          EventKind kind) const {
  if (!request_id) return std::nullopt;
  const auto it = requests_.find(*request_id);
  if (it == requests_.end()) return std::nullopt;
  if (it->second.kind != kind) {
    throw Error(ErrorCode::kInvalidArgument,
                "request id \"" + *request_id + "\" was used for a different operation");
  }
  return it->second.result;
}

std::string DietService::create_user(UserProfile profile, const std::optional<std::string>& request_id) {
  std::unique_lock lock(mutex_);
  if (auto prior = replayed(request_id, EventKind::kUserCreated)) {
    return prior->at("user_id").get<std::string>();
  }
  if (profile.user_id.empty()) {
    std::size_t k = ledger_.user_ids().size() + 1;
    while (ledger_.has_user("u" + std::to_string(k))) ++k;
    profile.user_id = "u" + std::to_string(k);
  }
  validate_profile(profile);
  if (ledger_.has_user(profile.user_id)) {
    throw Error(ErrorCode::kInvalidArgument, "user \"" + profile.user_id + "\" already exists");
  }
  const auto event = store_->append(
      EventKind::kUserCreated,
      {{"profile", profile_to_json(profile)}, {"request_id", request_field(request_id)}}, now());
  apply(event);
  after_append();
  return profile.user_id;
}

CalorieGoal DietService::set_goal(std::string_view user_id, BmrFormula formula,
                                  const std::optional<std::string>& request_id) {
  std::unique_lock lock(mutex_);
  if (auto prior = replayed(request_id, EventKind::kGoalSet)) return goal_from_json(*prior);
  const auto goal = compute_goal(ledger_.user(user_id), formula);
  const auto event = store_->append(EventKind::kGoalSet,
                                    {{"user_id", std::string(user_id)},
                                     {"goal", goal_to_json(goal)},
                                     {"request_id", request_field(request_id)}},
                                    now());
  apply(event);
  after_append();
  return goal;
}

MealLog DietService::record_meal(MealLog meal, const std::optional<std::string>& request_id) {
  const auto event = store_->append(
      EventKind::kMealLogged, {{"meal", meal_to_json(meal)}, {"request_id", request_field(request_id)}},
      now());
  apply(event);
  after_append();
  return meal;
}

MealLog DietService::post_meal(std::string_view user_id, const DishCounts& counts,
                               std::optional<Instant> timestamp,
                               const std::optional<std::string>& request_id) {
  std::unique_lock lock(mutex_);
  if (auto prior = replayed(request_id, EventKind::kMealLogged)) return meal_from_json(*prior);
  auto meal = ledger_.prepare_meal(user_id, counts, config_.calorie_table, timestamp.value_or(now()));
  return record_meal(std::move(meal), request_id);
}

MealLog DietService::post_meal_detections(std::string_view user_id, std::string_view detection_lines,
                                          std::optional<Instant> timestamp,
                                          const std::optional<std::string>& request_id) {
  const auto set = parse_detection_file("upload", detection_lines, detection_registry_, "upload");
  DishCounts counts;
  for (const auto& [id, n] : detections_to_counts(set, config_.confidence_threshold)) {
    counts[id] = static_cast<std::uint32_t>(n);
  }
  std::unique_lock lock(mutex_);
  if (auto prior = replayed(request_id, EventKind::kMealLogged)) return meal_from_json(*prior);
  auto meal = ledger_.prepare_meal(user_id, counts, config_.calorie_table,
                                   timestamp.value_or(now()), "detections");
  return record_meal(std::move(meal), request_id);
}

UserProfile DietService::get_user(std::string_view user_id) const {
  std::shared_lock lock(mutex_);
  return ledger_.user(user_id);
}

std::optional<CalorieGoal> DietService::get_goal(std::string_view user_id) const {
  std::shared_lock lock(mutex_);
  return ledger_.goal(user_id);
}

TrackerState DietService::get_tracker(std::string_view user_id, std::optional<Instant> at) const {
  const auto instant = at.value_or(now());
  std::shared_lock lock(mutex_);
  return ledger_.tracker_state(user_id, instant);
}

std::vector<HistoryDay> DietService::get_history(std::string_view user_id, CivilDate from,
                                                 CivilDate to) const {
  std::shared_lock lock(mutex_);
  return ledger_.history(user_id, from, to);
}

EvaluationResult DietService::post_evaluation(const EvaluationRequest& request) {
  SlotGuard slot(evaluation_slots_);
  ClassRegistry registry(request.classes);
  std::vector<ImageRecord> images;
  for (const auto& [image_id, text] : request.ground_truth) {
    try {
      images.push_back(parse_yolo_label_file(image_id, text, registry));
    } catch (const Error& e) {
      throw Error(e.code(), "ground truth \"" + image_id + "\": " + e.message(), e.line());
    }
  }
  const Dataset dataset(registry, std::move(images));
  std::map<std::string, DetectionSet> detections;
  for (const auto& [image_id, text] : request.detections) {
    try {
      detections.emplace(image_id, parse_detection_file(image_id, text, registry));
    } catch (const Error& e) {
      throw Error(e.code(), "detections \"" + image_id + "\": " + e.message(), e.line());
    }
  }
  const auto eval_images = pair_with_detections(dataset, detections);
  auto report = evaluate_detections(eval_images, registry.size(), request.iou_threshold,
                                    request.confidence_threshold);
  return {std::move(registry), std::move(report)};
}

}  // namespace dishlog::service
