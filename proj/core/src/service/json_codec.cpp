// Copyright 2026 The dishlog Authors
// SPDX-License-Identifier: Apache-2.0

#include "dishlog/service/json_codec.hpp"

#include "../text_util.hpp"
#include "dishlog/error.hpp"
#include "dishlog/report.hpp"

namespace dishlog::service {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::kInvalidArgument, std::string("missing field \"") + key + "\"");
  }
  return j.at(key);
}

double number_field(const Json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number()) throw Error(ErrorCode::kInvalidArgument, std::string("field \"") + key + "\" must be a number");
  return v.get<double>();
}

std::string string_field(const Json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_string()) throw Error(ErrorCode::kInvalidArgument, std::string("field \"") + key + "\" must be a string");
  return v.get<std::string>();
}

}  // namespace

Json profile_to_json(const UserProfile& p) {
  return {{"user_id", p.user_id},
          {"age", p.age_years},
          {"sex", to_string(p.sex)},
          {"height_cm", p.height_cm},
          {"weight_kg", p.weight_kg},
          {"activity", to_string(p.activity)},
          {"timezone", p.timezone}};
}

UserProfile profile_from_json(const Json& j) {
  UserProfile p;
  if (j.is_object() && j.contains("user_id")) p.user_id = string_field(j, "user_id");
  p.age_years = number_field(j, "age");
  p.sex = parse_sex(string_field(j, "sex"));
  p.height_cm = number_field(j, "height_cm");
  p.weight_kg = number_field(j, "weight_kg");
  p.activity = j.contains("activity") ? parse_activity_level(string_field(j, "activity"))
                                      : ActivityLevel::kSedentary;
  p.timezone = j.contains("timezone") ? string_field(j, "timezone") : std::string("UTC");
  return p;
}

Json goal_to_json(const CalorieGoal& g) {
  return {{"bmr", g.bmr}, {"multiplier", g.multiplier}, {"goal", g.goal}, {"formula", to_string(g.formula)}};
}

CalorieGoal goal_from_json(const Json& j) {
  return {number_field(j, "bmr"), number_field(j, "multiplier"), number_field(j, "goal"),
          parse_bmr_formula(string_field(j, "formula"))};
}

Json meal_to_json(const MealLog& m) {
  Json counts = Json::object();
  for (const auto& [id, n] : m.counts) counts[std::to_string(id)] = n;
  return {{"meal_id", m.meal_id},     {"user_id", m.user_id}, {"timestamp", format_instant(m.timestamp)},
          {"counts", counts},         {"kcal", m.kcal},       {"source", m.source}};
}

MealLog meal_from_json(const Json& j) {
  MealLog m;
  m.meal_id = string_field(j, "meal_id");
  m.user_id = string_field(j, "user_id");
  m.timestamp = parse_instant(string_field(j, "timestamp"));
  for (const auto& [key, value] : field(j, "counts").items()) {
    const auto id = detail::parse_uint(key);
    if (!id || !value.is_number_unsigned()) {
      throw Error(ErrorCode::kInvalidArgument, "bad meal count entry \"" + key + "\"");
    }
    m.counts[static_cast<ClassId>(*id)] = value.get<std::uint32_t>();
  }
  m.kcal = number_field(j, "kcal");
  m.source = string_field(j, "source");
  return m;
}

Json tracker_to_json(const TrackerState& s) {
  Json meals = Json::array();
  for (const auto& m : s.meals) meals.push_back(meal_to_json(m));
  return {{"user_id", s.user_id},   {"date", s.date.to_string()}, {"consumed", s.consumed},
          {"goal", s.goal},         {"fraction", s.fraction},     {"band", to_string(s.band)},
          {"meals", meals}};
}

Json history_to_json(const std::vector<HistoryDay>& days) {
  Json out = Json::array();
  for (const auto& d : days) {
    Json meals = Json::array();
    for (const auto& m : d.meals) meals.push_back(meal_to_json(m));
    out.push_back({{"date", d.date.to_string()},
                   {"consumed", d.consumed},
                   {"goal", d.goal},
                   {"fraction", d.consumed / d.goal},
                   {"band", to_string(d.band)},
                   {"meals", meals}});
  }
  return out;
}

Json dishes_to_json(const CalorieTable& table) {
  Json out = Json::array();
  for (const auto& [id, entry] : table.entries()) {
    out.push_back({{"class_id", id}, {"name", entry.name}, {"kcal", entry.kcal}});
  }
  return out;
}

Json report_to_json(const MetricsReport& report, const ClassRegistry& registry) {
  Json classes = Json::array();
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const auto& row = report.per_class[c];
    classes.push_back({{"class_id", c},
                       {"name", registry.name(static_cast<ClassId>(c))},
                       {"precision", row.precision},
                       {"recall", row.recall},
                       {"f1", row.f1},
                       {"ap", row.ap ? Json(*row.ap) : Json(nullptr)},
                       {"ground_truth", row.ground_truth},
                       {"predictions", row.predictions}});
  }
  Json out = {{"task", report.task},
              {"classes", classes},
              {"macro", {{"precision", report.macro.precision},
                         {"recall", report.macro.recall},
                         {"f1", report.macro.f1}}},
              {"map", report.map},
              {"map_percent", format_percent(report.map)},
              {"map_classes", report.map_classes},
              {"excluded_from_map", report.excluded_from_map},
              {"confidence_threshold", report.confidence_threshold},
              {"ap_method", report.ap_method}};
  out["iou_threshold"] = report.iou_threshold ? Json(*report.iou_threshold) : Json(nullptr);
  if (report.confusion) {
    const auto& m = *report.confusion;
    Json rows = Json::array();
    for (std::size_t t = 0; t <= m.num_classes(); ++t) {
      Json row = Json::array();
      for (std::size_t p = 0; p <= m.num_classes(); ++p) row.push_back(m.at(t, p));
      rows.push_back(std::move(row));
    }
    out["confusion_matrix"] = {{"labels_note", "rows true, columns predicted, last index background"},
                               {"cells", rows}};
  }
  return out;
}

DishCounts counts_from_json(const Json& j, const CalorieTable& table) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "\"counts\" must be an object");
  DishCounts counts;
  for (const auto& [key, value] : j.items()) {
    ClassId id;
    if (const auto numeric = detail::parse_uint(key); numeric && *numeric <= UINT32_MAX) {
      id = static_cast<ClassId>(*numeric);
    } else if (const auto named = table.find(key)) {
      id = *named;
    } else {
      throw Error(ErrorCode::kMissingDishCalories, "unknown dish \"" + key + "\"");
    }
    if (!value.is_number_integer() || value.get<std::int64_t>() < 0 ||
        value.get<std::int64_t>() > UINT32_MAX) {
      throw Error(ErrorCode::kInvalidArgument, "count for \"" + key + "\" must be a non-negative integer");
    }
    counts[id] += value.get<std::uint32_t>();
  }
  return counts;
}

}  // namespace dishlog::service
