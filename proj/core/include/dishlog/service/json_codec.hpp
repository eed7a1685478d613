// Copyright 2026 The dishlog Authors
// SPDX-License-Identifier: Apache-2.0
//
// JSON shapes of the HTTP API and of the event log. Decoders throw
// dishlog::Error(kInvalidArgument) on missing or mistyped fields.

#pragma once

#include <json.hpp>

#include <vector>

#include "dishlog/dataset.hpp"
#include "dishlog/metrics.hpp"
#include "dishlog/nutrition.hpp"

namespace dishlog::service {

using Json = nlohmann::json;

Json profile_to_json(const UserProfile& profile);
/// `user_id` may be absent (the service assigns one).
UserProfile profile_from_json(const Json& j);

Json goal_to_json(const CalorieGoal& goal);
CalorieGoal goal_from_json(const Json& j);

Json meal_to_json(const MealLog& meal);
MealLog meal_from_json(const Json& j);

Json tracker_to_json(const TrackerState& state);
Json history_to_json(const std::vector<HistoryDay>& days);
Json dishes_to_json(const CalorieTable& table);

/// Per-class rows carry names from `registry`; percentages are included as
/// two-decimal strings next to the raw fractions.
Json report_to_json(const MetricsReport& report, const ClassRegistry& registry);

/// `counts` object keyed by class id or dish name.
DishCounts counts_from_json(const Json& j, const CalorieTable& table);

}  // namespace dishlog::service
