// Copyright 2026 The dishlog Authors
// SPDX-License-Identifier: Apache-2.0

#include "dishlog/nutrition.hpp"

#include <absl/time/civil_time.h>
#include <absl/time/time.h>

#include <algorithm>
#include <cmath>
#include <tuple>

#include "dishlog/error.hpp"
#include "text_util.hpp"

namespace dishlog {

std::string_view to_string(Sex sex) { return sex == Sex::kMale ? "male" : "female"; }

std::string_view to_string(ActivityLevel level) {
  switch (level) {
    case ActivityLevel::kSedentary: return "sedentary";
    case ActivityLevel::kLight: return "light";
    case ActivityLevel::kModerate: return "moderate";
    case ActivityLevel::kActive: return "active";
    case ActivityLevel::kVeryActive: return "very_active";
  }
  return "sedentary";
}

std::string_view to_string(BmrFormula formula) {
  switch (formula) {
    case BmrFormula::kHarris1918: return "harris1918";
    case BmrFormula::kRoza1984: return "roza1984";
    case BmrFormula::kMifflin1990: return "mifflin1990";
  }
  return "mifflin1990";
}

std::string_view to_string(NudgeBand band) {
  switch (band) {
    case NudgeBand::kGreen: return "green";
    case NudgeBand::kYellow: return "yellow";
    case NudgeBand::kOrange: return "orange";
    case NudgeBand::kRed: return "red";
  }
  return "green";
}

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view text, const Enum (&values)[N], const char* what) {
  for (const auto v : values) {
    if (to_string(v) == text) return v;
  }
  throw Error(ErrorCode::kInvalidArgument, std::string("unknown ") + what + " \"" +
                                               std::string(text) + "\"");
}

absl::TimeZone load_zone(std::string_view name) {
  absl::TimeZone tz;
  if (!absl::LoadTimeZone(std::string(name), &tz)) {
    throw Error(ErrorCode::kInvalidProfile, "unknown time zone \"" + std::string(name) + "\"");
  }
  return tz;
}

}  // namespace

Sex parse_sex(std::string_view text) {
  static constexpr Sex kValues[] = {Sex::kMale, Sex::kFemale};
  return parse_enum(text, kValues, "sex");
}

ActivityLevel parse_activity_level(std::string_view text) {
  static constexpr ActivityLevel kValues[] = {ActivityLevel::kSedentary, ActivityLevel::kLight,
                                              ActivityLevel::kModerate, ActivityLevel::kActive,
                                              ActivityLevel::kVeryActive};
  return parse_enum(text, kValues, "activity level");
}

BmrFormula parse_bmr_formula(std::string_view text) {
  static constexpr BmrFormula kValues[] = {BmrFormula::kHarris1918, BmrFormula::kRoza1984,
                                           BmrFormula::kMifflin1990};
  return parse_enum(text, kValues, "BMR formula");
}

void validate_profile(const UserProfile& p) {
  if (!(p.age_years >= 1 && p.age_years <= 130)) {
    throw Error(ErrorCode::kInvalidProfile, "age must lie in [1, 130] years");
  }
  if (!(p.height_cm > 0 && p.height_cm <= 300)) {
    throw Error(ErrorCode::kInvalidProfile, "height must lie in (0, 300] cm");
  }
  if (!(p.weight_kg > 0 && p.weight_kg <= 500)) {
    throw Error(ErrorCode::kInvalidProfile, "weight must lie in (0, 500] kg");
  }
  load_zone(p.timezone);
}

double compute_bmr(const UserProfile& p, BmrFormula formula) {
  validate_profile(p);
  const double w = p.weight_kg;
  const double h = p.height_cm;
  const double a = p.age_years;
  const bool male = p.sex == Sex::kMale;
  switch (formula) {
    case BmrFormula::kHarris1918:
      return male ? 66.4730 + 13.7516 * w + 5.0033 * h - 6.7550 * a
                  : 655.0955 + 9.5634 * w + 1.8496 * h - 4.6756 * a;
    case BmrFormula::kRoza1984:
      return male ? 88.362 + 13.397 * w + 4.799 * h - 5.677 * a
                  : 447.593 + 9.247 * w + 3.098 * h - 4.330 * a;
    case BmrFormula::kMifflin1990:
      return 10.0 * w + 6.25 * h - 5.0 * a + (male ? 5.0 : -161.0);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown BMR formula");
}

double activity_multiplier(ActivityLevel level) {
  switch (level) {
    case ActivityLevel::kSedentary: return 1.2;
    case ActivityLevel::kLight: return 1.375;
    case ActivityLevel::kModerate: return 1.55;
    case ActivityLevel::kActive: return 1.725;
    case ActivityLevel::kVeryActive: return 1.9;
  }
  return 1.2;
}

CalorieGoal compute_goal(const UserProfile& profile, BmrFormula formula) {
  CalorieGoal g;
  g.bmr = compute_bmr(profile, formula);
  g.multiplier = activity_multiplier(profile.activity);
  g.goal = g.bmr * g.multiplier;
  g.formula = formula;
  if (!(g.bmr > 0)) {
    throw Error(ErrorCode::kInvalidProfile, "profile yields a non-positive BMR");
  }
  return g;
}

void CalorieTable::add(ClassId id, std::string name, double kcal) {
  if (!(kcal > 0) || !std::isfinite(kcal)) {
    throw Error(ErrorCode::kInvalidArgument, "kcal for class " + std::to_string(id) + " must be > 0");
  }
  if (!entries_.emplace(id, DishEntry{std::move(name), kcal}).second) {
    throw Error(ErrorCode::kInvalidArgument, "class " + std::to_string(id) + " listed twice");
  }
}

const DishEntry& CalorieTable::at(ClassId id) const {
  const auto it = entries_.find(id);
  if (it == entries_.end()) {
    throw Error(ErrorCode::kMissingDishCalories, "no calories for class " + std::to_string(id));
  }
  return it->second;
}

std::optional<ClassId> CalorieTable::find(std::string_view name) const {
  for (const auto& [id, entry] : entries_) {
    if (entry.name == name) return id;
  }
  return std::nullopt;
}

CalorieTable parse_calorie_table(std::string_view text) {
  CalorieTable table;
  const auto lines = detail::split_lines(text);
  bool first = true;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = detail::trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const bool header = first && line.rfind("class_id", 0) == 0;
    first = false;
    if (header) continue;
    const auto fields = detail::split_char(line, ',');
    if (fields.size() != 3) {
      throw Error(ErrorCode::kFormat, "expected `class_id,name,kcal`", i + 1);
    }
    const auto id = detail::parse_uint(detail::trim(fields[0]));
    const auto kcal = detail::parse_double(detail::trim(fields[2]));
    if (!id || *id > UINT32_MAX) throw Error(ErrorCode::kFormat, "bad class id", i + 1);
    if (!kcal) throw Error(ErrorCode::kFormat, "bad kcal value", i + 1);
    try {
      table.add(static_cast<ClassId>(*id), std::string(detail::trim(fields[1])), *kcal);
    } catch (const Error& e) {
      throw Error(e.code(), e.message(), i + 1);
    }
  }
  return table;
}

double estimate_meal_calories(const DishCounts& counts, const CalorieTable& table) {
  double total = 0.0;
  for (const auto& [id, count] : counts) total += static_cast<double>(count) * table.at(id).kcal;
  return total;
}

NudgeBand band_for(double fraction, const BandThresholds& t) {
  if (fraction >= t.red) return NudgeBand::kRed;
  if (fraction >= t.orange) return NudgeBand::kOrange;
  if (fraction >= t.yellow) return NudgeBand::kYellow;
  return NudgeBand::kGreen;
}

Instant parse_instant(std::string_view text) {
  absl::Time t;
  std::string err;
  if (!absl::ParseTime(absl::RFC3339_full, std::string(text), &t, &err)) {
    throw Error(ErrorCode::kInvalidArgument, "bad RFC 3339 instant \"" + std::string(text) + "\"");
  }
  const auto ms = absl::ToInt64Milliseconds(absl::Floor(t - absl::UnixEpoch(), absl::Milliseconds(1)));
  return Instant(std::chrono::milliseconds(ms));
}

std::string format_instant(Instant instant) {
  const auto t = absl::FromUnixMillis(instant.time_since_epoch().count());
  return absl::FormatTime("%Y-%m-%d%ET%H:%M:%E3SZ", t, absl::UTCTimeZone());
}

std::string CivilDate::to_string() const {
  return absl::FormatCivilTime(absl::CivilDay(year, month, day));
}

CivilDate CivilDate::parse(std::string_view text) {
  absl::CivilDay day;
  const auto trimmed = detail::trim(text);
  if (trimmed.size() != 10 || !absl::ParseCivilTime(std::string(trimmed), &day)) {
    throw Error(ErrorCode::kInvalidArgument, "bad date \"" + std::string(text) + "\", want YYYY-MM-DD");
  }
  return {static_cast<int>(day.year()), day.month(), day.day()};
}

CivilDate CivilDate::next() const {
  const auto d = absl::CivilDay(year, month, day) + 1;
  return {static_cast<int>(d.year()), d.month(), d.day()};
}

CivilDate local_date(Instant instant, std::string_view timezone) {
  const auto tz = load_zone(timezone);
  const auto day = absl::ToCivilDay(absl::FromUnixMillis(instant.time_since_epoch().count()), tz);
  return {static_cast<int>(day.year()), day.month(), day.day()};
}

DietLedger::DietLedger(BandThresholds thresholds) : thresholds_(thresholds) {
  if (!(thresholds_.yellow > 0 && thresholds_.yellow <= thresholds_.orange &&
        thresholds_.orange <= thresholds_.red)) {
    throw Error(ErrorCode::kInvalidArgument, "band thresholds must satisfy 0 < yellow <= orange <= red");
  }
}

void DietLedger::add_user(UserProfile profile) {
  if (profile.user_id.empty()) throw Error(ErrorCode::kInvalidProfile, "user id is empty");
  validate_profile(profile);
  const auto id = profile.user_id;
  if (!users_.emplace(id, UserState{std::move(profile), std::nullopt, {}}).second) {
    throw Error(ErrorCode::kInvalidArgument, "user \"" + id + "\" already exists");
  }
}

bool DietLedger::has_user(std::string_view user_id) const { return users_.find(user_id) != users_.end(); }

const UserProfile& DietLedger::user(std::string_view user_id) const { return state(user_id).profile; }

std::vector<std::string> DietLedger::user_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, s] : users_) ids.push_back(id);
  return ids;
}

DietLedger::UserState& DietLedger::state(std::string_view user_id) {
  const auto it = users_.find(user_id);
  if (it == users_.end()) throw Error(ErrorCode::kUnknownUser, "unknown user \"" + std::string(user_id) + "\"");
  return it->second;
}

const DietLedger::UserState& DietLedger::state(std::string_view user_id) const {
  return const_cast<DietLedger*>(this)->state(user_id);
}

CalorieGoal DietLedger::set_goal(std::string_view user_id, BmrFormula formula) {
  auto& s = state(user_id);
  s.goal = compute_goal(s.profile, formula);
  return *s.goal;
}

void DietLedger::restore_goal(std::string_view user_id, const CalorieGoal& goal) {
  state(user_id).goal = goal;
}

std::optional<CalorieGoal> DietLedger::goal(std::string_view user_id) const { return state(user_id).goal; }

const std::vector<MealLog>& DietLedger::meals(std::string_view user_id) const {
  return state(user_id).meals;
}

MealLog DietLedger::prepare_meal(std::string_view user_id, const DishCounts& counts,
                                 const CalorieTable& table, Instant timestamp,
                                 std::string source) const {
  const auto& s = state(user_id);
  if (counts.empty()) throw Error(ErrorCode::kEmptyMeal, "meal has no dishes");
  for (const auto& [id, count] : counts) {
    if (count == 0) throw Error(ErrorCode::kEmptyMeal, "dish " + std::to_string(id) + " has count 0");
  }
  MealLog meal;
  meal.meal_id = s.profile.user_id + "-" + std::to_string(s.meals.size() + 1);
  meal.user_id = s.profile.user_id;
  meal.timestamp = timestamp;
  meal.counts = counts;
  meal.kcal = estimate_meal_calories(counts, table);
  meal.source = std::move(source);
  return meal;
}

MealLog DietLedger::log_meal(std::string_view user_id, const DishCounts& counts,
                             const CalorieTable& table, Instant timestamp, std::string source) {
  auto meal = prepare_meal(user_id, counts, table, timestamp, std::move(source));
  restore_meal(meal);
  return meal;
}

MealLog DietLedger::log_detections(std::string_view user_id, const DetectionSet& detections,
                                   double confidence_threshold, const CalorieTable& table,
                                   Instant timestamp) {
  DishCounts counts;
  for (const auto& [id, n] : detections_to_counts(detections, confidence_threshold)) {
    counts[id] = static_cast<std::uint32_t>(n);
  }
  return log_meal(user_id, counts, table, timestamp,
                  "detections:" + (detections.source.empty() ? detections.image_id : detections.source));
}

void DietLedger::restore_meal(MealLog meal) {
  auto& s = state(meal.user_id);
  s.meals.push_back(std::move(meal));
}

TrackerState DietLedger::tracker_state(std::string_view user_id, Instant now) const {
  const auto& s = state(user_id);
  const auto today = local_date(now, s.profile.timezone);
  const auto days = history(user_id, today, today);
  const auto& day = days.front();
  TrackerState st;
  st.user_id = s.profile.user_id;
  st.date = day.date;
  st.consumed = day.consumed;
  st.goal = day.goal;
  st.fraction = st.consumed / st.goal;
  st.band = day.band;
  st.meals = day.meals;
  return st;
}

std::vector<HistoryDay> DietLedger::history(std::string_view user_id, CivilDate from, CivilDate to) const {
  const auto& s = state(user_id);
  if (to < from) throw Error(ErrorCode::kInvalidRange, "end date precedes start date");
  const auto span_days = absl::CivilDay(to.year, to.month, to.day) - absl::CivilDay(from.year, from.month, from.day);
  if (span_days > 3660) throw Error(ErrorCode::kInvalidRange, "range longer than 3660 days");
  if (!s.goal) throw Error(ErrorCode::kNoGoal, "user \"" + s.profile.user_id + "\" has no goal");

  std::vector<HistoryDay> days;
  for (auto d = from; d <= to; d = d.next()) days.push_back({d, 0.0, s.goal->goal, NudgeBand::kGreen, {}});
  const auto tz = load_zone(s.profile.timezone);
  const absl::CivilDay first(from.year, from.month, from.day);
  for (const auto& meal : s.meals) {
    const auto day = absl::ToCivilDay(absl::FromUnixMillis(meal.timestamp.time_since_epoch().count()), tz);
    const auto offset = day - first;
    if (offset < 0 || offset > span_days) continue;
    days[static_cast<std::size_t>(offset)].meals.push_back(meal);
  }
  for (auto& day : days) {
    std::stable_sort(day.meals.begin(), day.meals.end(),
                     [](const MealLog& a, const MealLog& b) {
                       return std::tie(a.timestamp, a.kcal) < std::tie(b.timestamp, b.kcal);
                     });
    // Sum in timestamp order so the total does not depend on logging order.
    for (const auto& meal : day.meals) day.consumed += meal.kcal;
    day.band = band_for(day.consumed / day.goal, thresholds_);
  }
  return days;
}

}  // namespace dishlog
