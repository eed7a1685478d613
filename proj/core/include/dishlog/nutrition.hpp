// Copyright 2026 The dishlog Authors
// SPDX-License-Identifier: Apache-2.0
//
// Diet management: BMR and calorie goals, per-dish calorie table, meal
// estimation and the daily calorie tracker with its colour bands.

#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dishlog/dataset.hpp"
#include "dishlog/detect_io.hpp"

namespace dishlog {

enum class Sex { kMale, kFemale };
enum class ActivityLevel { kSedentary, kLight, kModerate, kActive, kVeryActive };
enum class BmrFormula { kHarris1918, kRoza1984, kMifflin1990 };
enum class NudgeBand { kGreen, kYellow, kOrange, kRed };

std::string_view to_string(Sex sex);
std::string_view to_string(ActivityLevel level);
std::string_view to_string(BmrFormula formula);
std::string_view to_string(NudgeBand band);

// Inverse of to_string; throw kInvalidArgument on unknown names.
Sex parse_sex(std::string_view text);
ActivityLevel parse_activity_level(std::string_view text);
BmrFormula parse_bmr_formula(std::string_view text);

inline constexpr BmrFormula kDefaultBmrFormula = BmrFormula::kMifflin1990;

struct UserProfile {
  std::string user_id;
  double age_years = 30;
  Sex sex = Sex::kMale;
  double height_cm = 170;
  double weight_kg = 70;
  ActivityLevel activity = ActivityLevel::kSedentary;
  std::string timezone = "UTC";  // IANA name

  bool operator==(const UserProfile&) const = default;
};

/// Age in [1, 130], height in (0, 300], weight in (0, 500], loadable time zone.
void validate_profile(const UserProfile& profile);

/// kcal/day. W in kg, H in cm, A in years.
double compute_bmr(const UserProfile& profile, BmrFormula formula);

/// 1.2 / 1.375 / 1.55 / 1.725 / 1.9
double activity_multiplier(ActivityLevel level);

struct CalorieGoal {
  double bmr = 0.0;
  double multiplier = 1.0;
  double goal = 0.0;  // bmr * multiplier
  BmrFormula formula = kDefaultBmrFormula;

  bool operator==(const CalorieGoal&) const = default;
};

CalorieGoal compute_goal(const UserProfile& profile, BmrFormula formula = kDefaultBmrFormula);

struct DishEntry {
  std::string name;
  double kcal = 0.0;  // per detected serving
};

class CalorieTable {
 public:
  void add(ClassId id, std::string name, double kcal);

  /// Throws kMissingDishCalories.
  const DishEntry& at(ClassId id) const;
  std::optional<ClassId> find(std::string_view name) const;
  const std::map<ClassId, DishEntry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  std::map<ClassId, DishEntry> entries_;
};

/// `class_id,name,kcal` rows; an optional header row and `#` comments are skipped.
CalorieTable parse_calorie_table(std::string_view text);

using DishCounts = std::map<ClassId, std::uint32_t>;

double estimate_meal_calories(const DishCounts& counts, const CalorieTable& table);

/// Lower edges of the yellow, orange and red bands as fractions of the goal.
struct BandThresholds {
  double yellow = 0.5;
  double orange = 0.75;
  double red = 1.0;
};

/// green [0, yellow), yellow [yellow, orange), orange [orange, red), red [red, inf).
NudgeBand band_for(double fraction, const BandThresholds& thresholds = {});

using Instant = std::chrono::sys_time<std::chrono::milliseconds>;

/// RFC 3339 with an explicit offset or `Z`; fractional seconds are truncated to ms.
Instant parse_instant(std::string_view text);
/// UTC, millisecond precision, e.g. 2024-03-01T18:30:00.000Z.
std::string format_instant(Instant instant);

struct CivilDate {
  int year = 1970;
  int month = 1;
  int day = 1;

  auto operator<=>(const CivilDate&) const = default;

  /// YYYY-MM-DD
  std::string to_string() const;
  static CivilDate parse(std::string_view text);
  CivilDate next() const;
};

/// Calendar date of `instant` in the named time zone.
CivilDate local_date(Instant instant, std::string_view timezone);

struct MealLog {
  std::string meal_id;
  std::string user_id;
  Instant timestamp{};
  DishCounts counts;
  double kcal = 0.0;
  std::string source;  // "manual" or the detection set it came from

  bool operator==(const MealLog&) const = default;
};

struct TrackerState {
  std::string user_id;
  CivilDate date;
  double consumed = 0.0;
  double goal = 0.0;
  double fraction = 0.0;
  NudgeBand band = NudgeBand::kGreen;
  std::vector<MealLog> meals;
};

struct HistoryDay {
  CivilDate date;
  double consumed = 0.0;
  double goal = 0.0;
  NudgeBand band = NudgeBand::kGreen;
  std::vector<MealLog> meals;
};

/// In-memory users, goals and meal logs. Not synchronized; callers serialize
/// writes.
class DietLedger {
 public:
  explicit DietLedger(BandThresholds thresholds = {});

  void add_user(UserProfile profile);
  bool has_user(std::string_view user_id) const;
  const UserProfile& user(std::string_view user_id) const;
  std::vector<std::string> user_ids() const;

  CalorieGoal set_goal(std::string_view user_id, BmrFormula formula);
  /// Installs a previously computed goal verbatim.
  void restore_goal(std::string_view user_id, const CalorieGoal& goal);
  std::optional<CalorieGoal> goal(std::string_view user_id) const;
  const std::vector<MealLog>& meals(std::string_view user_id) const;

  /// Validates and prices a meal without recording it. Every count must be
  /// >= 1; throws kEmptyMeal when there are none.
  MealLog prepare_meal(std::string_view user_id, const DishCounts& counts,
                       const CalorieTable& table, Instant timestamp,
                       std::string source = "manual") const;
  /// prepare_meal followed by restore_meal.
  MealLog log_meal(std::string_view user_id, const DishCounts& counts, const CalorieTable& table,
                   Instant timestamp, std::string source = "manual");
  MealLog log_detections(std::string_view user_id, const DetectionSet& detections,
                         double confidence_threshold, const CalorieTable& table, Instant timestamp);
  /// Appends a previously logged meal verbatim.
  void restore_meal(MealLog meal);

  /// Meals whose timestamp falls on the local date of `now`. Throws kNoGoal.
  TrackerState tracker_state(std::string_view user_id, Instant now) const;

  /// One entry per local date in [from, to]. Throws kInvalidRange / kNoGoal.
  std::vector<HistoryDay> history(std::string_view user_id, CivilDate from, CivilDate to) const;

  const BandThresholds& thresholds() const noexcept { return thresholds_; }

 private:
  struct UserState {
    UserProfile profile;
    std::optional<CalorieGoal> goal;
    std::vector<MealLog> meals;
  };

  UserState& state(std::string_view user_id);
  const UserState& state(std::string_view user_id) const;

  BandThresholds thresholds_;
  std::map<std::string, UserState, std::less<>> users_;
};

}  // namespace dishlog
