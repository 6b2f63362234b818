/*
 * Copyright 2026 The mobsim Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "mobsim/domain/activity_type.hpp"
#include "mobsim/error.hpp"

namespace mobsim::activity {

enum class DayClass : int { kWeekday = 0, kWeekend = 1 };
inline constexpr int kNumDayClasses = 2;
inline constexpr int kSlots = 48;  // half-hour slots
inline constexpr int kMinDurationMin = 5;

constexpr int slot_of(int minute) {
  return minute < 0 ? 0 : (minute / 30 >= kSlots ? kSlots - 1 : minute / 30);
}

struct DurationParams {
  double median_min = 60.0;
  double sigma = 0.5;
  friend bool operator==(const DurationParams&, const DurationParams&) = default;
};

// Time the first Home block of a day ends, in minutes after midnight.
struct DepartureAnchor {
  double mean_min = 450.0;
  double sd_min = 60.0;
  double earliest_min = 300.0;
  double latest_min = 720.0;
  friend bool operator==(const DepartureAnchor&, const DepartureAnchor&) = default;
};

using TransitionRow = std::array<double, kNumActivityTypes>;

// Time-inhomogeneous Markov model over activity types.
//
// row(day_class, slot, from) is the distribution of the next activity when
// `from` ends inside `slot`. The Home -> Home entry has a special meaning:
// the agent stays home for the rest of the day. Non-Home self transitions
// produce a second consecutive entry of the same type.
class ActivityModel {
 public:
  ActivityModel() {
    for (auto& r : rows_) r.fill(0.0);
    for (auto& d : durations_) d = {60.0, 0.5};
  }

  TransitionRow& row(DayClass dc, int slot, ActivityType from) {
    return rows_[flat(dc, slot, from)];
  }
  const TransitionRow& row(DayClass dc, int slot, ActivityType from) const {
    return rows_[flat(dc, slot, from)];
  }

  DurationParams& duration(ActivityType t) { return durations_[index_of(t)]; }
  const DurationParams& duration(ActivityType t) const {
    return durations_[index_of(t)];
  }

  DepartureAnchor& first_departure(DayClass dc) {
    return anchors_[static_cast<int>(dc)];
  }
  const DepartureAnchor& first_departure(DayClass dc) const {
    return anchors_[static_cast<int>(dc)];
  }

  DurationParams& travel_gap() { return gap_; }
  const DurationParams& travel_gap() const { return gap_; }

  int max_entries_per_day() const { return max_entries_; }
  void set_max_entries_per_day(int n) { max_entries_ = n; }

  // Throws ConfigError unless every row sums to 1 within 1e-9 with
  // non-negative entries and all duration parameters are usable.
  void validate() const {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      double s = 0.0;
      for (double p : rows_[i]) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
          throw ConfigError("transition row " + std::to_string(i) +
                            " has an invalid probability");
        }
        s += p;
      }
      if (std::abs(s - 1.0) > 1e-9) {
        throw ConfigError("transition row " + std::to_string(i) + " sums to " +
                          std::to_string(s));
      }
    }
    for (const auto& d : durations_) {
      if (!(d.median_min > 0.0) || !(d.sigma >= 0.0)) {
        throw ConfigError("duration parameters must be positive");
      }
    }
    if (!(gap_.median_min > 0.0) || !(gap_.sigma >= 0.0)) {
      throw ConfigError("travel gap parameters must be positive");
    }
    if (max_entries_ < 3) throw ConfigError("max entries per day must be >= 3");
  }

  // Copy with `type` removed from every row and the remaining mass
  // renormalised. A row left empty sends the agent (back) home.
  ActivityModel without(ActivityType type) const {
    ActivityModel m = *this;
    for (auto& r : m.rows_) {
      r[index_of(type)] = 0.0;
      double s = 0.0;
      for (double p : r) s += p;
      if (s > 0.0) {
        for (double& p : r) p /= s;
      } else {
        r[index_of(ActivityType::kHome)] = 1.0;
      }
    }
    return m;
  }

  // Specialisation for an agent: non-workers never Work, non-students never
  // go to School.
  ActivityModel for_profile(bool worker, bool student) const {
    ActivityModel m = *this;
    if (!worker) m = m.without(ActivityType::kWork);
    if (!student) m = m.without(ActivityType::kSchool);
    return m;
  }

  std::size_t num_rows() const { return rows_.size(); }
  const TransitionRow& row_at(std::size_t i) const { return rows_[i]; }

  friend bool operator==(const ActivityModel&, const ActivityModel&) = default;

  static ActivityModel home_only();
  static ActivityModel uniform();
  static ActivityModel default_model();

 private:
  static std::size_t flat(DayClass dc, int slot, ActivityType from) {
    return (static_cast<std::size_t>(dc) * kSlots + static_cast<std::size_t>(slot)) *
               kNumActivityTypes +
           index_of(from);
  }

  std::array<TransitionRow, kNumDayClasses * kSlots * kNumActivityTypes> rows_{};
  std::array<DurationParams, kNumActivityTypes> durations_{};
  std::array<DepartureAnchor, kNumDayClasses> anchors_{
      DepartureAnchor{450.0, 60.0, 300.0, 720.0},
      DepartureAnchor{570.0, 90.0, 360.0, 840.0}};
  DurationParams gap_{20.0, 0.4};
  int max_entries_ = 24;
};

// Every row sends the agent home; days are one Home block.
inline ActivityModel ActivityModel::home_only() {
  ActivityModel m;
  for (auto& r : m.rows_) r[index_of(ActivityType::kHome)] = 1.0;
  return m;
}

// Uniform next-activity distribution everywhere.
inline ActivityModel ActivityModel::uniform() {
  ActivityModel m;
  for (auto& r : m.rows_) r.fill(1.0 / kNumActivityTypes);
  return m;
}

namespace detail {

inline double bump(double h, double centre, double width) {
  const double z = (h - centre) / width;
  return std::exp(-0.5 * z * z);
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Hand-authored time-of-day propensities per destination type.
inline TransitionRow propensities(DayClass dc, double h) {
  using A = ActivityType;
  TransitionRow p{};
  auto set = [&](A t, double v) { p[index_of(t)] = v; };
  if (dc == DayClass::kWeekday) {
    set(A::kWork, 3.0 * bump(h, 7.8, 1.2) + 0.3 * bump(h, 13.0, 1.0));
    set(A::kSchool, 2.0 * bump(h, 7.6, 0.7));
    set(A::kChildCare, 0.25 * bump(h, 7.5, 1.0) + 0.15 * bump(h, 16.5, 1.0));
    set(A::kDropOff, 0.3 * bump(h, 7.8, 0.8) + 0.25 * bump(h, 15.5, 1.2));
    set(A::kBuyGoods, 0.35 * bump(h, 15.0, 3.5));
    set(A::kServices, 0.15 * bump(h, 12.0, 3.0));
    set(A::kEatOut, 0.45 * bump(h, 12.3, 1.0) + 0.35 * bump(h, 18.8, 1.3));
    set(A::kErrands, 0.15 * bump(h, 13.0, 3.5));
    set(A::kRecreation, 0.25 * bump(h, 18.5, 2.5));
    set(A::kExercise, 0.2 * bump(h, 6.8, 1.0) + 0.25 * bump(h, 18.0, 1.5));
    set(A::kVisit, 0.2 * bump(h, 18.5, 2.0));
    set(A::kHealthCare, 0.12 * bump(h, 11.0, 2.5));
    set(A::kReligious, 0.03 * bump(h, 18.0, 2.0));
    set(A::kTransportation, 0.08 * bump(h, 12.0, 5.0));
    set(A::kSomethingElse, 0.08 * bump(h, 13.0, 4.0));
  } else {
    set(A::kWork, 0.5 * bump(h, 9.0, 1.5));
    set(A::kSchool, 0.02 * bump(h, 9.0, 2.0));
    set(A::kChildCare, 0.02 * bump(h, 10.0, 3.0));
    set(A::kDropOff, 0.1 * bump(h, 13.0, 4.0));
    set(A::kBuyGoods, 0.6 * bump(h, 13.0, 3.5));
    set(A::kServices, 0.08 * bump(h, 12.0, 3.0));
    set(A::kEatOut, 0.4 * bump(h, 12.5, 1.2) + 0.45 * bump(h, 19.0, 1.5));
    set(A::kErrands, 0.15 * bump(h, 13.0, 3.0));
    set(A::kRecreation, 0.5 * bump(h, 14.0, 3.5));
    set(A::kExercise, 0.3 * bump(h, 9.0, 1.5) + 0.1 * bump(h, 17.0, 2.0));
    set(A::kVisit, 0.35 * bump(h, 15.0, 3.0));
    set(A::kHealthCare, 0.03 * bump(h, 11.0, 2.0));
    set(A::kReligious, 0.25 * bump(h, 10.0, 1.0));
    set(A::kTransportation, 0.06 * bump(h, 13.0, 5.0));
    set(A::kSomethingElse, 0.1 * bump(h, 13.0, 4.0));
  }
  return p;
}

}  // namespace detail

// Commuter-like weekdays, leisure-heavy weekends.
inline ActivityModel ActivityModel::default_model() {
  using A = ActivityType;
  ActivityModel m;
  for (int c = 0; c < kNumDayClasses; ++c) {
    const auto dc = static_cast<DayClass>(c);
    const bool weekday = dc == DayClass::kWeekday;
    for (int s = 0; s < kSlots; ++s) {
      const double h = (s + 0.5) / 2.0;
      const TransitionRow base = detail::propensities(dc, h);
      for (auto from : kAllActivityTypes) {
        TransitionRow r = base;
        if (from == A::kHome) {
          // Staying in for the rest of the day grows through the evening.
          r[index_of(A::kHome)] =
              weekday ? 0.6 + 6.0 * detail::sigmoid(h - 19.0)
                      : 0.5 + 6.0 * detail::sigmoid(h - 19.5);
        } else {
          r[index_of(A::kHome)] =
              weekday ? 0.5 + 3.0 * detail::sigmoid((h - 16.0) / 1.5)
                      : 0.4 + 3.0 * detail::sigmoid((h - 17.0) / 1.5);
          r[index_of(from)] = 0.0;
          if (from == A::kWork) {
            r[index_of(A::kEatOut)] *= 1.0 + 2.0 * detail::bump(h, 12.5, 1.2);
          } else if (weekday) {
            // Back to work after a lunch or errand break.
            r[index_of(A::kWork)] += 2.5 * detail::bump(h, 13.0, 1.2);
          }
        }
        double sum = 0.0;
        for (double p : r) sum += p;
        for (double& p : r) p /= sum;
        m.row(dc, s, from) = r;
      }
    }
  }
  m.duration(A::kHome) = {120.0, 0.8};
  m.duration(A::kWork) = {270.0, 0.35};
  m.duration(A::kSchool) = {390.0, 0.15};
  m.duration(A::kChildCare) = {15.0, 0.5};
  m.duration(A::kBuyGoods) = {30.0, 0.6};
  m.duration(A::kServices) = {40.0, 0.5};
  m.duration(A::kEatOut) = {45.0, 0.4};
  m.duration(A::kErrands) = {20.0, 0.5};
  m.duration(A::kRecreation) = {110.0, 0.5};
  m.duration(A::kExercise) = {60.0, 0.35};
  m.duration(A::kVisit) = {100.0, 0.6};
  m.duration(A::kHealthCare) = {60.0, 0.5};
  m.duration(A::kReligious) = {80.0, 0.3};
  m.duration(A::kSomethingElse) = {45.0, 0.7};
  m.duration(A::kDropOff) = {8.0, 0.4};
  m.duration(A::kTransportation) = {25.0, 0.6};
  return m;
}

}  // namespace mobsim::activity
