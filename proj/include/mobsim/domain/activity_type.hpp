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
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "mobsim/error.hpp"

namespace mobsim {

// The sixteen activity categories. Underlying values index every per-type
// array in the library, so the order is fixed.
enum class ActivityType : std::uint8_t {
  kTransportation = 0,
  kHome,
  kWork,
  kSchool,
  kChildCare,
  kBuyGoods,
  kServices,
  kEatOut,
  kErrands,
  kRecreation,
  kExercise,
  kVisit,
  kHealthCare,
  kReligious,
  kSomethingElse,
  kDropOff,
};

inline constexpr std::size_t kNumActivityTypes = 16;

inline constexpr std::array<ActivityType, kNumActivityTypes> kAllActivityTypes{
    ActivityType::kTransportation, ActivityType::kHome,
    ActivityType::kWork,           ActivityType::kSchool,
    ActivityType::kChildCare,      ActivityType::kBuyGoods,
    ActivityType::kServices,       ActivityType::kEatOut,
    ActivityType::kErrands,        ActivityType::kRecreation,
    ActivityType::kExercise,       ActivityType::kVisit,
    ActivityType::kHealthCare,     ActivityType::kReligious,
    ActivityType::kSomethingElse,  ActivityType::kDropOff,
};

inline constexpr std::array<std::string_view, kNumActivityTypes>
    kActivityTypeNames{
        "Transportation", "Home",     "Work",       "School",
        "ChildCare",      "BuyGoods", "Services",   "EatOut",
        "Errands",        "Recreation", "Exercise", "Visit",
        "HealthCare",     "Religious", "SomethingElse", "DropOff",
    };

constexpr std::size_t index_of(ActivityType t) {
  return static_cast<std::size_t>(t);
}

constexpr ActivityType activity_from_index(std::size_t i) {
  return static_cast<ActivityType>(i);
}

constexpr std::string_view to_string(ActivityType t) {
  return kActivityTypeNames[index_of(t)];
}

inline std::optional<ActivityType> try_parse_activity(std::string_view name) {
  for (std::size_t i = 0; i < kNumActivityTypes; ++i) {
    if (kActivityTypeNames[i] == name) return activity_from_index(i);
  }
  return std::nullopt;
}

inline ActivityType parse_activity(std::string_view name) {
  if (auto t = try_parse_activity(name)) return *t;
  throw SchemaError("unknown activity type '" + std::string(name) + "'");
}

// Compact set of activity types.
class ActivitySet {
 public:
  constexpr ActivitySet() = default;
  constexpr ActivitySet(std::initializer_list<ActivityType> types) {
    for (auto t : types) insert(t);
  }

  constexpr void insert(ActivityType t) { bits_ |= bit(t); }
  constexpr void erase(ActivityType t) { bits_ &= ~bit(t); }
  constexpr bool contains(ActivityType t) const { return (bits_ & bit(t)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint16_t bits() const { return bits_; }

  std::size_t size() const {
    std::size_t n = 0;
    for (auto t : kAllActivityTypes) n += contains(t) ? 1 : 0;
    return n;
  }

  friend constexpr bool operator==(ActivitySet, ActivitySet) = default;

  // "Home|Visit|DropOff", in canonical enum order.
  std::string to_string() const {
    std::string out;
    for (auto t : kAllActivityTypes) {
      if (!contains(t)) continue;
      if (!out.empty()) out += '|';
      out += mobsim::to_string(t);
    }
    return out;
  }

  static ActivitySet parse(std::string_view text) {
    ActivitySet set;
    while (!text.empty()) {
      auto bar = text.find('|');
      set.insert(parse_activity(text.substr(0, bar)));
      if (bar == std::string_view::npos) break;
      text.remove_prefix(bar + 1);
    }
    return set;
  }

 private:
  static constexpr std::uint16_t bit(ActivityType t) {
    return static_cast<std::uint16_t>(1u << index_of(t));
  }
  std::uint16_t bits_ = 0;
};

}  // namespace mobsim
