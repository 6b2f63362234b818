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

#include <chrono>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "mobsim/error.hpp"

namespace mobsim {

inline constexpr std::int64_t kSecondsPerMinute = 60;
inline constexpr std::int64_t kSecondsPerDay = 86400;
inline constexpr std::int64_t kSecondsPerWeek = 7 * kSecondsPerDay;
inline constexpr std::int16_t kDefaultOffsetMinutes = -480;  // UTC-08:00

// An instant in epoch seconds with the fixed UTC offset it is displayed in.
// Ordering looks at the instant only; equality also compares the offset so
// that serialization round-trips are checked exactly.
struct Timestamp {
  std::int64_t epoch_s = 0;
  std::int16_t offset_min = kDefaultOffsetMinutes;

  constexpr Timestamp() = default;
  constexpr explicit Timestamp(std::int64_t s,
                               std::int16_t off = kDefaultOffsetMinutes)
      : epoch_s(s), offset_min(off) {}

  constexpr Timestamp plus_seconds(std::int64_t s) const {
    return Timestamp(epoch_s + s, offset_min);
  }

  // Seconds since local midnight of the same local day.
  constexpr std::int64_t local_seconds() const {
    return epoch_s + offset_min * kSecondsPerMinute;
  }

  friend constexpr bool operator==(const Timestamp&, const Timestamp&) = default;
  friend constexpr std::strong_ordering operator<=>(const Timestamp& a,
                                                    const Timestamp& b) {
    return a.epoch_s <=> b.epoch_s;
  }
};

constexpr std::int64_t seconds_between(Timestamp from, Timestamp to) {
  return to.epoch_s - from.epoch_s;
}

// Local wall-clock time at the given civil date in the given offset.
inline Timestamp make_timestamp(int year, unsigned month, unsigned day,
                                int hour = 0, int minute = 0, int second = 0,
                                std::int16_t offset_min = kDefaultOffsetMinutes) {
  using namespace std::chrono;
  const sys_days date{year_month_day{std::chrono::year{year},
                                     std::chrono::month{month},
                                     std::chrono::day{day}}};
  const std::int64_t local = date.time_since_epoch().count() * kSecondsPerDay +
                             hour * 3600 + minute * 60 + second;
  return Timestamp(local - offset_min * kSecondsPerMinute, offset_min);
}

// ISO-8601 with explicit offset: 2024-01-01T08:29:09-08:00.
inline std::string format_iso(Timestamp t) {
  using namespace std::chrono;
  const std::int64_t local = t.local_seconds();
  std::int64_t days = local / kSecondsPerDay;
  std::int64_t sod = local % kSecondsPerDay;
  if (sod < 0) {
    sod += kSecondsPerDay;
    --days;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  const int off = t.offset_min;
  const int off_abs = off < 0 ? -off : off;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d%c%02d:%02d",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<int>(sod / 3600), static_cast<int>(sod / 60 % 60),
                static_cast<int>(sod % 60), off < 0 ? '-' : '+', off_abs / 60,
                off_abs % 60);
  return buf;
}

inline Timestamp parse_iso(std::string_view text) {
  // Fixed layout, 25 characters.
  auto bad = [&]() {
    return SchemaError("malformed datetime '" + std::string(text) + "'");
  };
  if (text.size() != 25) throw bad();
  auto num = [&](std::size_t pos, std::size_t len) {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      const char c = text[i];
      if (c < '0' || c > '9') throw bad();
      v = v * 10 + (c - '0');
    }
    return v;
  };
  if (text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
      text[16] != ':' || text[22] != ':' ||
      (text[19] != '+' && text[19] != '-')) {
    throw bad();
  }
  const int year = num(0, 4);
  const int month = num(5, 2);
  const int day = num(8, 2);
  const int hour = num(11, 2);
  const int minute = num(14, 2);
  const int second = num(17, 2);
  const int off_h = num(20, 2);
  const int off_m = num(23, 2);
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 ||
      minute > 59 || second > 59 || off_m > 59) {
    throw bad();
  }
  const std::chrono::year_month_day ymd{std::chrono::year{year},
                                        std::chrono::month{unsigned(month)},
                                        std::chrono::day{unsigned(day)}};
  if (!ymd.ok()) throw bad();
  const int sign = text[19] == '-' ? -1 : 1;
  const auto off = static_cast<std::int16_t>(sign * (off_h * 60 + off_m));
  return make_timestamp(year, month, day, hour, minute, second, off);
}

// The 8-week simulation window: 4 weeks of train immediately followed by 4
// weeks of test. Boundaries are half-open; `last_instant()` is the final
// representable second (23:59:59 on the last day).
class SimClock {
 public:
  SimClock() : SimClock(make_timestamp(2024, 1, 1)) {}

  explicit SimClock(Timestamp train_start)
      : train_start_(train_start),
        train_end_(train_start.plus_seconds(4 * kSecondsPerWeek)),
        test_end_(train_start.plus_seconds(8 * kSecondsPerWeek)) {}

  Timestamp train_start() const { return train_start_; }
  Timestamp train_end() const { return train_end_; }
  Timestamp test_start() const { return train_end_; }
  Timestamp test_end() const { return test_end_; }
  Timestamp last_instant() const { return test_end_.plus_seconds(-1); }

  static constexpr int kNumDays = 56;
  static constexpr int kTrainDays = 28;

  // Local midnight that opens simulation day `day` (1-based).
  Timestamp day_start(int day) const {
    return train_start_.plus_seconds((day - 1) * kSecondsPerDay);
  }

  // 1-based simulation day containing t; may fall outside [1, 56].
  int day_of(Timestamp t) const {
    const std::int64_t d = seconds_between(train_start_, t);
    return static_cast<int>((d >= 0 ? d : d - kSecondsPerDay + 1) /
                            kSecondsPerDay) +
           1;
  }

  // 0 = Monday .. 6 = Sunday, for simulation day `day`.
  int weekday(int day) const {
    using namespace std::chrono;
    const std::int64_t local_days =
        day_start(day).local_seconds() / kSecondsPerDay;
    const std::chrono::weekday wd{sys_days{std::chrono::days{local_days}}};
    return static_cast<int>((wd.c_encoding() + 6) % 7);
  }

  bool is_weekend(int day) const { return weekday(day) >= 5; }

 private:
  Timestamp train_start_;
  Timestamp train_end_;
  Timestamp test_end_;
};

}  // namespace mobsim
