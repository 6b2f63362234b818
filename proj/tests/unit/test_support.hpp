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

#include <cstdint>
#include <random>
#include <vector>

#include "mobsim/domain/records.hpp"
#include "mobsim/domain/time.hpp"

namespace mobsim::testing {

// Local 2024-01-<day> hh:mm in the default offset. Days past 31 roll into
// February.
inline Timestamp at(int day, int hour, int minute = 0, int second = 0) {
  return make_timestamp(2024, 1, 1).plus_seconds((day - 1) * kSecondsPerDay + hour * 3600 +
                                                 minute * 60 + second);
}

inline Staypoint stay(AgentId agent, PoiId poi, Timestamp start, Timestamp end,
                      AnomalyType type = AnomalyType::kNone) {
  Staypoint s{agent, poi, start, end};
  set_label(s, type);
  return s;
}

// Seeded generator helpers for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
  }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace mobsim::testing
