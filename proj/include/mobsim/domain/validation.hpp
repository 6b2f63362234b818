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

#include <cstddef>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "mobsim/domain/records.hpp"
#include "mobsim/error.hpp"

namespace mobsim {

enum class ViolationKind {
  kOverlap,
  kReversedInterval,
  kUnknownPoi,
  kUnsorted,
  kMixedAgents,
  kMissingHomeAnchor,
  kBadDay,
};

struct Violation {
  std::size_t index = 0;
  ViolationKind kind = ViolationKind::kOverlap;
  std::string message;
};

inline std::string to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::kOverlap: return "overlap";
    case ViolationKind::kReversedInterval: return "reversed_interval";
    case ViolationKind::kUnknownPoi: return "unknown_poi";
    case ViolationKind::kUnsorted: return "unsorted";
    case ViolationKind::kMixedAgents: return "mixed_agents";
    case ViolationKind::kMissingHomeAnchor: return "missing_home_anchor";
    case ViolationKind::kBadDay: return "bad_day";
  }
  return "unknown";
}

// Checks one agent's staypoint sequence. An empty result means valid.
// `known_pois` is optional; when null POI references are not checked.
inline std::vector<Violation> validate_staypoint_sequence(
    std::span<const Staypoint> seq,
    const std::unordered_set<PoiId>* known_pois = nullptr) {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto& sp = seq[i];
    if (!(sp.start < sp.end)) {
      out.push_back({i, ViolationKind::kReversedInterval,
                     "start " + format_iso(sp.start) + " not before end " +
                         format_iso(sp.end)});
    }
    if (known_pois != nullptr && !known_pois->contains(sp.poi_id)) {
      out.push_back({i, ViolationKind::kUnknownPoi,
                     "poi " + std::to_string(sp.poi_id) + " not in catalog"});
    }
    if (i == 0) continue;
    const auto& prev = seq[i - 1];
    if (prev.agent_id != sp.agent_id) {
      out.push_back({i, ViolationKind::kMixedAgents,
                     "agent " + std::to_string(sp.agent_id) + " follows " +
                         std::to_string(prev.agent_id)});
    }
    if (sp.start < prev.start) {
      out.push_back({i, ViolationKind::kUnsorted, "start earlier than previous"});
    } else if (sp.start < prev.end) {
      out.push_back({i, ViolationKind::kOverlap,
                     "starts " + format_iso(sp.start) + " before previous end " +
                         format_iso(prev.end)});
    }
  }
  return out;
}

// Checks ordering and home anchoring of an activity chain: every day that
// appears starts with Home at 00:00 and ends with Home at 24:00.
inline std::vector<Violation> validate_chain(const ActivityChain& chain,
                                             int num_days = SimClock::kNumDays) {
  std::vector<Violation> out;
  const auto& es = chain.entries;
  std::vector<int> first(num_days + 1, -1), last(num_days + 1, -1);
  for (std::size_t i = 0; i < es.size(); ++i) {
    const auto& e = es[i];
    if (e.day < 1 || e.day > num_days) {
      out.push_back({i, ViolationKind::kBadDay, "day out of range"});
      continue;
    }
    if (!(e.start_min < e.end_min) || e.start_min < 0 ||
        e.end_min > kMinutesPerDay) {
      out.push_back({i, ViolationKind::kReversedInterval, "bad entry interval"});
    }
    if (first[e.day] < 0) first[e.day] = static_cast<int>(i);
    last[e.day] = static_cast<int>(i);
    if (i > 0) {
      const auto& p = es[i - 1];
      if (p.day > e.day) {
        out.push_back({i, ViolationKind::kUnsorted, "day decreases"});
      } else if (p.day == e.day && e.start_min < p.end_min) {
        out.push_back({i, ViolationKind::kOverlap, "entries overlap"});
      }
    }
  }
  for (int d = 1; d <= num_days; ++d) {
    if (first[d] < 0) {
      out.push_back({0, ViolationKind::kBadDay,
                     "day " + std::to_string(d) + " missing"});
      continue;
    }
    const auto& f = es[static_cast<std::size_t>(first[d])];
    const auto& l = es[static_cast<std::size_t>(last[d])];
    if (f.type != ActivityType::kHome || f.start_min != 0 ||
        l.type != ActivityType::kHome || l.end_min != kMinutesPerDay) {
      out.push_back({static_cast<std::size_t>(first[d]),
                     ViolationKind::kMissingHomeAnchor,
                     "day " + std::to_string(d) + " not anchored at Home"});
    }
  }
  return out;
}

struct WindowSplit {
  std::vector<Staypoint> train;
  std::vector<Staypoint> test;
};

// Splits one agent's time-sorted staypoints into the train and test windows.
// Stays overlapping the window start or the window end are clipped; a stay
// that straddles the train/test boundary goes to train whole.
inline WindowSplit truncate_to_window(std::span<const Staypoint> seq,
                                      const SimClock& clock) {
  WindowSplit out;
  const Timestamp lo = clock.train_start();
  const Timestamp hi = clock.last_instant();
  for (const auto& in : seq) {
    if (in.end <= lo || in.start >= hi) {
      throw OutOfWindowError("staypoint " + format_iso(in.start) + " - " +
                             format_iso(in.end) + " of agent " +
                             std::to_string(in.agent_id) +
                             " lies outside the simulation window");
    }
    Staypoint sp = in;
    if (sp.start < lo) sp.start = Timestamp(lo.epoch_s, sp.start.offset_min);
    if (sp.end > hi) sp.end = Timestamp(hi.epoch_s, sp.end.offset_min);
    if (sp.start < clock.train_end()) {
      out.train.push_back(sp);
    } else {
      out.test.push_back(sp);
    }
  }
  return out;
}

}  // namespace mobsim
