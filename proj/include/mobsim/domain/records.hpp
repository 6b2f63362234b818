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
#include <optional>
#include <string>
#include <vector>

#include "mobsim/domain/activity_type.hpp"
#include "mobsim/domain/time.hpp"
#include "mobsim/geo.hpp"

namespace mobsim {

using AgentId = std::int64_t;
using PoiId = std::int64_t;

struct PoiRecord {
  PoiId poi_id = 0;
  std::string name;
  double latitude = 0.0;
  double longitude = 0.0;
  ActivitySet act_types;

  LatLon location() const { return {latitude, longitude}; }
  friend bool operator==(const PoiRecord&, const PoiRecord&) = default;
};

// Artifact-defined demographic attributes.
struct Demographics {
  std::string age_band;  // "0-17", "18-34", "35-54", "55-64", "65+"
  int household_size = 1;
  bool worker = false;
  bool student = false;
  friend bool operator==(const Demographics&, const Demographics&) = default;
};

struct AgentRecord {
  AgentId agent_id = 0;
  Demographics demographics;
  PoiId home_poi = 0;
  std::optional<PoiId> work_poi;
  friend bool operator==(const AgentRecord&, const AgentRecord&) = default;
};

enum class AnomalyType : std::uint8_t { kNone = 0, kModified = 1, kInjected = 2 };

struct Staypoint {
  AgentId agent_id = 0;
  PoiId poi_id = 0;
  Timestamp start;
  Timestamp end;
  bool anomaly = false;
  AnomalyType anomaly_type = AnomalyType::kNone;

  std::int64_t duration_s() const { return seconds_between(start, end); }
  friend bool operator==(const Staypoint&, const Staypoint&) = default;
};

// Same agent, POI and interval; ignores labels.
inline bool same_visit(const Staypoint& a, const Staypoint& b) {
  return a.agent_id == b.agent_id && a.poi_id == b.poi_id &&
         a.start == b.start && a.end == b.end;
}

inline void set_label(Staypoint& sp, AnomalyType type) {
  sp.anomaly_type = type;
  sp.anomaly = type != AnomalyType::kNone;
}

// One scheduled activity; times are minutes after local midnight, end may be
// 1440 (the 24:00 anchor).
struct ChainEntry {
  int day = 1;  // 1..56
  ActivityType type = ActivityType::kHome;
  int start_min = 0;
  int end_min = 0;
  friend bool operator==(const ChainEntry&, const ChainEntry&) = default;
};

inline constexpr int kMinutesPerDay = 1440;

struct ActivityChain {
  AgentId agent_id = 0;
  std::vector<ChainEntry> entries;
  friend bool operator==(const ActivityChain&, const ActivityChain&) = default;
};

// A chain entry bound to a concrete POI.
struct AssignedEntry {
  ChainEntry entry;
  PoiId poi_id = 0;
  friend bool operator==(const AssignedEntry&, const AssignedEntry&) = default;
};

struct AssignedChain {
  AgentId agent_id = 0;
  std::vector<AssignedEntry> entries;
  friend bool operator==(const AssignedChain&, const AssignedChain&) = default;
};

}  // namespace mobsim
