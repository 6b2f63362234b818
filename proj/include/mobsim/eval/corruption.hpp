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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mobsim/domain/grouping.hpp"
#include "mobsim/domain/records.hpp"
#include "mobsim/error.hpp"
#include "mobsim/random.hpp"
#include "mobsim/world/poi_catalog.hpp"

namespace mobsim::eval {

enum class CorruptionKind { kTemporal, kMissing, kIdSwitch, kSpatial };

inline CorruptionKind parse_corruption(const std::string& s) {
  if (s == "temporal") return CorruptionKind::kTemporal;
  if (s == "missing") return CorruptionKind::kMissing;
  if (s == "id_switch") return CorruptionKind::kIdSwitch;
  if (s == "spatial") return CorruptionKind::kSpatial;
  throw ConfigError("unknown corruption kind '" + s + "'");
}

namespace detail {

// Sorted, non-overlapping copy of one agent's rows. An overlap is resolved
// at the midpoint of the overlapping span; a row swallowed by its
// predecessor is dropped.
inline std::vector<Staypoint> repair_overlaps(std::vector<Staypoint> seq) {
  std::stable_sort(seq.begin(), seq.end(),
                   [](const Staypoint& a, const Staypoint& b) { return a.start < b.start; });
  std::vector<Staypoint> out;
  out.reserve(seq.size());
  for (auto b : seq) {
    for (;;) {
      if (out.empty() || !(b.start < out.back().end)) {
        out.push_back(b);
        break;
      }
      Staypoint& a = out.back();
      const Timestamp mid = b.start.plus_seconds(seconds_between(b.start, a.end) / 2);
      if (!(mid < b.end)) break;  // b lies inside a
      if (!(a.start < mid)) {
        out.pop_back();
        continue;
      }
      a.end = Timestamp(mid.epoch_s, a.end.offset_min);
      b.start = Timestamp(mid.epoch_s, b.start.offset_min);
      out.push_back(b);
      break;
    }
  }
  return out;
}

inline std::vector<Staypoint> repair_all(std::span<const Staypoint> rows) {
  std::vector<Staypoint> out;
  for (auto& seq : group_by_agent(rows)) {
    auto fixed = repair_overlaps(std::move(seq));
    out.insert(out.end(), fixed.begin(), fixed.end());
  }
  return out;
}

}  // namespace detail

// Applies one corruption to test rows; labels travel with their rows.
//  temporal:  Gaussian noise with sd `magnitude` minutes on start and end
//  missing:   each row dropped with probability `magnitude`
//  id_switch: with probability `magnitude` a row swaps agent ids with a row
//             of another agent that is in progress at its start
//  spatial:   the POI moves to the nearest other POI within `magnitude` km
//             of a Gaussian-displaced location (sd `magnitude` km)
// Output is grouped by agent and free of overlaps. `catalog` is required
// for spatial noise only.
inline std::vector<Staypoint> apply_corruption(std::span<const Staypoint> rows,
                                               CorruptionKind kind, double magnitude,
                                               std::uint64_t seed,
                                               const world::PoiCatalog* catalog = nullptr) {
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude)) {
    throw ConfigError("corruption magnitude must be finite and non-negative");
  }
  Rng rng = make_rng(seed, "corruption", static_cast<std::uint64_t>(kind));
  std::vector<Staypoint> out(rows.begin(), rows.end());
  switch (kind) {
    case CorruptionKind::kTemporal: {
      if (magnitude == 0.0) break;
      std::normal_distribution<double> noise(0.0, magnitude * 60.0);
      for (auto& sp : out) {
        sp.start = sp.start.plus_seconds(std::llround(noise(rng)));
        sp.end = sp.end.plus_seconds(std::llround(noise(rng)));
        if (!(sp.start < sp.end)) sp.end = sp.start.plus_seconds(60);
      }
      break;
    }
    case CorruptionKind::kMissing: {
      std::vector<Staypoint> kept;
      for (const auto& sp : out) {
        if (!(uniform01(rng) < magnitude)) kept.push_back(sp);
      }
      out = std::move(kept);
      break;
    }
    case CorruptionKind::kIdSwitch: {
      if (magnitude == 0.0) break;
      auto groups = group_by_agent(out);
      if (groups.size() < 2) break;
      std::vector<std::vector<bool>> used(groups.size());
      for (std::size_t g = 0; g < groups.size(); ++g) used[g].assign(groups[g].size(), false);
      std::uniform_int_distribution<std::size_t> other(0, groups.size() - 2);
      for (std::size_t g = 0; g < groups.size(); ++g) {
        for (std::size_t k = 0; k < groups[g].size(); ++k) {
          if (used[g][k] || !(uniform01(rng) < magnitude)) continue;
          std::size_t h = other(rng);
          if (h >= g) ++h;
          const Timestamp t = groups[g][k].start;
          auto it = std::upper_bound(groups[h].begin(), groups[h].end(), t,
                                     [](Timestamp v, const Staypoint& sp) { return v < sp.start; });
          if (it == groups[h].begin()) continue;
          --it;
          const auto m = static_cast<std::size_t>(it - groups[h].begin());
          if (!(t < it->end) || used[h][m]) continue;
          std::swap(groups[g][k].agent_id, it->agent_id);
          used[g][k] = used[h][m] = true;
        }
      }
      out = flatten(groups);
      break;
    }
    case CorruptionKind::kSpatial: {
      if (magnitude == 0.0) break;
      if (catalog == nullptr) throw ConfigError("spatial corruption needs the POI catalog");
      std::normal_distribution<double> noise(0.0, magnitude * 1000.0);
      for (auto& sp : out) {
        const LatLon origin = catalog->location(sp.poi_id);
        const LatLon q = offset_m(origin, noise(rng), noise(rng));
        const PoiId self = sp.poi_id;
        const PoiId* near = catalog->spatial().nearest(q, [self](PoiId id) { return id != self; });
        if (near != nullptr && haversine_km(origin, catalog->location(*near)) <= magnitude) {
          sp.poi_id = *near;
        }
      }
      break;
    }
  }
  return detail::repair_all(out);
}

}  // namespace mobsim::eval
