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
#include <functional>
#include <span>
#include <vector>

#include "mobsim/domain/records.hpp"
#include "mobsim/domain/time.hpp"
#include "mobsim/domain/validation.hpp"
#include "mobsim/parallel.hpp"
#include "mobsim/routing/travel_time.hpp"
#include "mobsim/world/poi_catalog.hpp"

namespace mobsim::routing {

inline constexpr std::int64_t kMinVisitSeconds = 5 * kSecondsPerMinute;

// Travel seconds between two POIs.
using TravelFn = std::function<double(PoiId from, PoiId to)>;

namespace detail {

struct Scheduled {
  PoiId poi;
  Timestamp start;
  Timestamp end;
};

// Absolute scheduled intervals, with consecutive entries at the same POI
// merged into one stay (e.g. overnight Home).
inline std::vector<Scheduled> schedule(const AssignedChain& chain, const SimClock& clock) {
  std::vector<Scheduled> out;
  out.reserve(chain.entries.size());
  for (const auto& ae : chain.entries) {
    const Timestamp day0 = clock.day_start(ae.entry.day);
    const Timestamp s = day0.plus_seconds(ae.entry.start_min * kSecondsPerMinute);
    const Timestamp e = day0.plus_seconds(ae.entry.end_min * kSecondsPerMinute);
    if (!out.empty() && out.back().poi == ae.poi_id) {
      out.back().end = std::max(out.back().end, e);
    } else {
      out.push_back({ae.poi_id, s, e});
    }
  }
  return out;
}

}  // namespace detail

// Turns an assigned chain into staypoints. Each departure happens at the
// realized end of the previous stay; a stay starts at the later of its
// scheduled start and the arrival, and lasts at least five minutes, so a
// late arrival shortens the visit instead of dropping it. Stays that would
// begin after the simulation window closes are omitted.
inline std::vector<Staypoint> realize_schedule(const AssignedChain& chain,
                                               const TravelFn& travel,
                                               const SimClock& clock) {
  const auto sched = detail::schedule(chain, clock);
  std::vector<Staypoint> out;
  out.reserve(sched.size());
  const Timestamp hi = clock.last_instant();
  for (const auto& s : sched) {
    Staypoint sp;
    sp.agent_id = chain.agent_id;
    sp.poi_id = s.poi;
    sp.start = s.start;
    if (!out.empty()) {
      const auto secs =
          static_cast<std::int64_t>(std::ceil(travel(out.back().poi_id, s.poi)));
      sp.start = std::max(s.start, out.back().end.plus_seconds(secs));
    }
    sp.end = std::max(s.end, sp.start.plus_seconds(kMinVisitSeconds));
    if (!(sp.start < hi)) break;
    out.push_back(sp);
  }
  return out;
}

inline TravelFn oracle_travel(const world::PoiCatalog& catalog,
                              const TravelTimeOracle& oracle) {
  return [&catalog, &oracle](PoiId a, PoiId b) {
    return oracle.travel_time_or_fallback(catalog.location(a), catalog.location(b));
  };
}

inline TravelFn zero_travel() {
  return [](PoiId, PoiId) { return 0.0; };
}

// Temporal feasibility violations: index k where the gap before stay k is
// shorter than the travel time from stay k-1 (less one second of rounding).
inline std::vector<std::size_t> feasibility_violations(std::span<const Staypoint> seq,
                                                       const TravelFn& travel) {
  std::vector<std::size_t> bad;
  for (std::size_t k = 1; k < seq.size(); ++k) {
    const double gap = static_cast<double>(seconds_between(seq[k - 1].end, seq[k].start));
    if (gap < travel(seq[k - 1].poi_id, seq[k].poi_id) - 1.0) bad.push_back(k);
  }
  return bad;
}

struct RealizedSplit {
  std::vector<std::vector<Staypoint>> train;  // per agent, input order
  std::vector<std::vector<Staypoint>> test;
};

// Realizes every chain and splits the result into the two windows.
inline RealizedSplit realize_all(std::span<const AssignedChain> chains,
                                 const world::PoiCatalog& catalog,
                                 const TravelTimeOracle& oracle, const SimClock& clock) {
  RealizedSplit r;
  r.train.resize(chains.size());
  r.test.resize(chains.size());
  const TravelFn travel = oracle_travel(catalog, oracle);
  parallel_for(chains.size(), [&](std::size_t i) {
    const auto seq = realize_schedule(chains[i], travel, clock);
    auto split = truncate_to_window(seq, clock);
    r.train[i] = std::move(split.train);
    r.test[i] = std::move(split.test);
  });
  return r;
}

}  // namespace mobsim::routing
