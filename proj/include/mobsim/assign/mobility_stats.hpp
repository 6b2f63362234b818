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
#include <set>
#include <span>
#include <vector>

#include "mobsim/domain/records.hpp"
#include "mobsim/error.hpp"
#include "mobsim/geo.hpp"
#include "mobsim/routing/travel_time.hpp"
#include "mobsim/world/poi_catalog.hpp"

namespace mobsim::assign {

struct DistributionSummary {
  std::size_t count = 0;
  double median = 0.0;
  double mean = 0.0;
  double p90 = 0.0;
};

// Linear-interpolated quantile of an unsorted sample.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(v.size() - 1, lo + 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline DistributionSummary summarize(const std::vector<double>& v) {
  DistributionSummary s;
  s.count = v.size();
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  s.median = quantile(v, 0.5);
  s.p90 = quantile(v, 0.9);
  return s;
}

// Root-mean-square great-circle distance (km) of the points from their
// lat/lon centroid.
inline double radius_of_gyration(std::span<const LatLon> points) {
  if (points.empty()) throw MetricError("radius of gyration of no points");
  LatLon c{0.0, 0.0};
  for (const auto& p : points) {
    c.lat += p.lat;
    c.lon += p.lon;
  }
  c.lat /= static_cast<double>(points.size());
  c.lon /= static_cast<double>(points.size());
  double sq = 0.0;
  for (const auto& p : points) {
    const double d = haversine_km(p, c);
    sq += d * d;
  }
  return std::sqrt(sq / static_cast<double>(points.size()));
}

struct AgentMobility {
  AgentId agent_id = 0;
  double radius_of_gyration_km = 0.0;
  double mean_daily_distance_km = 0.0;
  double mean_locations_per_day = 0.0;
  double commute_minutes = -1.0;  // negative when the agent has no workplace
};

struct MobilityStats {
  DistributionSummary radius_of_gyration_km;  // over agents
  DistributionSummary daily_distance_km;      // over agent-days
  DistributionSummary locations_per_day;      // over agent-days
  DistributionSummary commute_minutes;        // over workers
  std::vector<AgentMobility> per_agent;
};

namespace detail {

inline std::int64_t local_day(Timestamp t) {
  const std::int64_t s = t.local_seconds();
  return s >= 0 ? s / kSecondsPerDay : (s - kSecondsPerDay + 1) / kSecondsPerDay;
}

}  // namespace detail

// Mobility summaries over per-agent, time-sorted staypoint sequences.
// Daily distance sums consecutive-staypoint great-circle distances, each
// trip counted on the local day it arrives; locations per day counts
// distinct POIs whose stay touches the day; commute is the network travel
// time from home to work.
inline MobilityStats compute_mobility_stats(
    std::span<const std::vector<Staypoint>> by_agent, std::span<const AgentRecord> agents,
    const world::PoiCatalog& catalog, const routing::TravelTimeOracle& oracle) {
  MobilityStats out;
  std::vector<double> rog, daily_km, locations, commute;
  for (const auto& seq : by_agent) {
    if (seq.empty()) continue;
    AgentMobility am;
    am.agent_id = seq.front().agent_id;
    std::vector<LatLon> pts;
    pts.reserve(seq.size());
    for (const auto& sp : seq) pts.push_back(catalog.location(sp.poi_id));
    am.radius_of_gyration_km = radius_of_gyration(pts);
    rog.push_back(am.radius_of_gyration_km);

    const std::int64_t first = detail::local_day(seq.front().start);
    const std::int64_t last = detail::local_day(seq.back().end.plus_seconds(-1));
    const auto ndays = static_cast<std::size_t>(last - first + 1);
    std::vector<double> km(ndays, 0.0);
    std::vector<std::set<PoiId>> seen(ndays);
    for (std::size_t k = 0; k < seq.size(); ++k) {
      const auto& sp = seq[k];
      const std::int64_t d0 = detail::local_day(sp.start);
      const std::int64_t d1 = detail::local_day(sp.end.plus_seconds(-1));
      for (std::int64_t d = d0; d <= d1; ++d) {
        seen[static_cast<std::size_t>(d - first)].insert(sp.poi_id);
      }
      if (k > 0) {
        km[static_cast<std::size_t>(d0 - first)] += haversine_km(pts[k - 1], pts[k]);
      }
    }
    double km_sum = 0.0, loc_sum = 0.0;
    for (std::size_t d = 0; d < ndays; ++d) {
      daily_km.push_back(km[d]);
      locations.push_back(static_cast<double>(seen[d].size()));
      km_sum += km[d];
      loc_sum += static_cast<double>(seen[d].size());
    }
    am.mean_daily_distance_km = km_sum / static_cast<double>(ndays);
    am.mean_locations_per_day = loc_sum / static_cast<double>(ndays);
    out.per_agent.push_back(am);
  }

  for (const auto& a : agents) {
    if (!a.work_poi) continue;
    const double minutes = oracle.travel_time_or_fallback(catalog.location(a.home_poi),
                                                          catalog.location(*a.work_poi)) /
                           60.0;
    commute.push_back(minutes);
    for (auto& am : out.per_agent) {
      if (am.agent_id == a.agent_id) {
        am.commute_minutes = minutes;
        break;
      }
    }
  }
  out.radius_of_gyration_km = summarize(rog);
  out.daily_distance_km = summarize(daily_km);
  out.locations_per_day = summarize(locations);
  out.commute_minutes = summarize(commute);
  return out;
}

}  // namespace mobsim::assign
