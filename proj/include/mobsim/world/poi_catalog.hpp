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
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mobsim/domain/records.hpp"
#include "mobsim/error.hpp"
#include "mobsim/geo.hpp"
#include "mobsim/random.hpp"

namespace mobsim::world {

// POI counts per activity type in the Los Angeles release, in enum order.
inline constexpr std::array<std::int64_t, kNumActivityTypes> kReferencePoiCounts{
    449,     2509756, 409920, 10904, 33821, 108496, 17028, 165442,
    4414,    17685,   30520,  2509756, 3100, 7255,  2054,  2838192,
};
inline constexpr std::int64_t kReferenceAgents = 200000;

// Reference counts scaled to a population size, at least one POI per type.
inline std::array<std::int64_t, kNumActivityTypes> scaled_poi_counts(
    std::int64_t n_agents) {
  std::array<std::int64_t, kNumActivityTypes> out{};
  const double f = static_cast<double>(n_agents) / kReferenceAgents;
  for (std::size_t i = 0; i < kNumActivityTypes; ++i) {
    out[i] = std::max<std::int64_t>(
        1, std::llround(static_cast<double>(kReferencePoiCounts[i]) * f));
  }
  return out;
}

struct BoundingBox {
  double min_lat = 0.0;
  double min_lon = 0.0;
  double max_lat = 0.0;
  double max_lon = 0.0;

  bool contains(LatLon p) const {
    return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon &&
           p.lon <= max_lon;
  }
  LatLon center() const {
    return {(min_lat + max_lat) / 2, (min_lon + max_lon) / 2};
  }

  static BoundingBox square(LatLon center, double side_km) {
    const LatLon sw = offset_m(center, -side_km * 500.0, -side_km * 500.0);
    const LatLon ne = offset_m(center, side_km * 500.0, side_km * 500.0);
    return {sw.lat, sw.lon, ne.lat, ne.lon};
  }
};

struct PoiConfig {
  BoundingBox bbox = BoundingBox::square({34.05, -118.25}, 40.0);
  std::array<std::int64_t, kNumActivityTypes> counts = scaled_poi_counts(1000);
  int num_centers = 5;
  double center_sigma_km = 4.0;
  double background_fraction = 0.15;
};

class PoiCatalog {
 public:
  PoiCatalog() = default;

  explicit PoiCatalog(std::vector<PoiRecord> pois) : pois_(std::move(pois)) {
    index_.reserve(pois_.size());
    std::vector<LatLon> points;
    std::vector<PoiId> ids;
    points.reserve(pois_.size());
    ids.reserve(pois_.size());
    for (std::size_t i = 0; i < pois_.size(); ++i) {
      const auto& p = pois_[i];
      if (!index_.emplace(p.poi_id, i).second) {
        throw SchemaError("duplicate poi_id " + std::to_string(p.poi_id));
      }
      if (!valid_coordinate(p.location())) {
        throw SchemaError("poi " + std::to_string(p.poi_id) +
                          " has invalid coordinates");
      }
      if (p.act_types.empty()) {
        throw SchemaError("poi " + std::to_string(p.poi_id) +
                          " has no activity types");
      }
      for (auto t : kAllActivityTypes) {
        if (p.act_types.contains(t)) by_activity_[index_of(t)].push_back(p.poi_id);
      }
      points.push_back(p.location());
      ids.push_back(p.poi_id);
    }
    spatial_ = GridIndex<PoiId>(points, ids, 0.01);
  }

  std::span<const PoiRecord> pois() const { return pois_; }
  std::size_t size() const { return pois_.size(); }

  const PoiRecord* find(PoiId id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &pois_[it->second];
  }

  const PoiRecord& at(PoiId id) const {
    if (const auto* p = find(id)) return *p;
    throw SchemaError("unknown poi_id " + std::to_string(id));
  }

  LatLon location(PoiId id) const { return at(id).location(); }

  std::span<const PoiId> of_type(ActivityType t) const {
    return by_activity_[index_of(t)];
  }

  bool covers_all_types() const {
    return std::all_of(by_activity_.begin(), by_activity_.end(),
                       [](const auto& v) { return !v.empty(); });
  }

  const GridIndex<PoiId>& spatial() const { return spatial_; }

 private:
  std::vector<PoiRecord> pois_;
  std::unordered_map<PoiId, std::size_t> index_;
  std::array<std::vector<PoiId>, kNumActivityTypes> by_activity_;
  GridIndex<PoiId> spatial_;
};

namespace detail {

// Venue types each get their own POIs; Home/Visit share residences, Work and
// DropOff are layered on top of other POIs.
inline constexpr std::array<ActivityType, 12> kVenueTypes{
    ActivityType::kTransportation, ActivityType::kSchool,
    ActivityType::kChildCare,      ActivityType::kBuyGoods,
    ActivityType::kServices,       ActivityType::kEatOut,
    ActivityType::kErrands,        ActivityType::kRecreation,
    ActivityType::kExercise,       ActivityType::kHealthCare,
    ActivityType::kReligious,      ActivityType::kSomethingElse,
};

struct UrbanCenter {
  LatLon where;
  double weight;
  double sigma_km;
};

inline LatLon sample_location(Rng& rng, const PoiConfig& cfg,
                              std::span<const UrbanCenter> centers,
                              std::span<const double> weights) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    LatLon p;
    if (uniform01(rng) < cfg.background_fraction || centers.empty()) {
      p = {cfg.bbox.min_lat + uniform01(rng) * (cfg.bbox.max_lat - cfg.bbox.min_lat),
           cfg.bbox.min_lon + uniform01(rng) * (cfg.bbox.max_lon - cfg.bbox.min_lon)};
    } else {
      const auto& c = centers[sample_weighted(rng, weights)];
      p = offset_m(c.where, gauss(rng) * c.sigma_km * 1000.0,
                   gauss(rng) * c.sigma_km * 1000.0);
    }
    if (cfg.bbox.contains(p)) return p;
  }
}

}  // namespace detail

// Seeded synthetic POI universe. Residences carry {Home, Visit, DropOff};
// each venue type gets its own POIs, most of which are also workplaces;
// DropOff is spread over schools, child care and a share of other venues
// so its total tracks the configured count.
inline PoiCatalog generate_poi_catalog(const PoiConfig& cfg, std::uint64_t seed) {
  const auto& n = cfg.counts;
  for (auto t : kAllActivityTypes) {
    if (n[index_of(t)] <= 0) {
      throw ConfigError("poi count for " + std::string(to_string(t)) +
                        " must be positive");
    }
  }
  const std::int64_t homes = n[index_of(ActivityType::kHome)];
  if (n[index_of(ActivityType::kVisit)] != homes) {
    throw ConfigError("Visit count must equal Home count (shared residences)");
  }
  if (n[index_of(ActivityType::kDropOff)] < homes) {
    throw ConfigError("DropOff count must include every residence");
  }
  if (cfg.num_centers < 0 || cfg.center_sigma_km <= 0.0) {
    throw ConfigError("bad urban center configuration");
  }

  Rng rng = make_rng(seed, "poi_catalog");
  std::vector<detail::UrbanCenter> centers;
  std::vector<double> weights;
  const LatLon mid = cfg.bbox.center();
  const double half_lat = (cfg.bbox.max_lat - cfg.bbox.min_lat) * 0.3;
  const double half_lon = (cfg.bbox.max_lon - cfg.bbox.min_lon) * 0.3;
  for (int k = 0; k < cfg.num_centers; ++k) {
    const LatLon where =
        k == 0 ? mid
               : LatLon{mid.lat + (2 * uniform01(rng) - 1) * half_lat,
                        mid.lon + (2 * uniform01(rng) - 1) * half_lon};
    centers.push_back({where, 1.0 / (k + 1),
                       cfg.center_sigma_km * (0.6 + 0.8 * uniform01(rng))});
    weights.push_back(1.0 / (k + 1));
  }

  std::vector<PoiRecord> pois;
  PoiId next_id = 1;
  auto add = [&](ActivitySet types, std::string name) {
    const LatLon p = detail::sample_location(rng, cfg, centers, weights);
    pois.push_back({next_id++, std::move(name), p.lat, p.lon, types});
  };

  for (std::int64_t i = 0; i < homes; ++i) {
    add({ActivityType::kHome, ActivityType::kVisit, ActivityType::kDropOff}, "");
  }

  std::int64_t venues = 0;
  for (auto t : detail::kVenueTypes) venues += n[index_of(t)];
  const std::int64_t work_target = n[index_of(ActivityType::kWork)];
  const std::int64_t offices = std::max<std::int64_t>(0, work_target - venues);
  const double venue_work_p =
      venues == 0 ? 0.0
                  : std::min(1.0, static_cast<double>(work_target) /
                                      static_cast<double>(venues));
  const std::int64_t forced_drop =
      n[index_of(ActivityType::kSchool)] + n[index_of(ActivityType::kChildCare)];
  const std::int64_t drop_extra = n[index_of(ActivityType::kDropOff)] - homes;
  const std::int64_t optional_pool = venues - forced_drop + offices;
  const double drop_p =
      optional_pool <= 0
          ? 0.0
          : std::clamp(static_cast<double>(drop_extra - forced_drop) /
                           static_cast<double>(optional_pool),
                       0.0, 1.0);

  for (auto t : detail::kVenueTypes) {
    const bool always_drop =
        t == ActivityType::kSchool || t == ActivityType::kChildCare;
    for (std::int64_t i = 0; i < n[index_of(t)]; ++i) {
      ActivitySet set{t};
      if (uniform01(rng) < venue_work_p) set.insert(ActivityType::kWork);
      if (always_drop || uniform01(rng) < drop_p) set.insert(ActivityType::kDropOff);
      add(set, std::string(to_string(t)) + " " + std::to_string(i + 1));
    }
  }
  for (std::int64_t i = 0; i < offices; ++i) {
    ActivitySet set{ActivityType::kWork};
    if (uniform01(rng) < drop_p) set.insert(ActivityType::kDropOff);
    add(set, "Office " + std::to_string(i + 1));
  }
  const bool has_work = std::any_of(pois.begin(), pois.end(), [](const auto& p) {
    return p.act_types.contains(ActivityType::kWork);
  });
  if (!has_work) pois.back().act_types.insert(ActivityType::kWork);
  return PoiCatalog(std::move(pois));
}

}  // namespace mobsim::world
