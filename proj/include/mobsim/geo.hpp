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
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace mobsim {

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
  friend bool operator==(const LatLon&, const LatLon&) = default;
};

inline constexpr double kEarthRadiusKm = 6371.0088;
inline constexpr double kMetersPerDegreeLat = 111'320.0;

inline double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

// Great-circle distance in kilometres.
inline double haversine_km(LatLon a, LatLon b) {
  const double dlat = deg2rad(b.lat - a.lat);
  const double dlon = deg2rad(b.lon - a.lon);
  const double s = std::sin(dlat / 2);
  const double t = std::sin(dlon / 2);
  const double h =
      s * s + std::cos(deg2rad(a.lat)) * std::cos(deg2rad(b.lat)) * t * t;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

// Offset a point by metres north/east on a local tangent plane.
inline LatLon offset_m(LatLon origin, double north_m, double east_m) {
  return {origin.lat + north_m / kMetersPerDegreeLat,
          origin.lon +
              east_m / (kMetersPerDegreeLat * std::cos(deg2rad(origin.lat)))};
}

inline bool valid_coordinate(LatLon p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 &&
         p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0;
}

// Uniform lat/lon bucket grid over a fixed point set. `Id` is whatever the
// caller wants back from queries (POI ids, node indices).
template <typename Id>
class GridIndex {
 public:
  GridIndex() = default;

  GridIndex(std::span<const LatLon> points, std::span<const Id> ids,
            double cell_deg)
      : cell_deg_(cell_deg) {
    if (points.empty()) return;
    lat0_ = lon0_ = std::numeric_limits<double>::max();
    double lat1 = std::numeric_limits<double>::lowest();
    double lon1 = lat1;
    for (const auto& p : points) {
      lat0_ = std::min(lat0_, p.lat);
      lon0_ = std::min(lon0_, p.lon);
      lat1 = std::max(lat1, p.lat);
      lon1 = std::max(lon1, p.lon);
    }
    rows_ = static_cast<std::size_t>((lat1 - lat0_) / cell_deg_) + 1;
    cols_ = static_cast<std::size_t>((lon1 - lon0_) / cell_deg_) + 1;
    cells_.assign(rows_ * cols_, {});
    for (std::size_t i = 0; i < points.size(); ++i) {
      cells_[cell_of(points[i])].push_back({points[i], ids[i]});
    }
  }

  bool empty() const { return cells_.empty(); }

  // Nearest indexed point by haversine distance, searched ring by ring.
  // `accept`, when given, filters candidate ids.
  template <typename Pred = std::nullptr_t>
  const Id* nearest(LatLon q, Pred accept = nullptr) const {
    if (cells_.empty()) return nullptr;
    const auto [r0, c0] = rc_clamped(q);
    const Id* best = nullptr;
    double best_km = std::numeric_limits<double>::infinity();
    const std::size_t max_ring = std::max(rows_, cols_);
    for (std::size_t ring = 0; ring <= max_ring; ++ring) {
      visit_ring(r0, c0, ring, [&](const Entry& e) {
        if constexpr (!std::is_same_v<Pred, std::nullptr_t>) {
          if (!accept(e.id)) return;
        }
        const double d = haversine_km(q, e.p);
        if (d < best_km) {
          best_km = d;
          best = &e.id;
        }
      });
      // Every point outside this ring is at least `ring` cells away.
      if (best != nullptr &&
          best_km < ring_lower_bound_km(q, static_cast<double>(ring))) {
        break;
      }
    }
    return best;
  }

  // All ids within radius_km of q.
  std::vector<Id> within(LatLon q, double radius_km) const {
    std::vector<Id> out;
    if (cells_.empty()) return out;
    const double span_deg =
        radius_km * 1000.0 /
        (kMetersPerDegreeLat * std::max(0.05, std::cos(deg2rad(q.lat))));
    const auto rings = static_cast<std::size_t>(span_deg / cell_deg_) + 1;
    const auto [r0, c0] = rc_clamped(q);
    for (std::size_t ring = 0; ring <= rings; ++ring) {
      visit_ring(r0, c0, ring, [&](const Entry& e) {
        if (haversine_km(q, e.p) <= radius_km) out.push_back(e.id);
      });
    }
    return out;
  }

 private:
  struct Entry {
    LatLon p;
    Id id;
  };

  std::size_t cell_of(LatLon p) const {
    const auto [r, c] = rc_clamped(p);
    return r * cols_ + c;
  }

  std::pair<std::size_t, std::size_t> rc_clamped(LatLon p) const {
    const double fr = std::floor((p.lat - lat0_) / cell_deg_);
    const double fc = std::floor((p.lon - lon0_) / cell_deg_);
    const auto r = static_cast<std::size_t>(
        std::clamp(fr, 0.0, static_cast<double>(rows_ - 1)));
    const auto c = static_cast<std::size_t>(
        std::clamp(fc, 0.0, static_cast<double>(cols_ - 1)));
    return {r, c};
  }

  double ring_lower_bound_km(LatLon q, double ring) const {
    // Conservative: a cell step in longitude is the shorter one.
    const double lon_km = cell_deg_ * kMetersPerDegreeLat / 1000.0 *
                          std::cos(deg2rad(std::min(89.0, std::abs(q.lat) + 1)));
    return ring * std::min(lon_km, cell_deg_ * kMetersPerDegreeLat / 1000.0);
  }

  template <typename F>
  void visit_ring(std::size_t r0, std::size_t c0, std::size_t ring,
                  F&& f) const {
    const auto lo_r = static_cast<long>(r0) - static_cast<long>(ring);
    const auto hi_r = static_cast<long>(r0) + static_cast<long>(ring);
    const auto lo_c = static_cast<long>(c0) - static_cast<long>(ring);
    const auto hi_c = static_cast<long>(c0) + static_cast<long>(ring);
    for (long r = lo_r; r <= hi_r; ++r) {
      if (r < 0 || r >= static_cast<long>(rows_)) continue;
      const bool edge_row = (r == lo_r || r == hi_r);
      for (long c = lo_c; c <= hi_c; ++c) {
        if (c < 0 || c >= static_cast<long>(cols_)) continue;
        if (!edge_row && c != lo_c && c != hi_c) continue;
        for (const auto& e : cells_[static_cast<std::size_t>(r) * cols_ +
                                    static_cast<std::size_t>(c)]) {
          f(e);
        }
      }
    }
  }

  double cell_deg_ = 0.01;
  double lat0_ = 0.0;
  double lon0_ = 0.0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::vector<Entry>> cells_;
};

}  // namespace mobsim
