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

#include <atomic>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <queue>
#include <shared_mutex>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mobsim/error.hpp"
#include "mobsim/geo.hpp"
#include "mobsim/world/road_graph.hpp"

namespace mobsim::routing {

using world::NodeIndex;
using world::RoadGraph;

struct RoutingConfig {
  double access_padding_s = 60.0;  // added at each end of every trip
  double fallback_speed_mps = 8.33;
  bool cache = true;
};

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

// Single-source Dijkstra over length/speed edge weights. Stops early once
// `target` is settled when one is given.
inline std::vector<double> dijkstra(const RoadGraph& g, NodeIndex source,
                                    std::optional<NodeIndex> target = std::nullopt) {
  std::vector<double> dist(g.num_nodes(), kUnreachable);
  using Item = std::pair<double, NodeIndex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[source] = 0.0;
  pq.push({0.0, source});
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    if (target && u == *target) break;
    for (const auto& e : g.out_edges(u)) {
      const double nd = d + e.seconds();
      if (nd < dist[e.to]) {
        dist[e.to] = nd;
        pq.push({nd, e.to});
      }
    }
  }
  return dist;
}

// Free-flow travel times between coordinates: snap both ends to the nearest
// graph node, route at speed limits, add access/egress padding. Safe to
// query from several threads; the pair cache is last-write-wins.
class TravelTimeOracle {
 public:
  explicit TravelTimeOracle(RoadGraph graph, RoutingConfig cfg = {})
      : TravelTimeOracle(std::make_shared<const RoadGraph>(std::move(graph)), cfg) {}

  TravelTimeOracle(std::shared_ptr<const RoadGraph> graph, RoutingConfig cfg = {})
      : graph_(std::move(graph)), cfg_(cfg), cache_(std::make_shared<Cache>()) {
    if (graph_->empty()) throw ConfigError("travel-time oracle needs a nonempty graph");
    std::vector<NodeIndex> ids(graph_->num_nodes());
    for (NodeIndex i = 0; i < ids.size(); ++i) ids[i] = i;
    nodes_ = GridIndex<NodeIndex>(graph_->coords(), ids, 0.01);
  }

  const RoadGraph& graph() const { return *graph_; }
  const RoutingConfig& config() const { return cfg_; }

  NodeIndex snap(LatLon p) const { return *nodes_.nearest(p); }

  // Network seconds between nodes, nullopt when unreachable.
  std::optional<double> network_seconds(NodeIndex from, NodeIndex to) const {
    if (from == to) return 0.0;
    const std::uint64_t key = (std::uint64_t{from} << 32) | to;
    if (cfg_.cache) {
      std::shared_lock lock(cache_->mu);
      if (auto it = cache_->map.find(key); it != cache_->map.end()) {
        return it->second == kUnreachable ? std::nullopt
                                          : std::optional<double>(it->second);
      }
    }
    const double d = dijkstra(*graph_, from, to)[to];
    if (cfg_.cache) {
      std::unique_lock lock(cache_->mu);
      cache_->map[key] = d;
    }
    if (d == kUnreachable) return std::nullopt;
    return d;
  }

  // Seconds to every node from `from`, kUnreachable where no path exists.
  std::vector<double> single_source(NodeIndex from) const {
    return dijkstra(*graph_, from);
  }

  double padding_s() const { return 2.0 * cfg_.access_padding_s; }

  double shortest_travel_time(LatLon origin, LatLon dest) const {
    const auto s = network_seconds(snap(origin), snap(dest));
    if (!s) throw UnreachableError("destination unreachable on road graph");
    return *s + padding_s();
  }

  // Straight-line fallback when the network has no path; counts fallbacks.
  double travel_time_or_fallback(LatLon origin, LatLon dest) const {
    if (const auto s = network_seconds(snap(origin), snap(dest))) {
      return *s + padding_s();
    }
    fallbacks_->fetch_add(1, std::memory_order_relaxed);
    return haversine_km(origin, dest) * 1000.0 / cfg_.fallback_speed_mps + padding_s();
  }

  std::size_t fallback_count() const { return fallbacks_->load(); }

 private:
  struct Cache {
    std::shared_mutex mu;
    std::unordered_map<std::uint64_t, double> map;
  };

  std::shared_ptr<const RoadGraph> graph_;
  RoutingConfig cfg_;
  GridIndex<NodeIndex> nodes_;
  std::shared_ptr<Cache> cache_;
  std::shared_ptr<std::atomic<std::size_t>> fallbacks_ =
      std::make_shared<std::atomic<std::size_t>>(0);
};

}  // namespace mobsim::routing
