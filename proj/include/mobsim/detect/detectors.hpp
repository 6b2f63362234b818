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
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mobsim/domain/records.hpp"
#include "mobsim/error.hpp"
#include "mobsim/geo.hpp"
#include "mobsim/parallel.hpp"

namespace mobsim::detect {

enum class Level : std::uint8_t { kStaypoint, kAgent };

inline const char* to_string(Level l) {
  return l == Level::kStaypoint ? "staypoint" : "agent";
}

inline Level parse_level(const std::string& s) {
  if (s == "staypoint") return Level::kStaypoint;
  if (s == "agent") return Level::kAgent;
  throw SchemaError("unknown score level '" + s + "'");
}

// staypoint_index is the position in the agent's time-sorted test
// sequence; it is absent for agent-level items.
struct ScoredItem {
  Level level = Level::kStaypoint;
  AgentId agent_id = 0;
  std::optional<std::size_t> staypoint_index;
  double score = 0.0;
  friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

// Per-agent staypoint sequences for the two windows; element i of both
// spans belongs to the same agent.
struct WindowedData {
  std::span<const std::vector<Staypoint>> train;
  std::span<const std::vector<Staypoint>> test;
};

struct VisitCounts {
  std::int64_t train = 0;
  std::int64_t test = 0;
};

// Visit counts of every (agent, POI) pair in the two windows.
class VisitRateTable {
 public:
  static VisitRateTable build(WindowedData data) {
    if (data.train.size() != data.test.size()) {
      throw MetricError("train and test agent counts differ");
    }
    VisitRateTable t;
    t.per_agent_.resize(data.test.size());
    parallel_for(data.test.size(), [&](std::size_t i) {
      auto& m = t.per_agent_[i];
      for (const auto& sp : data.train[i]) ++m[sp.poi_id].train;
      for (const auto& sp : data.test[i]) ++m[sp.poi_id].test;
    });
    return t;
  }

  VisitCounts counts(std::size_t agent_index, PoiId poi) const {
    const auto& m = per_agent_.at(agent_index);
    auto it = m.find(poi);
    return it == m.end() ? VisitCounts{} : it->second;
  }

  std::size_t num_agents() const { return per_agent_.size(); }

 private:
  std::vector<std::unordered_map<PoiId, VisitCounts>> per_agent_;
};

// Poisson rate-change score |train - test| / sqrt(train); a train count of
// zero is replaced by 0.5.
inline double visit_rate_score(std::int64_t train_count, std::int64_t test_count) {
  const double lt = train_count == 0 ? 0.5 : static_cast<double>(train_count);
  return std::abs(lt - static_cast<double>(test_count)) / std::sqrt(lt);
}

// Each value becomes the max of itself and its immediate neighbours.
inline std::vector<double> neighbor_max(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k > 0) out[k] = std::max(out[k], v[k - 1]);
    if (k + 1 < v.size()) out[k] = std::max(out[k], v[k + 1]);
  }
  return out;
}

using PerStaypointScorer =
    std::function<std::vector<double>(std::size_t agent_index, WindowedData data)>;

namespace detail {

inline std::vector<ScoredItem> score_all(WindowedData data, const PerStaypointScorer& raw) {
  if (data.train.size() != data.test.size()) {
    throw MetricError("train and test agent counts differ");
  }
  std::vector<std::vector<ScoredItem>> per(data.test.size());
  parallel_for(data.test.size(), [&](std::size_t i) {
    const auto& seq = data.test[i];
    const auto smoothed = neighbor_max(raw(i, data));
    per[i].reserve(seq.size());
    for (std::size_t k = 0; k < seq.size(); ++k) {
      per[i].push_back({Level::kStaypoint, seq[k].agent_id, k, smoothed[k]});
    }
  });
  std::vector<ScoredItem> out;
  for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
  return out;
}

}  // namespace detail

// Staypoint scores of the visit-rate detector, neighbour-max smoothed
// within each agent's test sequence.
inline std::vector<ScoredItem> visit_rate_scores(WindowedData data) {
  const auto table = VisitRateTable::build(data);
  return detail::score_all(data, [&table](std::size_t i, WindowedData d) {
    std::vector<double> s;
    s.reserve(d.test[i].size());
    for (const auto& sp : d.test[i]) {
      const auto c = table.counts(i, sp.poi_id);
      s.push_back(visit_rate_score(c.train, c.test));
    }
    return s;
  });
}

// 1 for a test staypoint at a POI the agent never visited in train, else 0;
// smoothed like the visit-rate scores.
inline std::vector<ScoredItem> novelty_scores(WindowedData data) {
  return detail::score_all(data, [](std::size_t i, WindowedData d) {
    std::unordered_set<PoiId> known;
    for (const auto& sp : d.train[i]) known.insert(sp.poi_id);
    std::vector<double> s;
    s.reserve(d.test[i].size());
    for (const auto& sp : d.test[i]) s.push_back(known.contains(sp.poi_id) ? 0.0 : 1.0);
    return s;
  });
}

// One agent-level item per id in `agents`, holding the max of that agent's
// staypoint scores (0 when it has none). Output follows `agents` order.
inline std::vector<ScoredItem> aggregate_to_agents(std::span<const ScoredItem> staypoints,
                                                   std::span<const AgentId> agents) {
  std::unordered_map<AgentId, double> best;
  for (const auto& it : staypoints) {
    if (it.level != Level::kStaypoint) continue;
    auto [pos, fresh] = best.emplace(it.agent_id, it.score);
    if (!fresh) pos->second = std::max(pos->second, it.score);
  }
  std::vector<ScoredItem> out;
  out.reserve(agents.size());
  for (AgentId a : agents) {
    auto f = best.find(a);
    out.push_back({Level::kAgent, a, std::nullopt, f == best.end() ? 0.0 : f->second});
  }
  return out;
}

using Detector = std::function<std::vector<ScoredItem>(WindowedData)>;

inline const std::vector<std::string>& detector_names() {
  static const std::vector<std::string> names{"visit_rate", "novelty"};
  return names;
}

inline Detector detector_by_name(const std::string& name) {
  if (name == "visit_rate") return visit_rate_scores;
  if (name == "novelty") return novelty_scores;
  throw ConfigError("unknown detector '" + name + "'");
}

// Square lat/lon grid cells; id = row * columns + column with rows counted
// from -90 and columns from -180.
class SquareGrid {
 public:
  explicit SquareGrid(double cell_deg) : cell_(cell_deg) {
    if (!(cell_deg > 0.0) || !std::isfinite(cell_deg)) {
      throw ConfigError("grid cell size must be positive");
    }
    cols_ = static_cast<std::int64_t>(std::ceil(360.0 / cell_));
  }

  std::int64_t cell_of(LatLon p) const {
    if (!std::isfinite(p.lat) || !std::isfinite(p.lon)) {
      throw SchemaError("non-finite coordinate");
    }
    const auto row = static_cast<std::int64_t>(std::floor((p.lat + 90.0) / cell_));
    const auto col = static_cast<std::int64_t>(std::floor((p.lon + 180.0) / cell_));
    return row * cols_ + col;
  }

  LatLon south_west(std::int64_t id) const {
    const std::int64_t row = id / cols_;
    const std::int64_t col = id % cols_;
    return {static_cast<double>(row) * cell_ - 90.0, static_cast<double>(col) * cell_ - 180.0};
  }

  double cell_deg() const { return cell_; }

 private:
  double cell_;
  std::int64_t cols_;
};

inline std::vector<std::int64_t> gridify(std::span<const LatLon> points, double cell_deg) {
  const SquareGrid g(cell_deg);
  std::vector<std::int64_t> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(g.cell_of(p));
  return out;
}

}  // namespace mobsim::detect
