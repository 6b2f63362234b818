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

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mobsim/domain/records.hpp"
#include "mobsim/error.hpp"
#include "mobsim/parallel.hpp"
#include "mobsim/random.hpp"
#include "mobsim/world/poi_catalog.hpp"

namespace mobsim::assign {

// Exploration / preferential-return parameters.
struct AssignConfig {
  double rho = 0.6;
  double gamma = 0.21;
  double beta = 1.7;
  double min_distance_km = 0.1;  // floor for the distance-decay kernel
};

// Per-agent location memory. Ordered map so iteration is deterministic.
struct AgentLocationState {
  std::map<PoiId, std::int64_t> visit_counts;
  PoiId home_poi = 0;
  std::optional<PoiId> work_poi;

  std::size_t distinct() const { return visit_counts.size(); }
  std::int64_t total() const {
    std::int64_t n = 0;
    for (const auto& [id, c] : visit_counts) n += c;
    return n;
  }
  void record(PoiId id) { ++visit_counts[id]; }

  static AgentLocationState for_agent(const AgentRecord& a) {
    AgentLocationState s;
    s.home_poi = a.home_poi;
    s.work_poi = a.work_poi;
    return s;
  }
};

inline double explore_probability(const AssignConfig& cfg, std::size_t distinct) {
  const double s = static_cast<double>(std::max<std::size_t>(1, distinct));
  return std::min(1.0, cfg.rho * std::pow(s, -cfg.gamma));
}

namespace detail {

// The agent's own residence only ever serves Home.
inline bool valid_for(const world::PoiCatalog& catalog, PoiId id, ActivityType t,
                      PoiId own_home) {
  if (id == own_home) return t == ActivityType::kHome;
  return catalog.at(id).act_types.contains(t);
}

}  // namespace detail

// Preferential return: a previously visited POI valid for `t`, chosen with
// probability proportional to its visit count. nullopt if none qualifies.
inline std::optional<PoiId> choose_return(const AgentLocationState& state,
                                          const world::PoiCatalog& catalog,
                                          ActivityType t, Rng& rng) {
  std::vector<PoiId> ids;
  std::vector<double> w;
  for (const auto& [id, count] : state.visit_counts) {
    if (!detail::valid_for(catalog, id, t, state.home_poi)) continue;
    ids.push_back(id);
    w.push_back(static_cast<double>(count));
  }
  if (ids.empty()) return std::nullopt;
  return ids[sample_weighted(rng, w)];
}

// Exploration: an unvisited POI valid for `t`, weighted by
// 1 / distance^beta from `from`. nullopt if every valid POI was visited.
inline std::optional<PoiId> choose_explore(const AgentLocationState& state,
                                           const world::PoiCatalog& catalog,
                                           ActivityType t, LatLon from,
                                           const AssignConfig& cfg, Rng& rng) {
  const auto candidates = catalog.of_type(t);
  std::vector<double> w(candidates.size(), 0.0);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const PoiId id = candidates[i];
    if (state.visit_counts.contains(id)) continue;
    if (id == state.home_poi) continue;
    const double d =
        std::max(cfg.min_distance_km, haversine_km(from, catalog.location(id)));
    w[i] = std::pow(d, -cfg.beta);
  }
  const std::size_t k = sample_weighted(rng, w);
  if (k == w.size()) return std::nullopt;
  return candidates[k];
}

// Binds every entry of a chain to a POI. Home and Work are anchored; Visit
// goes to someone else's residence; all other types explore a new POI with
// probability rho * S^-gamma (S = distinct POIs visited so far) and
// otherwise return to a known one. The agent's own residence is never used
// for a non-Home activity. `state` is updated in place.
inline AssignedChain assign_pois(const ActivityChain& chain, const AgentRecord& agent,
                                 const world::PoiCatalog& catalog,
                                 AgentLocationState& state, const AssignConfig& cfg,
                                 std::uint64_t seed) {
  Rng rng = make_rng(seed, "poi_assign", static_cast<std::uint64_t>(agent.agent_id));
  AssignedChain out;
  out.agent_id = chain.agent_id;
  out.entries.reserve(chain.entries.size());
  LatLon here = catalog.location(agent.home_poi);

  for (const auto& e : chain.entries) {
    PoiId chosen = 0;
    if (e.type == ActivityType::kHome) {
      chosen = agent.home_poi;
    } else if (e.type == ActivityType::kWork && agent.work_poi) {
      chosen = *agent.work_poi;
    } else {
      const auto valid = catalog.of_type(e.type);
      const bool only_own_home = valid.size() == 1 && valid.front() == agent.home_poi;
      if (valid.empty() || only_own_home) {
        throw AssignmentError("no valid POI for activity type " +
                              std::string(to_string(e.type)));
      }
      std::optional<PoiId> pick;
      if (uniform01(rng) < explore_probability(cfg, state.distinct())) {
        pick = choose_explore(state, catalog, e.type, here, cfg, rng);
        if (!pick) pick = choose_return(state, catalog, e.type, rng);
      } else {
        pick = choose_return(state, catalog, e.type, rng);
        if (!pick) pick = choose_explore(state, catalog, e.type, here, cfg, rng);
      }
      chosen = *pick;
    }
    state.record(chosen);
    here = catalog.location(chosen);
    out.entries.push_back({e, chosen});
  }
  return out;
}

struct AssignmentResult {
  std::vector<AssignedChain> chains;
  std::vector<AgentLocationState> states;
};

// Assigns every agent's chain; chains[i] must belong to agents[i].
inline AssignmentResult assign_all(std::span<const ActivityChain> chains,
                                   std::span<const AgentRecord> agents,
                                   const world::PoiCatalog& catalog,
                                   const AssignConfig& cfg, std::uint64_t seed) {
  if (chains.size() != agents.size()) {
    throw AssignmentError("chain and agent counts differ");
  }
  AssignmentResult r;
  r.chains.resize(chains.size());
  r.states.resize(chains.size());
  parallel_for(chains.size(), [&](std::size_t i) {
    if (chains[i].agent_id != agents[i].agent_id) {
      throw AssignmentError("chain/agent order mismatch at " + std::to_string(i));
    }
    r.states[i] = AgentLocationState::for_agent(agents[i]);
    r.chains[i] = assign_pois(chains[i], agents[i], catalog, r.states[i], cfg, seed);
  });
  return r;
}

}  // namespace mobsim::assign
