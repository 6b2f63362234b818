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
#include <string>
#include <vector>

#include "mobsim/domain/records.hpp"
#include "mobsim/error.hpp"
#include "mobsim/parallel.hpp"
#include "mobsim/random.hpp"
#include "mobsim/routing/travel_time.hpp"
#include "mobsim/world/poi_catalog.hpp"

namespace mobsim::world {

inline constexpr std::array<const char*, 5> kAgeBands{"0-17", "18-34", "35-54",
                                                      "55-64", "65+"};

struct PopulationConfig {
  double worker_fraction = 0.6;
  double commute_median_min = 30.0;
  double commute_sigma = 0.45;  // log-space spread of per-worker targets
  int max_occupancy = 4;        // agents per residence
  std::array<double, 5> age_band_weights{0.22, 0.26, 0.27, 0.12, 0.13};
  std::array<double, 5> household_size_weights{0.25, 0.30, 0.18, 0.16, 0.11};
  std::array<double, 5> student_rate_by_age{0.9, 0.15, 0.03, 0.01, 0.0};
  int work_candidates = 5;
};

// Agents 1..n. Homes are drawn uniformly over residences subject to the
// occupancy cap; demographics and workplaces use per-agent streams. Each
// worker draws a target commute from a log-normal around the configured
// median and takes a workplace whose network time is among the closest to
// that target.
inline std::vector<AgentRecord> generate_population(
    std::int64_t n_agents, const PoiCatalog& catalog,
    const routing::TravelTimeOracle& oracle, const PopulationConfig& cfg,
    std::uint64_t seed) {
  if (n_agents < 1) throw ConfigError("population needs at least one agent");
  const auto homes = catalog.of_type(ActivityType::kHome);
  const auto works = catalog.of_type(ActivityType::kWork);
  if (homes.empty()) throw ConfigError("catalog has no Home POIs");
  if (cfg.worker_fraction > 0.0 && works.empty()) {
    throw ConfigError("catalog has no Work POIs");
  }
  if (cfg.max_occupancy < 1 ||
      n_agents > static_cast<std::int64_t>(homes.size()) * cfg.max_occupancy) {
    throw ConfigError("population of " + std::to_string(n_agents) +
                      " exceeds residence capacity");
  }

  std::vector<AgentRecord> agents(static_cast<std::size_t>(n_agents));
  Rng home_rng = make_rng(seed, "population.home");
  std::vector<int> occupancy(homes.size(), 0);
  std::uniform_int_distribution<std::size_t> pick(0, homes.size() - 1);
  for (std::size_t i = 0; i < agents.size(); ++i) {
    std::size_t h = pick(home_rng);
    for (int tries = 0; occupancy[h] >= cfg.max_occupancy; ++tries) {
      h = tries < 64 ? pick(home_rng) : (h + 1) % homes.size();
    }
    ++occupancy[h];
    agents[i].agent_id = static_cast<AgentId>(i + 1);
    agents[i].home_poi = homes[h];
  }

  std::vector<NodeIndex> work_nodes(works.size());
  for (std::size_t k = 0; k < works.size(); ++k) {
    work_nodes[k] = oracle.snap(catalog.location(works[k]));
  }

  parallel_for(agents.size(), [&](std::size_t i) {
    auto& a = agents[i];
    Rng rng = make_rng(seed, "population.agent", static_cast<std::uint64_t>(a.agent_id));
    auto& d = a.demographics;
    const std::size_t band = sample_weighted(rng, cfg.age_band_weights);
    d.age_band = kAgeBands[band];
    d.household_size = static_cast<int>(sample_weighted(rng, cfg.household_size_weights)) + 1;
    d.worker = uniform01(rng) < cfg.worker_fraction;
    d.student = uniform01(rng) < cfg.student_rate_by_age[band];
    if (!d.worker) return;

    const double target_s =
        lognormal_median(rng, cfg.commute_median_min * 60.0, cfg.commute_sigma);
    const auto dist = oracle.single_source(oracle.snap(catalog.location(a.home_poi)));
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(works.size());
    for (std::size_t k = 0; k < works.size(); ++k) {
      const double t = dist[work_nodes[k]];
      if (t == routing::kUnreachable) continue;
      ranked.push_back({std::abs(t + oracle.padding_s() - target_s), k});
    }
    if (ranked.empty()) return;  // isolated home: leave as non-commuting worker
    const std::size_t keep =
        std::min<std::size_t>(ranked.size(), std::max(1, cfg.work_candidates));
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<long>(keep),
                      ranked.end());
    std::uniform_int_distribution<std::size_t> choose(0, keep - 1);
    a.work_poi = works[ranked[choose(rng)].second];
  });
  return agents;
}

}  // namespace mobsim::world
