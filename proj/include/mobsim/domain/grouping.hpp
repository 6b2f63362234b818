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
#include <span>
#include <vector>

#include "mobsim/domain/records.hpp"

namespace mobsim {

// Per-agent sequences ordered by agent id, each sorted by start time.
inline std::vector<std::vector<Staypoint>> group_by_agent(std::span<const Staypoint> rows) {
  std::vector<Staypoint> sorted(rows.begin(), rows.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const Staypoint& a, const Staypoint& b) {
    return a.agent_id != b.agent_id ? a.agent_id < b.agent_id : a.start < b.start;
  });
  std::vector<std::vector<Staypoint>> out;
  for (const auto& sp : sorted) {
    if (out.empty() || out.back().front().agent_id != sp.agent_id) out.emplace_back();
    out.back().push_back(sp);
  }
  return out;
}

// Per-agent sequences aligned to `agents`; agents without rows get an
// empty sequence and rows of unlisted agents are dropped.
inline std::vector<std::vector<Staypoint>> align_to_agents(std::span<const Staypoint> rows,
                                                           std::span<const AgentId> agents) {
  auto groups = group_by_agent(rows);
  std::vector<std::vector<Staypoint>> out(agents.size());
  std::size_t g = 0;
  std::vector<std::size_t> order(agents.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return agents[a] < agents[b]; });
  for (std::size_t i : order) {
    while (g < groups.size() && groups[g].front().agent_id < agents[i]) ++g;
    if (g < groups.size() && groups[g].front().agent_id == agents[i]) {
      out[i] = std::move(groups[g]);
      ++g;
    }
  }
  return out;
}

template <class Seqs>
std::vector<Staypoint> flatten(const Seqs& seqs) {
  std::vector<Staypoint> out;
  std::size_t n = 0;
  for (const auto& s : seqs) n += s.size();
  out.reserve(n);
  for (const auto& s : seqs) out.insert(out.end(), s.begin(), s.end());
  return out;
}

}  // namespace mobsim
