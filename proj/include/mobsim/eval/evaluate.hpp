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
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mobsim/detect/detectors.hpp"
#include "mobsim/domain/grouping.hpp"
#include "mobsim/error.hpp"
#include "mobsim/eval/metrics.hpp"

namespace mobsim::eval {

using detect::Level;

// When an agent counts as anomalous: at least `value` anomalous staypoints
// (kCount) or at least that share of its staypoints (kProportion).
struct AgentLabelRule {
  enum class Kind { kCount, kProportion };
  Kind kind = Kind::kCount;
  double value = 1.0;

  bool positive(std::size_t anomalous, std::size_t total) const {
    if (kind == Kind::kCount) return static_cast<double>(anomalous) >= value;
    return total > 0 && static_cast<double>(anomalous) / static_cast<double>(total) >= value;
  }
};

struct Labels {
  // Aligned to the anomalous rows grouped by agent id, then by start.
  std::vector<AgentId> staypoint_agent;
  std::vector<std::size_t> staypoint_index;
  std::vector<int> staypoint;
  std::vector<AgentId> agents;  // ascending
  std::vector<int> agent;
};

inline Labels derive_labels(std::span<const Staypoint> truth,
                            std::span<const Staypoint> anomalous,
                            const AgentLabelRule& rule = {}) {
  std::set<AgentId> truth_agents, anomalous_agents;
  for (const auto& sp : truth) truth_agents.insert(sp.agent_id);
  for (const auto& sp : anomalous) anomalous_agents.insert(sp.agent_id);
  if (truth_agents != anomalous_agents) {
    std::string diff;
    for (AgentId a : truth_agents) {
      if (!anomalous_agents.contains(a)) diff += " -" + std::to_string(a);
    }
    for (AgentId a : anomalous_agents) {
      if (!truth_agents.contains(a)) diff += " +" + std::to_string(a);
    }
    throw MetricError("truth and anomalous files cover different agents:" + diff);
  }
  Labels out;
  for (const auto& seq : group_by_agent(anomalous)) {
    std::size_t bad = 0;
    for (std::size_t k = 0; k < seq.size(); ++k) {
      out.staypoint_agent.push_back(seq[k].agent_id);
      out.staypoint_index.push_back(k);
      out.staypoint.push_back(seq[k].anomaly ? 1 : 0);
      bad += seq[k].anomaly ? 1 : 0;
    }
    out.agents.push_back(seq.front().agent_id);
    out.agent.push_back(rule.positive(bad, seq.size()) ? 1 : 0);
  }
  return out;
}

struct EvalResult {
  Level level = Level::kStaypoint;
  std::string method;
  std::size_t n_items = 0;
  double prevalence = 0.0;
  double ap = 0.0;
  double aucroc = 0.0;
};

// Scores a detector's output against labels derived from the truth and
// anomalous test rows. Staypoint scores must cover every anomalous row
// exactly once; agent scores are taken from the input when present and
// otherwise max-pooled from the staypoint scores.
inline std::vector<EvalResult> evaluate_scores(const std::string& method,
                                               std::span<const detect::ScoredItem> scores,
                                               std::span<const Staypoint> truth,
                                               std::span<const Staypoint> anomalous,
                                               const AgentLabelRule& rule = {}) {
  const Labels labels = derive_labels(truth, anomalous, rule);
  std::map<std::pair<AgentId, std::size_t>, double> sp_scores;
  std::map<AgentId, double> agent_scores;
  for (const auto& it : scores) {
    if (it.level == Level::kStaypoint) {
      if (!it.staypoint_index) throw SchemaError("staypoint score without index");
      if (!sp_scores.emplace(std::pair{it.agent_id, *it.staypoint_index}, it.score).second) {
        throw SchemaError("duplicate staypoint score for agent " + std::to_string(it.agent_id));
      }
    } else if (!agent_scores.emplace(it.agent_id, it.score).second) {
      throw SchemaError("duplicate agent score for agent " + std::to_string(it.agent_id));
    }
  }
  if (sp_scores.size() != labels.staypoint.size()) {
    throw MetricError("score file has " + std::to_string(sp_scores.size()) +
                      " staypoint scores for " + std::to_string(labels.staypoint.size()) +
                      " staypoints");
  }
  std::vector<double> s(labels.staypoint.size());
  std::vector<detect::ScoredItem> sp_items;
  for (std::size_t k = 0; k < s.size(); ++k) {
    auto f = sp_scores.find({labels.staypoint_agent[k], labels.staypoint_index[k]});
    if (f == sp_scores.end()) {
      throw MetricError("missing score for agent " + std::to_string(labels.staypoint_agent[k]) +
                        " staypoint " + std::to_string(labels.staypoint_index[k]));
    }
    s[k] = f->second;
    sp_items.push_back({Level::kStaypoint, labels.staypoint_agent[k], labels.staypoint_index[k],
                        s[k]});
  }
  std::vector<double> a(labels.agents.size());
  if (agent_scores.empty()) {
    const auto pooled = detect::aggregate_to_agents(sp_items, labels.agents);
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = pooled[k].score;
  } else {
    for (std::size_t k = 0; k < a.size(); ++k) {
      auto f = agent_scores.find(labels.agents[k]);
      if (f == agent_scores.end()) {
        throw MetricError("missing agent score for agent " + std::to_string(labels.agents[k]));
      }
      a[k] = f->second;
    }
  }
  auto result = [&](Level level, const std::vector<double>& sc, const std::vector<int>& lb) {
    return EvalResult{level, method, lb.size(), prevalence(lb), average_precision(sc, lb),
                      aucroc(sc, lb)};
  };
  return {result(Level::kStaypoint, s, labels.staypoint),
          result(Level::kAgent, a, labels.agent)};
}

// Fixed-width table with the columns Level, Method, Anomaly Prevalence, AP,
// AUCROC.
inline std::string format_table(std::span<const EvalResult> results) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-10s %-12s %18s %8s %8s\n", "Level", "Method",
                "Anomaly Prevalence", "AP", "AUCROC");
  out += buf;
  for (const auto& r : results) {
    std::snprintf(buf, sizeof buf, "%-10s %-12s %18.6f %8.4f %8.4f\n", detect::to_string(r.level),
                  r.method.c_str(), r.prevalence, r.ap, r.aucroc);
    out += buf;
  }
  return out;
}

}  // namespace mobsim::eval
