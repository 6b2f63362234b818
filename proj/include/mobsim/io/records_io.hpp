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
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "mobsim/detect/detectors.hpp"
#include "mobsim/domain/records.hpp"
#include "mobsim/error.hpp"
#include "mobsim/inject/injector.hpp"
#include "mobsim/io/table.hpp"

namespace mobsim::io {

// ---------------------------------------------------------------------------
// Schemas

inline const Schema& staypoint_schema(bool labelled) {
  static const Schema plain{{"agent_id", ColumnType::kInt64},
                            {"poi_id", ColumnType::kInt64},
                            {"start_datetime", ColumnType::kString},
                            {"end_datetime", ColumnType::kString}};
  static const Schema with_labels{{"agent_id", ColumnType::kInt64},
                                  {"poi_id", ColumnType::kInt64},
                                  {"start_datetime", ColumnType::kString},
                                  {"end_datetime", ColumnType::kString},
                                  {"anomaly", ColumnType::kBool},
                                  {"anomaly_type", ColumnType::kInt64}};
  return labelled ? with_labels : plain;
}

inline const Schema& poi_schema() {
  static const Schema s{{"poi_id", ColumnType::kInt64},
                        {"name", ColumnType::kString},
                        {"latitude", ColumnType::kFloat64},
                        {"longitude", ColumnType::kFloat64},
                        {"act_types", ColumnType::kString}};
  return s;
}

inline const Schema& demographics_schema() {
  static const Schema s{{"agent_id", ColumnType::kInt64},
                        {"age_band", ColumnType::kString},
                        {"household_size", ColumnType::kInt64},
                        {"worker", ColumnType::kBool},
                        {"student", ColumnType::kBool}};
  return s;
}

// Demographics plus anchors; work_poi is -1 for agents without a workplace.
inline const Schema& agent_schema() {
  static const Schema s{{"agent_id", ColumnType::kInt64},
                        {"age_band", ColumnType::kString},
                        {"household_size", ColumnType::kInt64},
                        {"worker", ColumnType::kBool},
                        {"student", ColumnType::kBool},
                        {"home_poi", ColumnType::kInt64},
                        {"work_poi", ColumnType::kInt64}};
  return s;
}

inline const Schema& chain_schema(bool assigned) {
  static const Schema plain{{"agent_id", ColumnType::kInt64},
                            {"day", ColumnType::kInt64},
                            {"act_type", ColumnType::kString},
                            {"start_min", ColumnType::kInt64},
                            {"end_min", ColumnType::kInt64}};
  static const Schema with_poi{{"agent_id", ColumnType::kInt64},
                               {"day", ColumnType::kInt64},
                               {"act_type", ColumnType::kString},
                               {"start_min", ColumnType::kInt64},
                               {"end_min", ColumnType::kInt64},
                               {"poi_id", ColumnType::kInt64}};
  return assigned ? with_poi : plain;
}

inline const Schema& manifest_schema() {
  static const Schema s{{"agent_id", ColumnType::kInt64},   {"kind", ColumnType::kString},
                        {"pattern", ColumnType::kString},   {"poi_id", ColumnType::kInt64},
                        {"repeat_count", ColumnType::kInt64}, {"cadence_days", ColumnType::kInt64},
                        {"injected", ColumnType::kString},  {"modified", ColumnType::kString}};
  return s;
}

// ---------------------------------------------------------------------------
// Staypoints

inline Table staypoints_to_table(std::span<const Staypoint> rows, bool labelled) {
  Table t(staypoint_schema(labelled));
  auto& agent = t.col<std::int64_t>("agent_id");
  auto& poi = t.col<std::int64_t>("poi_id");
  auto& start = t.col<std::string>("start_datetime");
  auto& end = t.col<std::string>("end_datetime");
  for (const auto& sp : rows) {
    agent.push_back(sp.agent_id);
    poi.push_back(sp.poi_id);
    start.push_back(format_iso(sp.start));
    end.push_back(format_iso(sp.end));
  }
  if (labelled) {
    auto& flag = t.col<std::uint8_t>("anomaly");
    auto& type = t.col<std::int64_t>("anomaly_type");
    for (const auto& sp : rows) {
      flag.push_back(sp.anomaly ? 1 : 0);
      type.push_back(static_cast<std::int64_t>(sp.anomaly_type));
    }
  }
  return t;
}

inline std::vector<Staypoint> table_to_staypoints(const Table& t, bool labelled) {
  require_schema(t, staypoint_schema(labelled),
                 labelled ? "anomalous staypoint file" : "staypoint file");
  const auto& agent = t.col<std::int64_t>("agent_id");
  const auto& poi = t.col<std::int64_t>("poi_id");
  const auto& start = t.col<std::string>("start_datetime");
  const auto& end = t.col<std::string>("end_datetime");
  std::vector<Staypoint> out(agent.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].agent_id = agent[i];
    out[i].poi_id = poi[i];
    out[i].start = parse_iso(start[i]);
    out[i].end = parse_iso(end[i]);
  }
  if (labelled) {
    const auto& flag = t.col<std::uint8_t>("anomaly");
    const auto& type = t.col<std::int64_t>("anomaly_type");
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (type[i] < 0 || type[i] > 2) {
        throw SchemaError("anomaly_type " + std::to_string(type[i]) + " out of range");
      }
      out[i].anomaly = flag[i] != 0;
      out[i].anomaly_type = static_cast<AnomalyType>(type[i]);
      if (out[i].anomaly != (type[i] != 0)) {
        throw SchemaError("anomaly flag disagrees with anomaly_type in row " +
                          std::to_string(i + 1));
      }
    }
  }
  return out;
}

inline void write_staypoints(std::span<const Staypoint> rows, const std::string& path,
                             bool labelled) {
  write_table(staypoints_to_table(rows, labelled), path);
}

inline std::vector<Staypoint> read_staypoints(const std::string& path, bool labelled) {
  return table_to_staypoints(
      read_table(path, staypoint_schema(labelled),
                 labelled ? "anomalous staypoint file" : "staypoint file"),
      labelled);
}

// ---------------------------------------------------------------------------
// POIs and agents

inline Table pois_to_table(std::span<const PoiRecord> pois) {
  Table t(poi_schema());
  std::unordered_set<PoiId> seen;
  for (const auto& p : pois) {
    if (!seen.insert(p.poi_id).second) {
      throw SchemaError("duplicate poi_id " + std::to_string(p.poi_id));
    }
    t.col<std::int64_t>("poi_id").push_back(p.poi_id);
    t.col<std::string>("name").push_back(p.name);
    t.col<double>("latitude").push_back(p.latitude);
    t.col<double>("longitude").push_back(p.longitude);
    t.col<std::string>("act_types").push_back(p.act_types.to_string());
  }
  return t;
}

inline std::vector<PoiRecord> table_to_pois(const Table& t) {
  require_schema(t, poi_schema(), "poi file");
  const auto& id = t.col<std::int64_t>("poi_id");
  const auto& name = t.col<std::string>("name");
  const auto& lat = t.col<double>("latitude");
  const auto& lon = t.col<double>("longitude");
  const auto& types = t.col<std::string>("act_types");
  std::vector<PoiRecord> out(id.size());
  std::unordered_set<PoiId> seen;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!seen.insert(id[i]).second) {
      throw SchemaError("duplicate poi_id " + std::to_string(id[i]));
    }
    out[i] = {id[i], name[i], lat[i], lon[i], ActivitySet::parse(types[i])};
  }
  return out;
}

inline Table demographics_to_table(std::span<const AgentRecord> agents, bool with_anchors) {
  Table t(with_anchors ? agent_schema() : demographics_schema());
  for (const auto& a : agents) {
    t.col<std::int64_t>("agent_id").push_back(a.agent_id);
    t.col<std::string>("age_band").push_back(a.demographics.age_band);
    t.col<std::int64_t>("household_size").push_back(a.demographics.household_size);
    t.col<std::uint8_t>("worker").push_back(a.demographics.worker ? 1 : 0);
    t.col<std::uint8_t>("student").push_back(a.demographics.student ? 1 : 0);
    if (with_anchors) {
      t.col<std::int64_t>("home_poi").push_back(a.home_poi);
      t.col<std::int64_t>("work_poi").push_back(a.work_poi ? *a.work_poi : -1);
    }
  }
  return t;
}

inline std::vector<AgentRecord> table_to_agents(const Table& t, bool with_anchors) {
  require_schema(t, with_anchors ? agent_schema() : demographics_schema(),
                 with_anchors ? "agent file" : "demographics file");
  const auto& id = t.col<std::int64_t>("agent_id");
  std::vector<AgentRecord> out(id.size());
  std::unordered_set<AgentId> seen;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!seen.insert(id[i]).second) {
      throw SchemaError("duplicate agent_id " + std::to_string(id[i]));
    }
    auto& a = out[i];
    a.agent_id = id[i];
    a.demographics.age_band = t.col<std::string>("age_band")[i];
    a.demographics.household_size =
        static_cast<int>(t.col<std::int64_t>("household_size")[i]);
    a.demographics.worker = t.col<std::uint8_t>("worker")[i] != 0;
    a.demographics.student = t.col<std::uint8_t>("student")[i] != 0;
    if (with_anchors) {
      a.home_poi = t.col<std::int64_t>("home_poi")[i];
      const auto w = t.col<std::int64_t>("work_poi")[i];
      if (w >= 0) a.work_poi = w;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Chains

inline Table chains_to_table(std::span<const ActivityChain> chains) {
  Table t(chain_schema(false));
  for (const auto& c : chains) {
    for (const auto& e : c.entries) {
      t.col<std::int64_t>("agent_id").push_back(c.agent_id);
      t.col<std::int64_t>("day").push_back(e.day);
      t.col<std::string>("act_type").push_back(std::string(to_string(e.type)));
      t.col<std::int64_t>("start_min").push_back(e.start_min);
      t.col<std::int64_t>("end_min").push_back(e.end_min);
    }
  }
  return t;
}

inline Table assigned_chains_to_table(std::span<const AssignedChain> chains) {
  Table t(chain_schema(true));
  for (const auto& c : chains) {
    for (const auto& ae : c.entries) {
      t.col<std::int64_t>("agent_id").push_back(c.agent_id);
      t.col<std::int64_t>("day").push_back(ae.entry.day);
      t.col<std::string>("act_type").push_back(std::string(to_string(ae.entry.type)));
      t.col<std::int64_t>("start_min").push_back(ae.entry.start_min);
      t.col<std::int64_t>("end_min").push_back(ae.entry.end_min);
      t.col<std::int64_t>("poi_id").push_back(ae.poi_id);
    }
  }
  return t;
}

namespace detail {

// Rows of one agent are contiguous; chains follow first appearance order.
template <class Chain, class MakeEntry>
std::vector<Chain> group_chain_rows(const Table& t, MakeEntry make) {
  const auto& agent = t.col<std::int64_t>("agent_id");
  std::vector<Chain> out;
  for (std::size_t i = 0; i < agent.size(); ++i) {
    if (out.empty() || out.back().agent_id != agent[i]) {
      out.emplace_back();
      out.back().agent_id = agent[i];
    }
    out.back().entries.push_back(make(i));
  }
  return out;
}

inline ChainEntry chain_entry_at(const Table& t, std::size_t i) {
  return {static_cast<int>(t.col<std::int64_t>("day")[i]),
          parse_activity(t.col<std::string>("act_type")[i]),
          static_cast<int>(t.col<std::int64_t>("start_min")[i]),
          static_cast<int>(t.col<std::int64_t>("end_min")[i])};
}

}  // namespace detail

inline std::vector<ActivityChain> table_to_chains(const Table& t) {
  require_schema(t, chain_schema(false), "chain file");
  return detail::group_chain_rows<ActivityChain>(
      t, [&](std::size_t i) { return detail::chain_entry_at(t, i); });
}

inline std::vector<AssignedChain> table_to_assigned_chains(const Table& t) {
  require_schema(t, chain_schema(true), "assigned chain file");
  const auto& poi = t.col<std::int64_t>("poi_id");
  return detail::group_chain_rows<AssignedChain>(t, [&](std::size_t i) {
    return AssignedEntry{detail::chain_entry_at(t, i), poi[i]};
  });
}

// ---------------------------------------------------------------------------
// Injection manifest

namespace detail {

inline std::string join_indices(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k > 0) s += ';';
    s += std::to_string(v[k]);
  }
  return s;
}

inline std::vector<std::size_t> split_indices(const std::string& s) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t semi = std::min(s.find(';', pos), s.size());
    out.push_back(parse_number<std::size_t>(s.substr(pos, semi - pos), 0, "indices"));
    pos = semi + 1;
  }
  return out;
}

}  // namespace detail

inline Table manifest_to_table(std::span<const inject::AnomalyRecord> records) {
  Table t(manifest_schema());
  for (const auto& r : records) {
    t.col<std::int64_t>("agent_id").push_back(r.agent_id);
    t.col<std::string>("kind").push_back(inject::to_string(r.kind));
    t.col<std::string>("pattern").push_back(r.pattern);
    t.col<std::int64_t>("poi_id").push_back(r.poi_id);
    t.col<std::int64_t>("repeat_count").push_back(r.repeat_count);
    t.col<std::int64_t>("cadence_days").push_back(r.cadence_days);
    t.col<std::string>("injected").push_back(detail::join_indices(r.injected));
    t.col<std::string>("modified").push_back(detail::join_indices(r.modified));
  }
  return t;
}

inline std::vector<inject::AnomalyRecord> table_to_manifest(const Table& t) {
  require_schema(t, manifest_schema(), "manifest file");
  std::vector<inject::AnomalyRecord> out(t.num_rows());
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& r = out[i];
    r.agent_id = t.col<std::int64_t>("agent_id")[i];
    r.kind = inject::parse_anomaly_kind(t.col<std::string>("kind")[i]);
    r.pattern = t.col<std::string>("pattern")[i];
    r.poi_id = t.col<std::int64_t>("poi_id")[i];
    r.repeat_count = static_cast<int>(t.col<std::int64_t>("repeat_count")[i]);
    r.cadence_days = static_cast<int>(t.col<std::int64_t>("cadence_days")[i]);
    r.injected = detail::split_indices(t.col<std::string>("injected")[i]);
    r.modified = detail::split_indices(t.col<std::string>("modified")[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Score files: CSV with header level,agent_id,staypoint_index,score. The
// index is empty on agent rows; scores use 17 significant digits.

inline constexpr const char* kScoreHeader = "level,agent_id,staypoint_index,score";

inline void write_scores(std::span<const detect::ScoredItem> items, std::ostream& out) {
  out << kScoreHeader << '\n';
  for (const auto& it : items) {
    out << detect::to_string(it.level) << ',' << it.agent_id << ',';
    if (it.staypoint_index) out << *it.staypoint_index;
    out << ',' << detail::format_double(it.score) << '\n';
  }
}

inline std::vector<detect::ScoredItem> read_scores(std::istream& in) {
  std::vector<std::string> f;
  std::size_t line = 0;
  if (!detail::read_record(in, f, line)) throw SchemaError("score file is empty");
  const std::vector<std::string> expected{"level", "agent_id", "staypoint_index", "score"};
  if (f != expected) {
    std::string got;
    for (std::size_t k = 0; k < f.size() && k < 8; ++k) got += (k ? "," : "") + f[k];
    throw SchemaError("score file header must be '" + std::string(kScoreHeader) +
                      "', got '" + got + "'");
  }
  std::vector<detect::ScoredItem> out;
  while (detail::read_record(in, f, line)) {
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != 4) throw ParseError("expected 4 fields", line);
    detect::ScoredItem it;
    it.level = detect::parse_level(f[0]);
    it.agent_id = detail::parse_number<std::int64_t>(f[1], line, "agent_id");
    if (it.level == detect::Level::kStaypoint) {
      it.staypoint_index = detail::parse_number<std::size_t>(f[2], line, "staypoint_index");
    } else if (!f[2].empty()) {
      throw ParseError("agent rows take no staypoint_index", line);
    }
    it.score = detail::parse_number<double>(f[3], line, "score");
    if (!std::isfinite(it.score)) throw ParseError("score is not finite", line);
    out.push_back(it);
  }
  return out;
}

inline void write_scores(std::span<const detect::ScoredItem> items, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  write_scores(items, out);
}

inline std::vector<detect::ScoredItem> read_scores(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot open " + path);
  return read_scores(in);
}

}  // namespace mobsim::io
