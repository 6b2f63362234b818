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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mobsim/activity/model.hpp"
#include "mobsim/assign/poi_assign.hpp"
#include "mobsim/detect/detectors.hpp"
#include "mobsim/error.hpp"
#include "mobsim/eval/evaluate.hpp"
#include "mobsim/inject/injector.hpp"
#include "mobsim/io/table.hpp"
#include "mobsim/routing/travel_time.hpp"
#include "mobsim/world/population.hpp"
#include "mobsim/world/road_graph.hpp"

namespace mobsim::io {

using Json = nlohmann::json;

struct PipelineConfig {
  std::uint64_t seed = 42;
  std::int64_t n_agents = 1000;
  FileFormat format = FileFormat::kColumnar;
  std::string out_dir = "out";
  SimClock clock;
  world::PoiConfig poi;
  bool explicit_poi_counts = false;  // otherwise counts scale with n_agents
  world::GridGraphConfig grid;
  std::string road_graph_path;      // edge list; empty means the synthetic grid
  world::PopulationConfig population;
  std::string activity_model_path;  // JSON model; empty means the default model
  assign::AssignConfig assign;
  routing::RoutingConfig routing;
  inject::InjectionPlan injection;
  std::vector<std::string> detectors{"visit_rate", "novelty"};
  eval::AgentLabelRule agent_rule;

  // POI counts actually used for generation.
  std::array<std::int64_t, kNumActivityTypes> poi_counts() const {
    return explicit_poi_counts ? poi.counts : world::scaled_poi_counts(n_agents);
  }
};

namespace detail {

// Rejects keys outside `allowed` so typos fail loudly.
inline void check_keys(const Json& j, const std::string& where,
                       std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

template <class T>
void read(const Json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

inline std::string resolve(const std::string& path, const std::filesystem::path& base) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_relative()) p = base / p;
  return p.lexically_normal().string();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Activity model JSON:
// {
//   "transitions": {"weekday": {"<From>": [[16 probs] x 48 slots], ...},
//                   "weekend": {...}},
//   "durations": {"<Type>": {"median_min": m, "sigma": s}, ...},
//   "first_departure": {"weekday": {"mean_min", "sd_min", "earliest_min",
//                       "latest_min"}, "weekend": {...}},
//   "travel_gap": {"median_min": m, "sigma": s},
//   "max_entries_per_day": 24
// }
// Types use their canonical names; probabilities follow enum order.

inline const char* day_class_name(activity::DayClass dc) {
  return dc == activity::DayClass::kWeekday ? "weekday" : "weekend";
}

inline Json model_to_json(const activity::ActivityModel& m) {
  using activity::DayClass;
  Json j;
  for (auto dc : {DayClass::kWeekday, DayClass::kWeekend}) {
    Json by_from = Json::object();
    for (auto from : kAllActivityTypes) {
      Json slots = Json::array();
      for (int s = 0; s < activity::kSlots; ++s) {
        const auto& r = m.row(dc, s, from);
        slots.push_back(std::vector<double>(r.begin(), r.end()));
      }
      by_from[std::string(to_string(from))] = std::move(slots);
    }
    j["transitions"][day_class_name(dc)] = std::move(by_from);
    const auto& a = m.first_departure(dc);
    j["first_departure"][day_class_name(dc)] = {{"mean_min", a.mean_min},
                                                {"sd_min", a.sd_min},
                                                {"earliest_min", a.earliest_min},
                                                {"latest_min", a.latest_min}};
  }
  for (auto t : kAllActivityTypes) {
    const auto& d = m.duration(t);
    j["durations"][std::string(to_string(t))] = {{"median_min", d.median_min},
                                                 {"sigma", d.sigma}};
  }
  j["travel_gap"] = {{"median_min", m.travel_gap().median_min},
                     {"sigma", m.travel_gap().sigma}};
  j["max_entries_per_day"] = m.max_entries_per_day();
  return j;
}

inline activity::ActivityModel model_from_json(const Json& j) {
  using activity::DayClass;
  detail::check_keys(j, "activity model",
                     {"transitions", "durations", "first_departure", "travel_gap",
                      "max_entries_per_day"});
  activity::ActivityModel m;
  if (!j.contains("transitions")) throw ConfigError("activity model lacks transitions");
  const auto& tr = j.at("transitions");
  detail::check_keys(tr, "transitions", {"weekday", "weekend"});
  for (auto dc : {DayClass::kWeekday, DayClass::kWeekend}) {
    const char* dn = day_class_name(dc);
    if (!tr.contains(dn)) throw ConfigError(std::string("transitions lack ") + dn);
    const auto& by_from = tr.at(dn);
    for (auto it = by_from.begin(); it != by_from.end(); ++it) {
      const auto from = try_parse_activity(it.key());
      if (!from) throw ConfigError("unknown activity type '" + it.key() + "' in transitions");
      const auto& slots = it.value();
      if (!slots.is_array() || slots.size() != activity::kSlots) {
        throw ConfigError("transitions." + std::string(dn) + "." + it.key() + " needs " +
                          std::to_string(activity::kSlots) + " slots");
      }
      for (int s = 0; s < activity::kSlots; ++s) {
        const auto& row = slots[static_cast<std::size_t>(s)];
        if (!row.is_array() || row.size() != kNumActivityTypes) {
          throw ConfigError("transition rows need " + std::to_string(kNumActivityTypes) +
                            " probabilities");
        }
        auto& dst = m.row(dc, s, *from);
        for (std::size_t k = 0; k < kNumActivityTypes; ++k) dst[k] = row[k].get<double>();
      }
    }
  }
  if (j.contains("durations")) {
    const auto& ds = j.at("durations");
    for (auto it = ds.begin(); it != ds.end(); ++it) {
      const auto t = try_parse_activity(it.key());
      if (!t) throw ConfigError("unknown activity type '" + it.key() + "' in durations");
      detail::check_keys(it.value(), "durations." + it.key(), {"median_min", "sigma"});
      detail::read(it.value(), "median_min", m.duration(*t).median_min, "durations");
      detail::read(it.value(), "sigma", m.duration(*t).sigma, "durations");
    }
  }
  if (j.contains("first_departure")) {
    const auto& fd = j.at("first_departure");
    detail::check_keys(fd, "first_departure", {"weekday", "weekend"});
    for (auto dc : {DayClass::kWeekday, DayClass::kWeekend}) {
      if (!fd.contains(day_class_name(dc))) continue;
      const auto& a = fd.at(day_class_name(dc));
      detail::check_keys(a, "first_departure", {"mean_min", "sd_min", "earliest_min", "latest_min"});
      auto& dst = m.first_departure(dc);
      detail::read(a, "mean_min", dst.mean_min, "first_departure");
      detail::read(a, "sd_min", dst.sd_min, "first_departure");
      detail::read(a, "earliest_min", dst.earliest_min, "first_departure");
      detail::read(a, "latest_min", dst.latest_min, "first_departure");
    }
  }
  if (j.contains("travel_gap")) {
    detail::check_keys(j.at("travel_gap"), "travel_gap", {"median_min", "sigma"});
    detail::read(j.at("travel_gap"), "median_min", m.travel_gap().median_min, "travel_gap");
    detail::read(j.at("travel_gap"), "sigma", m.travel_gap().sigma, "travel_gap");
  }
  if (j.contains("max_entries_per_day")) {
    int n = 0;
    detail::read(j, "max_entries_per_day", n, "activity model");
    m.set_max_entries_per_day(n);
  }
  m.validate();
  return m;
}

inline void save_model(const activity::ActivityModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << model_to_json(m).dump(1) << '\n';
}

inline activity::ActivityModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open activity model '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("activity model '" + path + "' is not valid JSON: " + e.what());
  }
  return model_from_json(j);
}

// ---------------------------------------------------------------------------
// Pipeline configuration. Every section is optional; relative paths are
// resolved against `base_dir` (the config file's directory).

inline PipelineConfig config_from_json(const Json& j, const std::filesystem::path& base_dir) {
  using detail::check_keys;
  using detail::read;
  PipelineConfig c;
  check_keys(j, "config",
             {"seed", "n_agents", "format", "out", "clock", "world", "activity", "assign",
              "routing", "injection", "detect", "evaluate"});
  if (!j.contains("seed")) throw ConfigError("config must set a seed");
  read(j, "seed", c.seed, "config");
  read(j, "n_agents", c.n_agents, "config");
  if (c.n_agents < 1) throw ConfigError("n_agents must be at least 1");
  if (j.contains("format")) c.format = parse_format(j.at("format").get<std::string>());
  read(j, "out", c.out_dir, "config");
  c.out_dir = detail::resolve(c.out_dir, base_dir);

  if (j.contains("clock")) {
    check_keys(j.at("clock"), "clock", {"start"});
    std::string start;
    read(j.at("clock"), "start", start, "clock");
    if (!start.empty()) c.clock = SimClock(parse_iso(start));
  }

  if (j.contains("world")) {
    const auto& w = j.at("world");
    check_keys(w, "world", {"bbox", "poi_counts", "num_centers", "center_sigma_km",
                            "background_fraction", "grid", "road_graph", "population"});
    if (w.contains("bbox")) {
      const auto& b = w.at("bbox");
      check_keys(b, "world.bbox", {"min_lat", "min_lon", "max_lat", "max_lon"});
      read(b, "min_lat", c.poi.bbox.min_lat, "world.bbox");
      read(b, "min_lon", c.poi.bbox.min_lon, "world.bbox");
      read(b, "max_lat", c.poi.bbox.max_lat, "world.bbox");
      read(b, "max_lon", c.poi.bbox.max_lon, "world.bbox");
    }
    if (w.contains("poi_counts")) {
      c.explicit_poi_counts = true;
      c.poi.counts.fill(0);
      const auto& pc = w.at("poi_counts");
      if (!pc.is_object()) throw ConfigError("world.poi_counts must be an object");
      for (auto it = pc.begin(); it != pc.end(); ++it) {
        const auto t = try_parse_activity(it.key());
        if (!t) throw ConfigError("unknown activity type '" + it.key() + "' in poi_counts");
        c.poi.counts[index_of(*t)] = it.value().get<std::int64_t>();
      }
    }
    read(w, "num_centers", c.poi.num_centers, "world");
    read(w, "center_sigma_km", c.poi.center_sigma_km, "world");
    read(w, "background_fraction", c.poi.background_fraction, "world");
    if (w.contains("grid")) {
      const auto& g = w.at("grid");
      check_keys(g, "world.grid", {"rows", "cols", "spacing_m", "speed_mps", "arterial_every",
                                   "arterial_speed_mps", "center_lat", "center_lon"});
      read(g, "rows", c.grid.rows, "world.grid");
      read(g, "cols", c.grid.cols, "world.grid");
      read(g, "spacing_m", c.grid.spacing_m, "world.grid");
      read(g, "speed_mps", c.grid.speed_mps, "world.grid");
      read(g, "arterial_every", c.grid.arterial_every, "world.grid");
      read(g, "arterial_speed_mps", c.grid.arterial_speed_mps, "world.grid");
      read(g, "center_lat", c.grid.center.lat, "world.grid");
      read(g, "center_lon", c.grid.center.lon, "world.grid");
    }
    read(w, "road_graph", c.road_graph_path, "world");
    c.road_graph_path = detail::resolve(c.road_graph_path, base_dir);
    if (w.contains("population")) {
      const auto& p = w.at("population");
      check_keys(p, "world.population",
                 {"worker_fraction", "commute_median_min", "commute_sigma", "max_occupancy",
                  "work_candidates"});
      read(p, "worker_fraction", c.population.worker_fraction, "world.population");
      read(p, "commute_median_min", c.population.commute_median_min, "world.population");
      read(p, "commute_sigma", c.population.commute_sigma, "world.population");
      read(p, "max_occupancy", c.population.max_occupancy, "world.population");
      read(p, "work_candidates", c.population.work_candidates, "world.population");
    }
  }

  if (j.contains("activity")) {
    check_keys(j.at("activity"), "activity", {"model"});
    read(j.at("activity"), "model", c.activity_model_path, "activity");
    c.activity_model_path = detail::resolve(c.activity_model_path, base_dir);
  }
  if (j.contains("assign")) {
    const auto& a = j.at("assign");
    check_keys(a, "assign", {"rho", "gamma", "beta", "min_distance_km"});
    read(a, "rho", c.assign.rho, "assign");
    read(a, "gamma", c.assign.gamma, "assign");
    read(a, "beta", c.assign.beta, "assign");
    read(a, "min_distance_km", c.assign.min_distance_km, "assign");
  }
  if (j.contains("routing")) {
    const auto& r = j.at("routing");
    check_keys(r, "routing", {"access_padding_s", "fallback_speed_mps", "cache"});
    read(r, "access_padding_s", c.routing.access_padding_s, "routing");
    read(r, "fallback_speed_mps", c.routing.fallback_speed_mps, "routing");
    read(r, "cache", c.routing.cache, "routing");
  }
  if (j.contains("injection")) {
    const auto& p = j.at("injection");
    check_keys(p, "injection",
               {"target_agent_prevalence", "target_staypoint_prevalence", "recurring_fraction",
                "repeat_min", "repeat_max", "repeat_floor", "repeat_limit",
                "novel_visit_probability", "frequency_shift_fraction", "min_visit_hours",
                "max_visit_hours", "jitter_minutes", "tolerance", "attempts_per_agent"});
    auto& ip = c.injection;
    read(p, "target_agent_prevalence", ip.target_agent_prevalence, "injection");
    read(p, "target_staypoint_prevalence", ip.target_staypoint_prevalence, "injection");
    read(p, "recurring_fraction", ip.recurring_fraction, "injection");
    read(p, "repeat_min", ip.repeat_min, "injection");
    read(p, "repeat_max", ip.repeat_max, "injection");
    read(p, "repeat_floor", ip.repeat_floor, "injection");
    read(p, "repeat_limit", ip.repeat_limit, "injection");
    read(p, "novel_visit_probability", ip.novel_visit_probability, "injection");
    read(p, "frequency_shift_fraction", ip.frequency_shift_fraction, "injection");
    read(p, "min_visit_hours", ip.min_visit_hours, "injection");
    read(p, "max_visit_hours", ip.max_visit_hours, "injection");
    read(p, "jitter_minutes", ip.jitter_minutes, "injection");
    read(p, "tolerance", ip.tolerance, "injection");
    read(p, "attempts_per_agent", ip.attempts_per_agent, "injection");
    ip.validate();
  }
  if (j.contains("detect")) {
    check_keys(j.at("detect"), "detect", {"detectors"});
    read(j.at("detect"), "detectors", c.detectors, "detect");
    for (const auto& d : c.detectors) detect::detector_by_name(d);
  }
  if (j.contains("evaluate")) {
    const auto& e = j.at("evaluate");
    check_keys(e, "evaluate", {"agent_threshold"});
    if (e.contains("agent_threshold")) {
      const auto& t = e.at("agent_threshold");
      check_keys(t, "evaluate.agent_threshold", {"kind", "value"});
      std::string kind = "count";
      read(t, "kind", kind, "evaluate.agent_threshold");
      if (kind == "count") {
        c.agent_rule.kind = eval::AgentLabelRule::Kind::kCount;
      } else if (kind == "proportion") {
        c.agent_rule.kind = eval::AgentLabelRule::Kind::kProportion;
      } else {
        throw ConfigError("agent_threshold.kind must be count or proportion");
      }
      read(t, "value", c.agent_rule.value, "evaluate.agent_threshold");
    }
  }

  for (const auto* path : {&c.road_graph_path, &c.activity_model_path}) {
    if (!path->empty() && !std::filesystem::exists(*path)) {
      throw ConfigError("referenced file does not exist: " + *path);
    }
  }
  return c;
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j, std::filesystem::path(path).parent_path());
}

}  // namespace mobsim::io
