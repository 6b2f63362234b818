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

#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "mobsim/activity/chain_stats.hpp"
#include "mobsim/assign/mobility_stats.hpp"
#include "mobsim/error.hpp"
#include "mobsim/eval/evaluate.hpp"
#include "mobsim/inject/injector.hpp"

namespace mobsim::io {

// Flat "key=value" report, one pair per line, in insertion order.
class Report {
 public:
  Report& add(const std::string& key, const std::string& value) {
    rows_.emplace_back(key, value);
    return *this;
  }
  Report& add(const std::string& key, double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", value);
    return add(key, std::string(buf));
  }
  Report& add(const std::string& key, std::size_t value) {
    return add(key, std::to_string(value));
  }

  std::string str() const {
    std::string out;
    for (const auto& [k, v] : rows_) out += k + "=" + v + "\n";
    return out;
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << str();
  }

  const std::vector<std::pair<std::string, std::string>>& rows() const { return rows_; }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

inline Report chain_stats_report(const activity::ChainStatsReport& r) {
  Report out;
  out.add("jsd_activity_freq", r.jsd_activity_freq)
      .add("jsd_start_time", r.jsd_start_time)
      .add("jsd_end_time", r.jsd_end_time)
      .add("jsd_daily_count", r.jsd_daily_count)
      .add("jsd_duration", r.jsd_duration)
      .add("transition_similarity", r.transition_similarity);
  return out;
}

inline void add_summary(Report& out, const std::string& prefix,
                        const assign::DistributionSummary& s) {
  out.add(prefix + ".count", s.count)
      .add(prefix + ".median", s.median)
      .add(prefix + ".mean", s.mean)
      .add(prefix + ".p90", s.p90);
}

inline Report mobility_report(const assign::MobilityStats& m) {
  Report out;
  add_summary(out, "radius_of_gyration_km", m.radius_of_gyration_km);
  add_summary(out, "daily_distance_km", m.daily_distance_km);
  add_summary(out, "locations_per_day", m.locations_per_day);
  add_summary(out, "commute_minutes", m.commute_minutes);
  return out;
}

inline Table mobility_table(const assign::MobilityStats& m) {
  Table t({{"agent_id", ColumnType::kInt64},
           {"radius_of_gyration_km", ColumnType::kFloat64},
           {"mean_daily_distance_km", ColumnType::kFloat64},
           {"mean_locations_per_day", ColumnType::kFloat64},
           {"commute_minutes", ColumnType::kFloat64}});
  for (const auto& a : m.per_agent) {
    t.col<std::int64_t>("agent_id").push_back(a.agent_id);
    t.col<double>("radius_of_gyration_km").push_back(a.radius_of_gyration_km);
    t.col<double>("mean_daily_distance_km").push_back(a.mean_daily_distance_km);
    t.col<double>("mean_locations_per_day").push_back(a.mean_locations_per_day);
    t.col<double>("commute_minutes").push_back(a.commute_minutes);
  }
  return t;
}

inline Report injection_report(const inject::InjectionReport& r) {
  Report out;
  out.add("n_agents", r.n_agents)
      .add("anomalous_agents", r.anomalous_agents)
      .add("agent_prevalence", r.agent_prevalence)
      .add("labelled_staypoints", r.labelled_staypoints)
      .add("test_staypoints", r.test_staypoints)
      .add("staypoint_prevalence", r.staypoint_prevalence)
      .add("skipped_candidates", r.skipped.size());
  return out;
}

inline Report evaluation_report(const std::vector<eval::EvalResult>& results) {
  Report out;
  for (const auto& r : results) {
    const std::string p = r.method + "." + detect::to_string(r.level);
    out.add(p + ".n_items", r.n_items)
        .add(p + ".prevalence", r.prevalence)
        .add(p + ".ap", r.ap)
        .add(p + ".aucroc", r.aucroc);
  }
  return out;
}

// Text describing the released files and their columns.
inline std::string release_readme(const std::string& ext, std::size_t n_agents,
                                  const SimClock& clock) {
  std::string s;
  s += "Synthetic human mobility dataset with injected anomalies\n";
  s += "=========================================================\n\n";
  s += "Agents: " + std::to_string(n_agents) + "\n";
  s += "Train window: " + format_iso(clock.train_start()) + " to " +
       format_iso(clock.train_end().plus_seconds(-1)) + "\n";
  s += "Test window:  " + format_iso(clock.test_start()) + " to " +
       format_iso(clock.last_instant()) + "\n";
  s += "Tables use the " +
       std::string(ext == ".mcol" ? "columnar binary (.mcol)" : "CSV (.csv)") +
       " format. Datetimes are ISO-8601 strings with an explicit -08:00 offset.\n\n";
  s += "readme.txt\n  This file.\n\n";
  s += "demographics" + ext + "\n";
  s += "  agent_id        integer, unique agent identifier\n";
  s += "  age_band        text, one of 0-17, 18-34, 35-54, 55-64, 65+\n";
  s += "  household_size  integer, 1 to 5\n";
  s += "  worker          bool, agent has a workplace\n";
  s += "  student         bool, agent attends school\n\n";
  s += "poi" + ext + "\n";
  s += "  poi_id     integer, unique place identifier\n";
  s += "  name       text, empty for residences\n";
  s += "  latitude   float, degrees\n";
  s += "  longitude  float, degrees\n";
  s += "  act_types  text, '|'-separated activity types valid at the place, from:\n";
  s += "             ";
  for (std::size_t i = 0; i < kNumActivityTypes; ++i) {
    s += std::string(i ? ", " : "") + std::string(kActivityTypeNames[i]);
  }
  s += "\n\n";
  const char* sp_cols =
      "  agent_id        integer, agent identifier\n"
      "  poi_id          integer, place identifier\n"
      "  start_datetime  text, arrival time\n"
      "  end_datetime    text, departure time\n";
  s += "stay_points_train" + ext + "\n" + sp_cols;
  s += "  Stays overlapping the window start are clipped to it; a stay that\n"
       "  crosses into the test window is kept here whole.\n\n";
  s += "stay_points_test_truth" + ext + "\n" + sp_cols;
  s += "  Test-window stays without anomalies.\n\n";
  s += "stay_points_test_anomalous" + ext + "\n" + sp_cols;
  s += "  anomaly         bool, true when the row differs from or is absent in the\n"
       "                  truth file\n";
  s += "  anomaly_type    integer, 0 none, 1 modified stay, 2 injected stay\n";
  return s;
}

}  // namespace mobsim::io
