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

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mobsim/activity/chain_stats.hpp"
#include "mobsim/activity/generator.hpp"
#include "mobsim/assign/mobility_stats.hpp"
#include "mobsim/assign/poi_assign.hpp"
#include "mobsim/detect/detectors.hpp"
#include "mobsim/domain/grouping.hpp"
#include "mobsim/domain/validation.hpp"
#include "mobsim/eval/corruption.hpp"
#include "mobsim/eval/evaluate.hpp"
#include "mobsim/inject/injector.hpp"
#include "mobsim/io/config.hpp"
#include "mobsim/io/records_io.hpp"
#include "mobsim/io/reports.hpp"
#include "mobsim/routing/realize.hpp"
#include "mobsim/routing/travel_time.hpp"
#include "mobsim/world/poi_catalog.hpp"
#include "mobsim/world/population.hpp"
#include "mobsim/world/road_graph.hpp"

namespace mobsim {

// Output layout under the configured directory: the six release files at
// the top level, intermediates in work/, reports in reports/ and detector
// scores in scores/.
class PipelinePaths {
 public:
  PipelinePaths(const std::string& root, io::FileFormat format)
      : root_(root), ext_(io::extension(format)) {}

  std::string readme() const { return top("readme.txt"); }
  std::string demographics() const { return top("demographics" + ext_); }
  std::string poi() const { return top("poi" + ext_); }
  std::string train() const { return top("stay_points_train" + ext_); }
  std::string truth() const { return top("stay_points_test_truth" + ext_); }
  std::string anomalous() const { return top("stay_points_test_anomalous" + ext_); }

  std::string agents() const { return sub("work", "agents" + ext_); }
  std::string road_graph() const { return sub("work", "road_graph.csv"); }
  std::string chains() const { return sub("work", "chains" + ext_); }
  std::string activity_model() const { return sub("work", "activity_model.json"); }
  std::string assigned_chains() const { return sub("work", "assigned_chains" + ext_); }
  std::string manifest() const { return sub("work", "manifest" + ext_); }

  std::string report(const std::string& name) const { return sub("reports", name); }
  std::string scores(const std::string& detector) const {
    return sub("scores", detector + ".csv");
  }
  const std::string& ext() const { return ext_; }

 private:
  std::string top(const std::string& name) const {
    return (std::filesystem::path(root_) / name).string();
  }
  std::string sub(const std::string& dir, const std::string& name) const {
    return (std::filesystem::path(root_) / dir / name).string();
  }

  std::string root_;
  std::string ext_;
};

// Throws MissingInputError naming every path that does not exist.
inline void require_inputs(const std::string& stage, const std::vector<std::string>& paths) {
  std::string missing;
  for (const auto& p : paths) {
    if (!std::filesystem::exists(p)) missing += "\n  " + p;
  }
  if (!missing.empty()) {
    throw MissingInputError("stage '" + stage + "' is missing inputs:" + missing);
  }
}

// Stages of the simulation and benchmark. Each stage reads its inputs from
// the output directory, so stages can be rerun independently; all
// randomness derives from the configured root seed.
class Pipeline {
 public:
  explicit Pipeline(io::PipelineConfig cfg, std::ostream* log = nullptr)
      : cfg_(std::move(cfg)), paths_(cfg_.out_dir, cfg_.format), log_(log) {
    for (const char* d : {"", "work", "reports", "scores"}) {
      std::filesystem::create_directories(std::filesystem::path(cfg_.out_dir) / d);
    }
  }

  const io::PipelineConfig& config() const { return cfg_; }
  const PipelinePaths& paths() const { return paths_; }

  void world() {
    world::PoiConfig pc = cfg_.poi;
    pc.counts = cfg_.poi_counts();
    const auto catalog = world::generate_poi_catalog(pc, derive_seed(cfg_.seed, "world.poi"));
    const world::RoadGraph graph = cfg_.road_graph_path.empty()
                                       ? world::generate_grid_graph(cfg_.grid)
                                       : world::load_road_graph(cfg_.road_graph_path);
    const routing::TravelTimeOracle oracle(graph, cfg_.routing);
    const auto agents = world::generate_population(
        cfg_.n_agents, catalog, oracle, cfg_.population,
        derive_seed(cfg_.seed, "world.population"));

    io::write_table(io::pois_to_table(catalog.pois()), paths_.poi());
    io::write_table(io::demographics_to_table(agents, false), paths_.demographics());
    io::write_table(io::demographics_to_table(agents, true), paths_.agents());
    {
      std::ofstream out(paths_.road_graph());
      if (!out) throw ConfigError("cannot write " + paths_.road_graph());
      world::write_edge_list(graph, out);
    }
    {
      std::ofstream out(paths_.readme());
      if (!out) throw ConfigError("cannot write " + paths_.readme());
      out << io::release_readme(paths_.ext(), agents.size(), cfg_.clock);
    }
    say("world: " + std::to_string(catalog.size()) + " POIs, " +
        std::to_string(graph.num_nodes()) + " road nodes, " + std::to_string(agents.size()) +
        " agents");
  }

  void activities() {
    require_inputs("activities", {paths_.agents()});
    const auto agents = load_agents();
    const auto model = activity_model();
    const auto chains = activity::generate_chains(agents, model, cfg_.clock,
                                                  derive_seed(cfg_.seed, "activities"));
    io::write_table(io::chains_to_table(chains), paths_.chains());
    io::save_model(model, paths_.activity_model());
    io::Report rep;
    if (chains.size() >= activity::kMinChainsForValidation) {
      rep = io::chain_stats_report(activity::validate_chains(
          chains, agents, model, cfg_.clock, derive_seed(cfg_.seed, "activities.check")));
    } else {
      rep.add("status", "skipped: validation needs at least " +
                            std::to_string(activity::kMinChainsForValidation) + " chains");
    }
    rep.write(paths_.report("chain_stats.txt"));
    say("activities: " + std::to_string(chains.size()) + " chains");
  }

  void assign() {
    require_inputs("assign",
                   {paths_.agents(), paths_.chains(), paths_.poi(), paths_.road_graph()});
    const auto agents = load_agents();
    const auto catalog = load_catalog();
    auto chains = io::table_to_chains(
        io::read_table(paths_.chains(), io::chain_schema(false), "chain file"));
    const auto result = assign::assign_all(align_chains(chains, agents), agents, catalog,
                                           cfg_.assign, derive_seed(cfg_.seed, "assign"));
    io::write_table(io::assigned_chains_to_table(result.chains), paths_.assigned_chains());

    // Mobility statistics on the scheduled (zero-travel) stays.
    const auto oracle = load_oracle();
    std::vector<std::vector<Staypoint>> scheduled(result.chains.size());
    parallel_for(result.chains.size(), [&](std::size_t i) {
      scheduled[i] =
          routing::realize_schedule(result.chains[i], routing::zero_travel(), cfg_.clock);
    });
    const auto stats = assign::compute_mobility_stats(scheduled, agents, catalog, oracle);
    io::mobility_report(stats).write(paths_.report("mobility_stats.txt"));
    io::write_table(io::mobility_table(stats), paths_.report("mobility_per_agent" + paths_.ext()));
    say("assign: median commute " + std::to_string(stats.commute_minutes.median) + " min");
  }

  void realize() {
    require_inputs("realize", {paths_.assigned_chains(), paths_.poi(), paths_.road_graph()});
    const auto catalog = load_catalog();
    const auto oracle = load_oracle();
    const auto chains = io::table_to_assigned_chains(io::read_table(
        paths_.assigned_chains(), io::chain_schema(true), "assigned chain file"));
    const auto split = routing::realize_all(chains, catalog, oracle, cfg_.clock);
    const auto travel = routing::oracle_travel(catalog, oracle);
    std::size_t infeasible = 0, invalid = 0;
    for (std::size_t i = 0; i < chains.size(); ++i) {
      std::vector<Staypoint> all = split.train[i];
      all.insert(all.end(), split.test[i].begin(), split.test[i].end());
      infeasible += routing::feasibility_violations(all, travel).size();
      invalid += validate_staypoint_sequence(all).size();
    }
    const auto train = flatten(split.train);
    const auto test = flatten(split.test);
    io::write_staypoints(train, paths_.train(), false);
    io::write_staypoints(test, paths_.truth(), false);
    io::Report rep;
    rep.add("train_staypoints", train.size())
        .add("test_staypoints", test.size())
        .add("feasibility_violations", infeasible)
        .add("validation_violations", invalid)
        .add("routing_fallbacks", oracle.fallback_count())
        .write(paths_.report("routing.txt"));
    say("realize: " + std::to_string(train.size()) + " train and " +
        std::to_string(test.size()) + " test staypoints");
  }

  void inject() {
    require_inputs("inject", {paths_.train(), paths_.truth(), paths_.poi(), paths_.road_graph(),
                              paths_.agents()});
    const auto agents = load_agents();
    const auto catalog = load_catalog();
    const auto oracle = load_oracle();
    const auto ids = agent_ids(agents);
    const auto train = align_to_agents(io::read_staypoints(paths_.train(), false), ids);
    const auto test = align_to_agents(io::read_staypoints(paths_.truth(), false), ids);
    std::vector<inject::AgentWindows> windows;
    windows.reserve(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i) {
      windows.push_back({agents[i].agent_id, agents[i].home_poi, train[i], test[i]});
    }
    auto plan = cfg_.injection;
    plan.seed = derive_seed(cfg_.seed, "inject");
    const auto set = inject::build_anomalous_testset(
        windows, catalog, routing::oracle_travel(catalog, oracle), cfg_.clock, plan);
    io::write_staypoints(flatten(set.anomalous), paths_.anomalous(), true);
    io::write_table(io::manifest_to_table(set.manifest), paths_.manifest());
    io::injection_report(set.report).write(paths_.report("injection.txt"));
    say("inject: " + std::to_string(set.report.anomalous_agents) + " agents, " +
        std::to_string(set.report.labelled_staypoints) + " labelled staypoints");
  }

  void detect() {
    require_inputs("detect", {paths_.train(), paths_.anomalous(), paths_.agents()});
    const auto ids = agent_ids(load_agents());
    const auto train = align_to_agents(io::read_staypoints(paths_.train(), false), ids);
    const auto test = align_to_agents(io::read_staypoints(paths_.anomalous(), true), ids);
    for (const auto& name : cfg_.detectors) {
      auto items = detect::detector_by_name(name)({train, test});
      const auto agents = detect::aggregate_to_agents(items, ids);
      items.insert(items.end(), agents.begin(), agents.end());
      io::write_scores(items, paths_.scores(name));
      say("detect: wrote " + paths_.scores(name));
    }
  }

  // Evaluates score files (default: one per configured detector). The
  // method name is the file stem.
  std::vector<eval::EvalResult> evaluate(std::vector<std::string> score_paths = {}) {
    if (score_paths.empty()) {
      for (const auto& d : cfg_.detectors) score_paths.push_back(paths_.scores(d));
    }
    std::vector<std::string> needed{paths_.truth(), paths_.anomalous()};
    needed.insert(needed.end(), score_paths.begin(), score_paths.end());
    require_inputs("evaluate", needed);
    const auto truth = io::read_staypoints(paths_.truth(), false);
    const auto anomalous = io::read_staypoints(paths_.anomalous(), true);
    std::vector<eval::EvalResult> results;
    for (const auto& p : score_paths) {
      const auto scores = io::read_scores(p);
      const auto r = eval::evaluate_scores(std::filesystem::path(p).stem().string(), scores,
                                           truth, anomalous, cfg_.agent_rule);
      results.insert(results.end(), r.begin(), r.end());
    }
    io::evaluation_report(results).write(paths_.report("evaluation.txt"));
    return results;
  }

  // Corrupts the anomalous test rows, reruns the configured detectors on
  // them and evaluates against the labels the corrupted rows carry.
  std::vector<eval::EvalResult> evaluate_corrupted(eval::CorruptionKind kind,
                                                   const std::string& kind_name,
                                                   double magnitude) {
    require_inputs("evaluate", {paths_.train(), paths_.anomalous(), paths_.poi()});
    const auto catalog = load_catalog();
    const auto train_rows = io::read_staypoints(paths_.train(), false);
    const auto corrupted =
        eval::apply_corruption(io::read_staypoints(paths_.anomalous(), true), kind, magnitude,
                               derive_seed(cfg_.seed, "corruption"), &catalog);
    std::vector<AgentId> ids;
    for (const auto& seq : group_by_agent(corrupted)) ids.push_back(seq.front().agent_id);
    const auto train = align_to_agents(train_rows, ids);
    const auto test = align_to_agents(corrupted, ids);
    std::vector<eval::EvalResult> results;
    for (const auto& name : cfg_.detectors) {
      const auto items = detect::detector_by_name(name)({train, test});
      const auto r = eval::evaluate_scores(name, items, corrupted, corrupted, cfg_.agent_rule);
      results.insert(results.end(), r.begin(), r.end());
    }
    char mag[32];
    std::snprintf(mag, sizeof mag, "%g", magnitude);
    io::evaluation_report(results).write(
        paths_.report("robustness_" + kind_name + "_" + mag + ".txt"));
    return results;
  }

  std::vector<eval::EvalResult> all() {
    world();
    activities();
    assign();
    realize();
    inject();
    detect();
    return evaluate();
  }

 private:
  void say(const std::string& msg) const {
    if (log_ != nullptr) *log_ << msg << '\n';
  }

  activity::ActivityModel activity_model() const {
    return cfg_.activity_model_path.empty() ? activity::ActivityModel::default_model()
                                            : io::load_model(cfg_.activity_model_path);
  }

  std::vector<AgentRecord> load_agents() const {
    return io::table_to_agents(io::read_table(paths_.agents(), io::agent_schema(), "agent file"),
                               true);
  }

  world::PoiCatalog load_catalog() const {
    return world::PoiCatalog(
        io::table_to_pois(io::read_table(paths_.poi(), io::poi_schema(), "poi file")));
  }

  routing::TravelTimeOracle load_oracle() const {
    return routing::TravelTimeOracle(world::load_road_graph(paths_.road_graph()), cfg_.routing);
  }

  static std::vector<AgentId> agent_ids(const std::vector<AgentRecord>& agents) {
    std::vector<AgentId> ids;
    ids.reserve(agents.size());
    for (const auto& a : agents) ids.push_back(a.agent_id);
    return ids;
  }

  // Chains reordered to match `agents`; every agent needs exactly one.
  static std::vector<ActivityChain> align_chains(std::vector<ActivityChain>& chains,
                                                 const std::vector<AgentRecord>& agents) {
    std::unordered_map<AgentId, std::size_t> at;
    for (std::size_t i = 0; i < chains.size(); ++i) at[chains[i].agent_id] = i;
    if (at.size() != agents.size() || chains.size() != agents.size()) {
      throw SchemaError("chain file does not hold exactly one chain per agent");
    }
    std::vector<ActivityChain> out;
    out.reserve(agents.size());
    for (const auto& a : agents) {
      auto f = at.find(a.agent_id);
      if (f == at.end()) throw SchemaError("no chain for agent " + std::to_string(a.agent_id));
      out.push_back(std::move(chains[f->second]));
    }
    return out;
  }

  io::PipelineConfig cfg_;
  PipelinePaths paths_;
  std::ostream* log_;
};

}  // namespace mobsim
