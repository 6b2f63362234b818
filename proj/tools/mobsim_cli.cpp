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

// Command-line driver for the simulation and benchmark stages.
//
//   mobsim_cli all --config configs/desk.json
//   mobsim_cli detect --config configs/desk.json --detector visit_rate
//   mobsim_cli evaluate --config configs/desk.json --scores my_scores.csv
//
// On failure a single JSON line {"error": kind, "message": text} goes to
// stderr and the exit code is nonzero.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mobsim/pipeline.hpp"

namespace {

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::int64_t> scale;
};

mobsim::io::PipelineConfig make_config(const GlobalOptions& g) {
  mobsim::io::PipelineConfig cfg;
  if (!g.config.empty()) {
    cfg = mobsim::io::load_config(g.config);
  } else if (!g.seed) {
    throw mobsim::ConfigError("either --config or --seed is required");
  }
  if (g.seed) cfg.seed = *g.seed;
  if (g.out) cfg.out_dir = *g.out;
  if (g.format) cfg.format = mobsim::io::parse_format(*g.format);
  if (g.scale) {
    if (*g.scale < 1) throw mobsim::ConfigError("--scale must be at least 1");
    cfg.n_agents = *g.scale;
  }
  return cfg;
}

void print_results(const std::vector<mobsim::eval::EvalResult>& results) {
  std::cout << mobsim::eval::format_table(results);
}

int fail(const std::string& kind, const std::string& message) {
  nlohmann::json line{{"error", kind}, {"message", message}};
  std::cerr << line.dump() << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic mobility simulation and anomaly-detection benchmark"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Root seed; overrides the config");
  app.add_option("--out", g.out, "Output directory; overrides the config");
  app.add_option("--format", g.format, "Table format; overrides the config")
      ->check(CLI::IsMember({"columnar", "csv"}));
  app.add_option("--scale", g.scale, "Number of agents; overrides the config");

  auto* world = app.add_subcommand("world", "Build POIs, road graph and population");
  auto* activities = app.add_subcommand("activities", "Generate activity chains");
  auto* assign = app.add_subcommand("assign", "Assign POIs to activities");
  auto* realize = app.add_subcommand("realize", "Route and split into train/test staypoints");
  auto* inject = app.add_subcommand("inject", "Build the anomalous test file");
  auto* detect = app.add_subcommand("detect", "Score the anomalous test file");
  std::vector<std::string> detectors;
  detect->add_option("--detector", detectors, "Detector name; default: all configured")
      ->check(CLI::IsMember(mobsim::detect::detector_names()));
  auto* evaluate = app.add_subcommand("evaluate", "Compute AP and AUCROC for score files");
  std::vector<std::string> score_files;
  std::string corruption;
  double magnitude = 0.0;
  evaluate->add_option("--scores", score_files, "Score CSV files; default: detector outputs");
  evaluate->add_option("--corruption", corruption,
                       "Rerun detectors on corrupted test data: temporal, missing, "
                       "id_switch or spatial");
  evaluate->add_option("--magnitude", magnitude, "Corruption magnitude")->needs("--corruption");
  auto* all = app.add_subcommand("all", "Run every stage");
  for (auto* sub : {world, activities, assign, realize, inject, detect, evaluate, all}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what()) + 1;
  }

  try {
    auto cfg = make_config(g);
    if (!detectors.empty()) cfg.detectors = detectors;
    mobsim::Pipeline p(std::move(cfg), &std::cerr);
    if (*world) p.world();
    if (*activities) p.activities();
    if (*assign) p.assign();
    if (*realize) p.realize();
    if (*inject) p.inject();
    if (*detect) p.detect();
    if (*evaluate) {
      if (!corruption.empty()) {
        print_results(p.evaluate_corrupted(mobsim::eval::parse_corruption(corruption),
                                           corruption, magnitude));
      } else {
        print_results(p.evaluate(score_files));
      }
    }
    if (*all) print_results(p.all());
  } catch (const mobsim::Error& e) {
    return fail(e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}
