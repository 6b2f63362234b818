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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <string>

#include "mobsim/pipeline.hpp"

namespace mobsim {
namespace {

namespace fs = std::filesystem;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

io::PipelineConfig small_config(const std::string& out, io::FileFormat format) {
  io::PipelineConfig c;
  c.seed = 2024;
  c.n_agents = 200;
  c.format = format;
  c.out_dir = out;
  c.injection.target_agent_prevalence = 0.02;
  c.injection.target_staypoint_prevalence = 0.0015;
  return c;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("mobsim_pipeline_" + name);
  fs::remove_all(p);
  return p;
}

TEST(Pipeline, StageWithoutInputsNamesMissingFiles) {
  const auto dir = scratch("missing");
  Pipeline p(small_config(dir.string(), io::FileFormat::kCsv));
  try {
    p.inject();
    FAIL() << "expected MissingInputError";
  } catch (const MissingInputError& e) {
    EXPECT_NE(std::string(e.what()).find("stay_points_train.csv"), std::string::npos);
  }
  EXPECT_THROW(p.activities(), MissingInputError);
  EXPECT_THROW(p.detect(), MissingInputError);
  EXPECT_THROW(p.evaluate(), MissingInputError);
  fs::remove_all(dir);
}

class SmallRun : public ::testing::TestWithParam<io::FileFormat> {};

TEST_P(SmallRun, ReproducibleAndConsistent) {
  const auto a = scratch("a");
  const auto b = scratch("b");
  Pipeline pa(small_config(a.string(), GetParam()));
  const auto results = pa.all();
  Pipeline pb(small_config(b.string(), GetParam()));
  pb.all();

  const auto& paths = pa.paths();
  const PipelinePaths other(b.string(), GetParam());
  for (const auto& [x, y] :
       {std::pair{paths.readme(), other.readme()}, {paths.demographics(), other.demographics()},
        {paths.poi(), other.poi()}, {paths.train(), other.train()},
        {paths.truth(), other.truth()}, {paths.anomalous(), other.anomalous()},
        {paths.scores("visit_rate"), other.scores("visit_rate")}}) {
    ASSERT_TRUE(fs::exists(x)) << x;
    EXPECT_EQ(slurp(x), slurp(y)) << x;
  }

  // Referential integrity of the release files.
  std::set<PoiId> pois;
  for (const auto& p :
       io::table_to_pois(io::read_table(paths.poi(), io::poi_schema(), "poi file"))) {
    pois.insert(p.poi_id);
  }
  std::set<AgentId> agents;
  for (const auto& r : io::table_to_agents(
           io::read_table(paths.demographics(), io::demographics_schema(), "demographics"),
           false)) {
    agents.insert(r.agent_id);
  }
  EXPECT_EQ(agents.size(), 200u);
  std::size_t labelled = 0;
  for (const auto& [file, with_labels] : {std::pair{paths.train(), false},
                                          {paths.truth(), false},
                                          {paths.anomalous(), true}}) {
    const auto rows = io::read_staypoints(file, with_labels);
    EXPECT_FALSE(rows.empty());
    for (const auto& r : rows) {
      EXPECT_TRUE(pois.count(r.poi_id)) << r.poi_id;
      EXPECT_TRUE(agents.count(r.agent_id)) << r.agent_id;
      labelled += r.anomaly ? 1 : 0;
    }
  }
  EXPECT_GT(labelled, 0u);

  ASSERT_EQ(results.size(), 4u);
  for (const auto& r : results) {
    EXPECT_GE(r.aucroc, 0.0);
    EXPECT_LE(r.aucroc, 1.0);
    EXPECT_GT(r.prevalence, 0.0);
  }
  EXPECT_NE(slurp(paths.report("routing.txt")).find("feasibility_violations=0\n"),
            std::string::npos);

  // A truth file passed as a score file fails on its header.
  EXPECT_THROW(pa.evaluate({paths.truth()}), SchemaError);

  // Stages rerun from files reproduce the scores.
  const auto before = slurp(paths.scores("visit_rate"));
  pa.detect();
  EXPECT_EQ(slurp(paths.scores("visit_rate")), before);

  const auto robust = pa.evaluate_corrupted(eval::CorruptionKind::kTemporal, "temporal", 5.0);
  EXPECT_EQ(robust.size(), 4u);
  EXPECT_TRUE(fs::exists(paths.report("robustness_temporal_5.txt")));

  fs::remove_all(a);
  fs::remove_all(b);
}

INSTANTIATE_TEST_SUITE_P(Formats, SmallRun,
                         ::testing::Values(io::FileFormat::kColumnar, io::FileFormat::kCsv),
                         [](const auto& info) {
                           return std::string(info.param == io::FileFormat::kCsv ? "csv"
                                                                                  : "columnar");
                         });

}  // namespace
}  // namespace mobsim
