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

#include <vector>

#include "mobsim/domain/validation.hpp"
#include "mobsim/eval/corruption.hpp"
#include "mobsim/eval/evaluate.hpp"
#include "test_support.hpp"

namespace mobsim::eval {
namespace {

using detect::Level;
using detect::ScoredItem;
using testing::at;
using testing::stay;

std::vector<Staypoint> agent_rows(AgentId a, int n, int anomalous) {
  std::vector<Staypoint> out;
  for (int k = 0; k < n; ++k) {
    out.push_back(stay(a, 10 + k, at(30, 0).plus_seconds(k * 3600),
                       at(30, 0).plus_seconds(k * 3600 + 1800),
                       k < anomalous ? AnomalyType::kInjected : AnomalyType::kNone));
  }
  return out;
}

TEST(DeriveLabels, CountRule) {
  auto rows = agent_rows(1, 5, 0);
  auto more = agent_rows(2, 5, 1);
  rows.insert(rows.end(), more.begin(), more.end());
  const auto l = derive_labels(rows, rows);
  EXPECT_EQ(l.agents, (std::vector<AgentId>{1, 2}));
  EXPECT_EQ(l.agent, (std::vector<int>{0, 1}));
  EXPECT_EQ(l.staypoint.size(), 10u);
}

TEST(DeriveLabels, ProportionRuleTwoOfThirty) {
  const auto rows = agent_rows(1, 30, 2);
  AgentLabelRule rule;
  rule.kind = AgentLabelRule::Kind::kProportion;
  rule.value = 0.1;
  EXPECT_EQ(derive_labels(rows, rows, rule).agent, (std::vector<int>{0}));
  const auto three = agent_rows(1, 30, 3);
  EXPECT_EQ(derive_labels(three, three, rule).agent, (std::vector<int>{1}));
}

TEST(DeriveLabels, AgentSetMismatchThrows) {
  const auto a = agent_rows(1, 3, 0);
  const auto b = agent_rows(2, 3, 0);
  EXPECT_THROW(derive_labels(a, b), MetricError);
}

std::vector<ScoredItem> staypoint_scores(const std::vector<Staypoint>& rows,
                                         const std::vector<double>& s) {
  std::vector<ScoredItem> out;
  const auto groups = group_by_agent(rows);
  std::size_t i = 0;
  for (const auto& g : groups) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      out.push_back({Level::kStaypoint, g[k].agent_id, k, s[i++]});
    }
  }
  return out;
}

TEST(EvaluateScores, StaypointAndPooledAgentLevels) {
  auto rows = agent_rows(1, 4, 1);  // index 0 anomalous
  auto b = agent_rows(2, 4, 0);
  auto c = agent_rows(3, 4, 0);
  rows.insert(rows.end(), b.begin(), b.end());
  rows.insert(rows.end(), c.begin(), c.end());
  const std::vector<double> s{0.9, 0.1, 0.1, 0.1, 0.5, 0.2, 0.2, 0.2, 0.95, 0.0, 0.0, 0.0};
  const auto res = evaluate_scores("m", staypoint_scores(rows, s), rows, rows);
  ASSERT_EQ(res.size(), 2u);
  EXPECT_EQ(res[0].level, Level::kStaypoint);
  EXPECT_EQ(res[0].n_items, 12u);
  EXPECT_NEAR(res[0].prevalence, 1.0 / 12, 1e-15);
  EXPECT_NEAR(res[0].ap, 0.5, 1e-15);              // ranked second
  EXPECT_NEAR(res[0].aucroc, 10.0 / 11.0, 1e-15);  // beaten by one negative
  EXPECT_EQ(res[1].level, Level::kAgent);
  EXPECT_EQ(res[1].n_items, 3u);
  EXPECT_NEAR(res[1].aucroc, 0.5, 1e-15);  // agent 1 at 0.9 ranks between 0.5 and 0.95
}

TEST(EvaluateScores, ExplicitAgentScoresOverridePooling) {
  auto rows = agent_rows(1, 2, 1);
  auto b = agent_rows(2, 2, 0);
  rows.insert(rows.end(), b.begin(), b.end());
  auto items = staypoint_scores(rows, {0.1, 0.1, 0.9, 0.9});
  items.push_back({Level::kAgent, 1, std::nullopt, 5.0});
  items.push_back({Level::kAgent, 2, std::nullopt, 1.0});
  const auto res = evaluate_scores("m", items, rows, rows);
  EXPECT_DOUBLE_EQ(res[1].aucroc, 1.0);
  EXPECT_NEAR(res[0].aucroc, 0.5 / 3.0, 1e-15);  // ties the other 0.1
}

TEST(EvaluateScores, CoverageErrors) {
  auto rows = agent_rows(1, 2, 1);
  auto b = agent_rows(2, 2, 0);
  rows.insert(rows.end(), b.begin(), b.end());
  auto items = staypoint_scores(rows, {0.1, 0.1, 0.9, 0.9});
  items.pop_back();
  EXPECT_THROW(evaluate_scores("m", items, rows, rows), MetricError);
  items = staypoint_scores(rows, {0.1, 0.1, 0.9, 0.9});
  items.push_back(items.front());
  EXPECT_THROW(evaluate_scores("m", items, rows, rows), SchemaError);
}

TEST(FormatTable, HasHeaderAndRows) {
  const std::vector<EvalResult> r{{Level::kStaypoint, "visit_rate", 10, 0.1, 0.5, 0.75}};
  const auto t = format_table(r);
  EXPECT_NE(t.find("Anomaly Prevalence"), std::string::npos);
  EXPECT_NE(t.find("visit_rate"), std::string::npos);
  EXPECT_NE(t.find("0.7500"), std::string::npos);
}

std::vector<Staypoint> random_rows(testing::Gen& g, int agents) {
  std::vector<Staypoint> rows;
  for (AgentId a = 1; a <= agents; ++a) {
    Timestamp t = at(29, 0);
    for (int k = 0; k < 30; ++k) {
      const Timestamp e = t.plus_seconds(g.integer(600, 20000));
      rows.push_back(stay(a, g.integer(1, 6), t, e, g.coin(0.1) ? AnomalyType::kInjected
                                                                  : AnomalyType::kNone));
      t = e.plus_seconds(g.integer(0, 3600));
    }
  }
  return rows;
}

world::PoiCatalog six_pois() {
  std::vector<PoiRecord> p;
  for (PoiId i = 1; i <= 6; ++i) {
    p.push_back({i, "", 34.0 + 0.01 * static_cast<double>(i), -118.0, {ActivityType::kEatOut}});
  }
  return world::PoiCatalog(p);
}

TEST(Corruption, MagnitudeZeroIsIdentity) {
  testing::Gen g(1);
  const auto rows = random_rows(g, 5);
  const auto cat = six_pois();
  for (auto k : {CorruptionKind::kTemporal, CorruptionKind::kMissing, CorruptionKind::kIdSwitch,
                 CorruptionKind::kSpatial}) {
    EXPECT_EQ(apply_corruption(rows, k, 0.0, 7, &cat), rows);
  }
}

TEST(Corruption, DropRateOneEmpties) {
  testing::Gen g(2);
  EXPECT_TRUE(apply_corruption(random_rows(g, 3), CorruptionKind::kMissing, 1.0, 1).empty());
}

TEST(Corruption, TemporalNoiseKeepsSequencesValid) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    testing::Gen g(seed);
    const auto out = apply_corruption(random_rows(g, 4), CorruptionKind::kTemporal, 5.0, seed);
    for (const auto& seq : group_by_agent(out)) {
      EXPECT_TRUE(validate_staypoint_sequence(seq).empty());
    }
  }
}

TEST(Corruption, IdSwitchAndSpatialPreserveRowsAndValidity) {
  const auto cat = six_pois();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    testing::Gen g(seed);
    const auto rows = random_rows(g, 4);
    std::size_t labelled = 0;
    for (const auto& r : rows) labelled += r.anomaly ? 1 : 0;
    const auto sw = apply_corruption(rows, CorruptionKind::kIdSwitch, 0.3, seed);
    const auto sp = apply_corruption(rows, CorruptionKind::kSpatial, 2.0, seed, &cat);
    EXPECT_EQ(sp.size(), rows.size());
    EXPECT_LE(sw.size(), rows.size());
    for (const auto* out : {&sw, &sp}) {
      for (const auto& seq : group_by_agent(*out)) {
        EXPECT_TRUE(validate_staypoint_sequence(seq).empty());
      }
    }
    std::size_t moved = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (sp[i].poi_id != rows[i].poi_id) {
        ++moved;
        EXPECT_LE(haversine_km(cat.location(sp[i].poi_id), cat.location(rows[i].poi_id)), 2.0);
      }
    }
    EXPECT_GT(moved, 0u);
  }
}

TEST(Corruption, UnknownKindAndBadMagnitude) {
  EXPECT_THROW(parse_corruption("gamma_rays"), ConfigError);
  EXPECT_THROW(apply_corruption({}, CorruptionKind::kMissing, -1.0, 1), ConfigError);
  testing::Gen g(3);
  EXPECT_THROW(apply_corruption(random_rows(g, 2), CorruptionKind::kSpatial, 1.0, 1), ConfigError);
}

TEST(Corruption, RepairResolvesOverlapAtMidpoint) {
  const std::vector<Staypoint> seq{stay(1, 1, at(30, 8), at(30, 10)),
                                   stay(1, 2, at(30, 9), at(30, 12))};
  const auto out = detail::repair_overlaps(seq);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].end, at(30, 9, 30));
  EXPECT_EQ(out[1].start, at(30, 9, 30));
  const std::vector<Staypoint> inside{stay(1, 1, at(30, 8), at(30, 12)),
                                      stay(1, 2, at(30, 9), at(30, 10))};
  EXPECT_EQ(detail::repair_overlaps(inside).size(), 1u);
}

}  // namespace
}  // namespace mobsim::eval
