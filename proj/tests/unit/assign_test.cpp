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

#include <cmath>
#include <map>
#include <vector>

#include "mobsim/assign/mobility_stats.hpp"
#include "mobsim/assign/poi_assign.hpp"
#include "test_support.hpp"

namespace mobsim::assign {
namespace {

using A = ActivityType;
using testing::at;
using testing::stay;

world::PoiCatalog tiny_catalog() {
  return world::PoiCatalog({{1, "", 34.00, -118.00, {A::kHome, A::kVisit, A::kDropOff}},
                            {2, "", 34.01, -118.00, {A::kHome, A::kVisit, A::kDropOff}},
                            {3, "office", 34.02, -118.00, {A::kWork}},
                            {4, "diner", 34.03, -118.00, {A::kEatOut}},
                            {5, "shop", 34.04, -118.00, {A::kBuyGoods}},
                            {6, "shop2", 34.05, -118.00, {A::kBuyGoods}}});
}

AgentRecord agent_at(PoiId home, std::optional<PoiId> work = std::nullopt) {
  AgentRecord a;
  a.agent_id = 1;
  a.home_poi = home;
  a.work_poi = work;
  a.demographics.worker = work.has_value();
  return a;
}

ActivityChain chain_of(std::initializer_list<A> types) {
  ActivityChain c;
  c.agent_id = 1;
  int t = 0;
  for (auto ty : types) {
    c.entries.push_back({1, ty, t, t + 30});
    t += 40;
  }
  return c;
}

TEST(ExploreProbability, FollowsPowerLaw) {
  const AssignConfig cfg;
  EXPECT_DOUBLE_EQ(explore_probability(cfg, 1), 0.6);
  EXPECT_NEAR(explore_probability(cfg, 10), 0.6 * std::pow(10.0, -0.21), 1e-15);
  EXPECT_DOUBLE_EQ(explore_probability(cfg, 0), 0.6);
}

TEST(AssignPois, HomeOnlyChainUsesHomeAndOneKey) {
  const auto cat = tiny_catalog();
  const auto a = agent_at(1);
  auto st = AgentLocationState::for_agent(a);
  const auto out = assign_pois(chain_of({A::kHome, A::kHome, A::kHome}), a, cat, st, {}, 1);
  for (const auto& e : out.entries) EXPECT_EQ(e.poi_id, 1);
  EXPECT_EQ(st.distinct(), 1u);
}

TEST(AssignPois, ForcedChoiceAndAnchors) {
  const auto cat = tiny_catalog();
  const auto a = agent_at(1, 3);
  auto st = AgentLocationState::for_agent(a);
  const auto out =
      assign_pois(chain_of({A::kHome, A::kEatOut, A::kWork, A::kVisit, A::kHome}), a, cat, st, {}, 1);
  EXPECT_EQ(out.entries[1].poi_id, 4);
  EXPECT_EQ(out.entries[2].poi_id, 3);
  EXPECT_EQ(out.entries[3].poi_id, 2);  // a residence other than the agent's own
  EXPECT_EQ(out.entries[4].poi_id, 1);
}

TEST(AssignPois, MissingTypeThrowsNamingIt) {
  const auto cat = tiny_catalog();
  const auto a = agent_at(1);
  auto st = AgentLocationState::for_agent(a);
  try {
    assign_pois(chain_of({A::kHome, A::kReligious}), a, cat, st, {}, 1);
    FAIL() << "expected AssignmentError";
  } catch (const AssignmentError& e) {
    EXPECT_NE(std::string(e.what()).find("Religious"), std::string::npos);
  }
}

TEST(AssignPois, AssignedPoisAlwaysValidForType) {
  const auto cat = tiny_catalog();
  testing::Gen g(9);
  const A types[] = {A::kHome, A::kEatOut, A::kBuyGoods, A::kVisit, A::kDropOff, A::kWork};
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = agent_at(g.coin() ? 1 : 2, 3);
    ActivityChain c;
    c.agent_id = 1;
    for (int k = 0; k < 20; ++k) c.entries.push_back({1, types[g.integer(0, 5)], k * 10, k * 10 + 5});
    auto st = AgentLocationState::for_agent(a);
    const auto out = assign_pois(c, a, cat, st, {}, static_cast<std::uint64_t>(trial));
    for (const auto& e : out.entries) {
      EXPECT_TRUE(cat.at(e.poi_id).act_types.contains(e.entry.type));
      if (e.entry.type != A::kHome) {
        EXPECT_NE(e.poi_id, a.home_poi);
      }
    }
    EXPECT_EQ(st.total(), 20);
  }
}

TEST(ChooseReturn, ProportionalToVisitCounts) {
  const auto cat = tiny_catalog();
  AgentLocationState st;
  st.home_poi = 1;
  st.visit_counts = {{5, 3}, {6, 1}, {1, 10}};
  Rng rng(4);
  std::map<PoiId, int> hits;
  const int n = 40000;
  for (int i = 0; i < n; ++i) ++hits[*choose_return(st, cat, A::kBuyGoods, rng)];
  EXPECT_EQ(hits.count(1), 0u);
  EXPECT_NEAR(hits[5] / double(n), 0.75, 0.75 * 0.15);
  EXPECT_NEAR(hits[6] / double(n), 0.25, 0.25 * 0.15);
}

TEST(AssignAll, RankFrequencyIsHeavyTailed) {
  // Preferential return concentrates visits: the most visited non-anchor
  // POI gets a multiple of the share of the tenth.
  std::vector<PoiRecord> pois{{1, "", 34.0, -118.0, {A::kHome, A::kVisit, A::kDropOff}}};
  for (PoiId i = 0; i < 200; ++i) {
    pois.push_back({100 + i, "", 34.0 + 0.001 * static_cast<double>(i % 20),
                    -118.0 + 0.001 * static_cast<double>(i / 20), {A::kEatOut}});
  }
  const world::PoiCatalog cat(pois);
  const auto a = agent_at(1);
  ActivityChain c;
  c.agent_id = 1;
  for (int k = 0; k < 2000; ++k) c.entries.push_back({1 + k / 40, A::kEatOut, 0, 5});
  auto st = AgentLocationState::for_agent(a);
  assign_pois(c, a, cat, st, {}, 3);
  std::vector<double> counts;
  for (const auto& [id, n] : st.visit_counts) counts.push_back(static_cast<double>(n));
  std::sort(counts.rbegin(), counts.rend());
  ASSERT_GT(counts.size(), 10u);
  EXPECT_GT(counts[0], 3.0 * counts[9]);
}

TEST(RadiusOfGyration, SinglePointAndIdenticalPointsAreZero) {
  EXPECT_DOUBLE_EQ(radius_of_gyration(std::vector<LatLon>{{34, -118}}), 0.0);
  EXPECT_DOUBLE_EQ(radius_of_gyration(std::vector<LatLon>{{34, -118}, {34, -118}, {34, -118}}), 0.0);
  EXPECT_THROW(radius_of_gyration(std::vector<LatLon>{}), MetricError);
}

TEST(RadiusOfGyration, TwoPointsTenKmApartOnMeridian) {
  const LatLon a{34.0, -118.0};
  const double dlat = 10.0 / kEarthRadiusKm * 180.0 / std::numbers::pi;
  const LatLon b{34.0 + dlat, -118.0};
  ASSERT_NEAR(haversine_km(a, b), 10.0, 1e-9);
  EXPECT_NEAR(radius_of_gyration(std::vector<LatLon>{a, b}), 5.0, 1e-9);
}

class MobilityFixture : public ::testing::Test {
 protected:
  static double dlat(double km) { return km / kEarthRadiusKm * 180.0 / std::numbers::pi; }
  MobilityFixture()
      : catalog_({{1, "", 34.0, -118.0, {A::kHome}},
                  {2, "", 34.0 + dlat(5.0), -118.0, {A::kWork}}}),
        // One edge whose time plus 120 s of padding is 30 minutes.
        oracle_(routing::RoadGraph({0, 1}, {{34.0, -118.0}, {34.0 + dlat(5.0), -118.0}},
                          {{0, 1, 1680.0, 1.0}, {1, 0, 1680.0, 1.0}})) {}
  world::PoiCatalog catalog_;
  routing::TravelTimeOracle oracle_;
};

TEST_F(MobilityFixture, StayAtHomeAgent) {
  const std::vector<std::vector<Staypoint>> seqs{{stay(1, 1, at(1, 0), at(3, 0))}};
  const std::vector<AgentRecord> agents{agent_at(1)};
  const auto m = compute_mobility_stats(seqs, agents, catalog_, oracle_);
  ASSERT_EQ(m.per_agent.size(), 1u);
  EXPECT_EQ(m.per_agent[0].mean_daily_distance_km, 0.0);
  EXPECT_EQ(m.per_agent[0].mean_locations_per_day, 1.0);
  EXPECT_EQ(m.per_agent[0].commute_minutes, -1.0);
  EXPECT_EQ(m.commute_minutes.count, 0u);
}

TEST_F(MobilityFixture, TwoPoiCommuter) {
  const std::vector<std::vector<Staypoint>> seqs{{stay(1, 1, at(1, 0), at(1, 8)),
                                                  stay(1, 2, at(1, 9), at(1, 17)),
                                                  stay(1, 1, at(1, 18), at(2, 8)),
                                                  stay(1, 2, at(2, 9), at(2, 17)),
                                                  stay(1, 1, at(2, 18), at(3, 0))}};
  const std::vector<AgentRecord> agents{agent_at(1, 2)};
  const auto m = compute_mobility_stats(seqs, agents, catalog_, oracle_);
  const double leg = haversine_km(catalog_.location(1), catalog_.location(2));
  EXPECT_NEAR(leg, 5.0, 1e-9);
  EXPECT_EQ(m.daily_distance_km.count, 2u);
  EXPECT_NEAR(m.daily_distance_km.median, 10.0, 1e-9);
  EXPECT_NEAR(m.per_agent[0].mean_locations_per_day, 2.0, 1e-12);
  EXPECT_NEAR(m.per_agent[0].commute_minutes, 30.0, 1e-9);
}

TEST_F(MobilityFixture, EngineeredCommutesHaveThirtyMinuteMedian) {
  std::vector<std::vector<Staypoint>> seqs;
  std::vector<AgentRecord> agents;
  for (AgentId i = 1; i <= 5; ++i) {
    auto a = agent_at(1, 2);
    a.agent_id = i;
    agents.push_back(a);
    seqs.push_back({stay(i, 1, at(1, 0), at(1, 8)), stay(i, 2, at(1, 9), at(1, 17))});
  }
  const auto m = compute_mobility_stats(seqs, agents, catalog_, oracle_);
  EXPECT_EQ(m.commute_minutes.count, 5u);
  EXPECT_NEAR(m.commute_minutes.median, 30.0, 1e-9);
}

TEST(Summaries, QuantilesInterpolate) {
  const auto s = summarize({4, 1, 3, 2});
  EXPECT_EQ(s.count, 4u);
  EXPECT_DOUBLE_EQ(s.median, 2.5);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.p90, 3.7, 1e-12);
}

}  // namespace
}  // namespace mobsim::assign
