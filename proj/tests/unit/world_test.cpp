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

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "mobsim/routing/travel_time.hpp"
#include "mobsim/world/poi_catalog.hpp"
#include "mobsim/world/population.hpp"
#include "mobsim/world/road_graph.hpp"

namespace mobsim::world {
namespace {

PoiConfig small_config() {
  PoiConfig c;
  c.counts = scaled_poi_counts(300);
  return c;
}

TEST(PoiCatalog, HomeAndVisitShareResidences) {
  PoiConfig c = small_config();
  c.counts[index_of(ActivityType::kHome)] = 1000;
  c.counts[index_of(ActivityType::kVisit)] = 1000;
  c.counts[index_of(ActivityType::kDropOff)] =
      std::max<std::int64_t>(c.counts[index_of(ActivityType::kDropOff)], 1200);
  const auto cat = generate_poi_catalog(c, 1);
  const auto homes = cat.of_type(ActivityType::kHome);
  const auto visits = cat.of_type(ActivityType::kVisit);
  ASSERT_EQ(homes.size(), 1000u);
  EXPECT_TRUE(std::equal(homes.begin(), homes.end(), visits.begin(), visits.end()));
}

TEST(PoiCatalog, EveryTypeCoveredAndCountsMet) {
  const auto c = small_config();
  const auto cat = generate_poi_catalog(c, 2);
  EXPECT_TRUE(cat.covers_all_types());
  for (auto t : kAllActivityTypes) {
    EXPECT_GE(static_cast<std::int64_t>(cat.of_type(t).size()), c.counts[index_of(t)] * 9 / 10)
        << to_string(t);
  }
  for (const auto& p : cat.pois()) EXPECT_TRUE(c.bbox.contains(p.location()));
}

TEST(PoiCatalog, ZeroCountThrows) {
  auto c = small_config();
  c.counts[index_of(ActivityType::kReligious)] = 0;
  EXPECT_THROW(generate_poi_catalog(c, 1), ConfigError);
  c.counts.fill(0);
  EXPECT_THROW(generate_poi_catalog(c, 1), ConfigError);
}

TEST(PoiCatalog, DeterministicForSeed) {
  const auto a = generate_poi_catalog(small_config(), 9);
  const auto b = generate_poi_catalog(small_config(), 9);
  const auto c = generate_poi_catalog(small_config(), 10);
  EXPECT_TRUE(std::equal(a.pois().begin(), a.pois().end(), b.pois().begin(), b.pois().end()));
  EXPECT_FALSE(std::equal(a.pois().begin(), a.pois().end(), c.pois().begin(), c.pois().end()));
}

TEST(PoiCatalog, DuplicateIdThrows) {
  std::vector<PoiRecord> pois{{1, "", 34.0, -118.0, {ActivityType::kHome}},
                              {1, "x", 34.1, -118.1, {ActivityType::kWork}}};
  EXPECT_THROW(PoiCatalog(std::move(pois)), SchemaError);
}

TEST(RoadGraph, TwoNodeOneEdgeFile) {
  std::istringstream in("u,v,lat_u,lon_u,lat_v,lon_v,length_m,speed_mps\n"
                        "10,20,34.0,-118.0,34.01,-118.0,1000,10\n");
  const auto g = build_road_graph(parse_edge_list(in));
  EXPECT_EQ(g.num_nodes(), 2u);
  EXPECT_EQ(g.num_edges(), 1u);
}

TEST(RoadGraph, NegativeLengthIsParseErrorWithLine) {
  std::istringstream in("# comment\n1,2,34.0,-118.0,34.01,-118.0,-5,10\n");
  try {
    parse_edge_list(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(RoadGraph, MalformedRowIsParseError) {
  std::istringstream in("1,2,34.0,-118.0\n");
  EXPECT_THROW(parse_edge_list(in), ParseError);
  std::istringstream bad("1,x,34.0,-118.0,34.01,-118.0,5,10\n");
  EXPECT_THROW(parse_edge_list(bad), ParseError);
}

// Directed adjacencies of an r x c 4-neighbour grid, counted cell by cell.
std::size_t grid_edges_by_enumeration(int rows, int cols) {
  std::size_t n = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int dr[] = {1, -1, 0, 0};
      const int dc[] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const int rr = r + dr[k], cc = c + dc[k];
        if (rr >= 0 && rr < rows && cc >= 0 && cc < cols) ++n;
      }
    }
  }
  return n;
}

TEST(RoadGraph, GridTenByTen) {
  GridGraphConfig cfg;
  cfg.rows = 10;
  cfg.cols = 10;
  cfg.spacing_m = 500.0;
  cfg.speed_mps = 13.9;
  const auto g = generate_grid_graph(cfg);
  EXPECT_EQ(g.num_nodes(), 100u);
  EXPECT_EQ(grid_edges_by_enumeration(10, 10), 360u);
  EXPECT_EQ(g.num_edges(), 360u);
}

TEST(RoadGraph, KeepsLargestComponentOnly) {
  std::istringstream in("1,2,34.0,-118.0,34.01,-118.0,100,10\n"
                        "2,3,34.01,-118.0,34.02,-118.0,100,10\n"
                        "7,8,35.0,-118.0,35.01,-118.0,100,10\n");
  const auto g = build_road_graph(parse_edge_list(in));
  EXPECT_EQ(g.num_nodes(), 3u);
}

TEST(RoadGraph, EdgeListRoundTrip) {
  GridGraphConfig cfg;
  cfg.rows = 4;
  cfg.cols = 3;
  const auto g = generate_grid_graph(cfg);
  std::stringstream ss;
  write_edge_list(g, ss);
  const auto h = build_road_graph(parse_edge_list(ss));
  ASSERT_EQ(h.num_nodes(), g.num_nodes());
  ASSERT_EQ(h.num_edges(), g.num_edges());
  std::map<std::int64_t, LatLon> by_id;
  for (NodeIndex i = 0; i < g.num_nodes(); ++i) by_id[g.node_id(i)] = g.node(i);
  for (NodeIndex i = 0; i < h.num_nodes(); ++i) {
    EXPECT_EQ(h.node(i).lat, by_id.at(h.node_id(i)).lat);
    EXPECT_EQ(h.node(i).lon, by_id.at(h.node_id(i)).lon);
  }
}

class PopulationTest : public ::testing::Test {
 protected:
  PopulationTest()
      : catalog_(generate_poi_catalog(small_config(), 3)),
        oracle_(generate_grid_graph(GridGraphConfig{})) {}
  PoiCatalog catalog_;
  routing::TravelTimeOracle oracle_;
};

TEST_F(PopulationTest, SingleAgentHasValidHome) {
  const auto agents = generate_population(1, catalog_, oracle_, {}, 1);
  ASSERT_EQ(agents.size(), 1u);
  EXPECT_TRUE(catalog_.at(agents[0].home_poi).act_types.contains(ActivityType::kHome));
}

TEST_F(PopulationTest, NoWorkersWithZeroFraction) {
  PopulationConfig cfg;
  cfg.worker_fraction = 0.0;
  for (const auto& a : generate_population(100, catalog_, oracle_, cfg, 1)) {
    EXPECT_FALSE(a.work_poi.has_value());
    EXPECT_FALSE(a.demographics.worker);
  }
}

TEST_F(PopulationTest, DeterministicAndWellFormed) {
  const auto a = generate_population(100, catalog_, oracle_, {}, 5);
  const auto b = generate_population(100, catalog_, oracle_, {}, 5);
  EXPECT_EQ(a, b);
  std::set<AgentId> ids;
  for (const auto& r : a) {
    ids.insert(r.agent_id);
    EXPECT_EQ(r.demographics.worker, r.work_poi.has_value());
    if (r.work_poi) {
      EXPECT_TRUE(catalog_.at(*r.work_poi).act_types.contains(ActivityType::kWork));
    }
    EXPECT_GE(r.demographics.household_size, 1);
    EXPECT_LE(r.demographics.household_size, 5);
  }
  EXPECT_EQ(ids.size(), 100u);
}

TEST_F(PopulationTest, OverCapacityThrows) {
  const auto homes = static_cast<std::int64_t>(catalog_.of_type(ActivityType::kHome).size());
  PopulationConfig cfg;
  cfg.max_occupancy = 1;
  EXPECT_THROW(generate_population(homes + 1, catalog_, oracle_, cfg, 1), ConfigError);
  EXPECT_THROW(generate_population(0, catalog_, oracle_, cfg, 1), ConfigError);
}

}  // namespace
}  // namespace mobsim::world
