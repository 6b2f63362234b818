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
#include <vector>

#include "mobsim/activity/chain_stats.hpp"
#include "mobsim/activity/generator.hpp"
#include "mobsim/activity/jsd.hpp"
#include "mobsim/activity/model.hpp"
#include "mobsim/domain/validation.hpp"
#include "test_support.hpp"

namespace mobsim::activity {
namespace {

// Direct base-2 JSD, written out term by term.
double jsd_oracle(std::vector<double> p, std::vector<double> q) {
  double sp = 0, sq = 0;
  for (double v : p) sp += v;
  for (double v : q) sq += v;
  double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double a = p[i] / sp, b = q[i] / sq, m = (a + b) / 2;
    if (a > 0) d += 0.5 * a * std::log2(a / m);
    if (b > 0) d += 0.5 * b * std::log2(b / m);
  }
  return d;
}

TEST(Jsd, IdentityIsZero) {
  const std::vector<double> p{0.2, 0.3, 0.5};
  EXPECT_DOUBLE_EQ(jsd(p, p), 0.0);
}

TEST(Jsd, DisjointSupportsIsOne) {
  EXPECT_DOUBLE_EQ(jsd(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 1.0);
}

TEST(Jsd, HalfAgainstPoint) {
  const double v = jsd(std::vector<double>{0.5, 0.5}, std::vector<double>{1, 0});
  EXPECT_NEAR(v, jsd_oracle({0.5, 0.5}, {1, 0}), 1e-15);
  EXPECT_NEAR(v, 0.3113, 5e-5);
}

TEST(Jsd, RenormalizesAndReports) {
  bool renorm = false;
  EXPECT_NEAR(jsd(std::vector<double>{2, 2}, std::vector<double>{3, 0}, &renorm), 0.3113, 5e-5);
  EXPECT_TRUE(renorm);
}

TEST(Jsd, RejectsEmptyAndZeroMass) {
  EXPECT_THROW(jsd(std::vector<double>{}, std::vector<double>{}), MetricError);
  EXPECT_THROW(jsd(std::vector<double>{0, 0}, std::vector<double>{1, 0}), MetricError);
  EXPECT_THROW(jsd(std::vector<double>{1}, std::vector<double>{1, 0}), MetricError);
}

TEST(Jsd, MatchesOracleAndStaysInUnitInterval) {
  testing::Gen g(4);
  for (int i = 0; i < 500; ++i) {
    const auto n = static_cast<std::size_t>(g.integer(1, 20));
    std::vector<double> p(n), q(n);
    for (auto& v : p) v = g.coin(0.2) ? 0.0 : g.real(0.0, 3.0);
    for (auto& v : q) v = g.coin(0.2) ? 0.0 : g.real(0.0, 3.0);
    p[0] += 0.1;
    q[n - 1] += 0.1;
    const double d = jsd(p, q);
    EXPECT_NEAR(d, jsd_oracle(p, q), 1e-12);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
    EXPECT_NEAR(d, jsd(q, p), 1e-15);
  }
}

TEST(ActivityModel, DefaultModelValidatesAndSurvivesProfiles) {
  const auto m = ActivityModel::default_model();
  EXPECT_NO_THROW(m.validate());
  for (bool w : {false, true}) {
    for (bool s : {false, true}) EXPECT_NO_THROW(m.for_profile(w, s).validate());
  }
  const auto nw = m.for_profile(false, false);
  for (std::size_t i = 0; i < nw.num_rows(); ++i) {
    EXPECT_EQ(nw.row_at(i)[index_of(ActivityType::kWork)], 0.0);
    EXPECT_EQ(nw.row_at(i)[index_of(ActivityType::kSchool)], 0.0);
  }
}

TEST(ActivityModel, RejectsRowsThatDoNotSumToOne) {
  auto m = ActivityModel::default_model();
  m.row(DayClass::kWeekday, 10, ActivityType::kWork)[0] += 0.5;
  EXPECT_THROW(m.validate(), ConfigError);
}

TEST(Generator, HomeOnlyModelGivesOneHomeBlockPerDay) {
  const SimClock clock;
  AgentRecord a;
  a.agent_id = 3;
  const auto chain = generate_chain(a, ActivityModel::home_only(), clock, 1);
  ASSERT_EQ(chain.entries.size(), static_cast<std::size_t>(SimClock::kNumDays));
  for (const auto& e : chain.entries) {
    EXPECT_EQ(e.type, ActivityType::kHome);
    EXPECT_EQ(e.start_min, 0);
    EXPECT_EQ(e.end_min, kMinutesPerDay);
  }
}

ActivityModel commuter_model() {
  ActivityModel m;
  using A = ActivityType;
  for (int dc = 0; dc < kNumDayClasses; ++dc) {
    for (int s = 0; s < kSlots; ++s) {
      for (auto t : kAllActivityTypes) {
        m.row(static_cast<DayClass>(dc), s, t)[index_of(A::kHome)] = 1.0;
      }
      m.row(static_cast<DayClass>(dc), s, A::kHome)[index_of(A::kHome)] = s == 17 ? 0.0 : 1.0;
      m.row(static_cast<DayClass>(dc), s, A::kHome)[index_of(A::kWork)] = s == 17 ? 1.0 : 0.0;
    }
    m.first_departure(static_cast<DayClass>(dc)) = {510.0, 0.0, 300.0, 720.0};
  }
  m.duration(A::kWork) = {480.0, 0.0};
  m.duration(A::kHome) = {60.0, 0.0};
  m.travel_gap() = {30.0, 0.0};
  return m;
}

TEST(Generator, PeakedModelReproducesCommuterDay) {
  const SimClock clock;
  AgentRecord a;
  a.agent_id = 1;
  a.demographics.worker = true;
  const auto chain = generate_chain(a, commuter_model(), clock, 1);
  std::vector<ChainEntry> day1;
  for (const auto& e : chain.entries) {
    if (e.day == 1) day1.push_back(e);
  }
  ASSERT_EQ(day1.size(), 3u);
  EXPECT_EQ(day1[0], (ChainEntry{1, ActivityType::kHome, 0, 510}));
  EXPECT_EQ(day1[1], (ChainEntry{1, ActivityType::kWork, 540, 1020}));
  EXPECT_EQ(day1[2].type, ActivityType::kHome);
  EXPECT_EQ(day1[2].start_min, 1050);
  EXPECT_EQ(day1[2].end_min, kMinutesPerDay);
}

TEST(Generator, DeterministicAndWellFormed) {
  const SimClock clock;
  const auto model = ActivityModel::default_model();
  testing::Gen g(12);
  for (AgentId id = 1; id <= 50; ++id) {
    AgentRecord a;
    a.agent_id = id;
    a.demographics.worker = g.coin(0.6);
    a.demographics.student = g.coin(0.2);
    const auto c1 = generate_chain(a, model, clock, 77);
    EXPECT_EQ(c1, generate_chain(a, model, clock, 77));
    EXPECT_TRUE(validate_chain(c1).empty());
    for (const auto& e : c1.entries) {
      if (!a.demographics.worker) {
        EXPECT_NE(e.type, ActivityType::kWork);
      }
      if (!a.demographics.student) {
        EXPECT_NE(e.type, ActivityType::kSchool);
      }
      EXPECT_GE(e.end_min - e.start_min, kMinDurationMin);
    }
  }
}

std::vector<AgentRecord> mixed_agents(std::size_t n) {
  std::vector<AgentRecord> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].agent_id = static_cast<AgentId>(i + 1);
    out[i].demographics.worker = i % 5 < 3;
    out[i].demographics.student = i % 7 == 0;
  }
  return out;
}

TEST(ChainStats, SelfConsistentOnDefaultModel) {
  const SimClock clock;
  const auto agents = mixed_agents(1500);
  const auto model = ActivityModel::default_model();
  const auto chains = generate_chains(agents, model, clock, 5);
  const auto r = validate_chains(chains, agents, model, clock, 6);
  EXPECT_LE(r.jsd_activity_freq, 0.05);
  EXPECT_LE(r.jsd_start_time, 0.05);
  EXPECT_LE(r.jsd_end_time, 0.05);
  EXPECT_LE(r.jsd_daily_count, 0.05);
  EXPECT_LE(r.jsd_duration, 0.05);
  EXPECT_GE(r.transition_similarity, 0.9);
}

TEST(ChainStats, TransitionSimilarityOfModelWithItselfIsOne) {
  const auto m = ActivityModel::default_model();
  EXPECT_DOUBLE_EQ(transition_similarity(m, m), 1.0);
  EXPECT_LT(transition_similarity(m, ActivityModel::home_only()), 1.0);
}

TEST(ChainStats, HomeOnlyChainsDivergeFromDiverseReference) {
  const SimClock clock;
  const auto agents = mixed_agents(300);
  const auto diverse = generate_chains(agents, ActivityModel::default_model(), clock, 1);
  const auto home = generate_chains(agents, ActivityModel::home_only(), clock, 1);
  ChainTally ref;
  for (const auto& c : diverse) ref.add(c, clock);
  const auto r = validate_chains(home, ref, clock);

  // Oracle: entry-type frequencies counted directly from the chains.
  std::vector<double> p(kNumActivityTypes, 0.0), q(kNumActivityTypes, 0.0);
  for (const auto& c : home) {
    for (const auto& e : c.entries) p[index_of(e.type)] += 1;
  }
  for (const auto& c : diverse) {
    for (const auto& e : c.entries) q[index_of(e.type)] += 1;
  }
  EXPECT_NEAR(r.jsd_activity_freq, jsd_oracle(p, q), 1e-12);
  // With every observed entry Home and a reference Home share h, the
  // divergence is 0.5 * (-log2((1+h)/2) + h*log2(2h/(1+h)) + (1-h)).
  double total = 0;
  for (double v : q) total += v;
  const double h = q[index_of(ActivityType::kHome)] / total;
  const double closed =
      0.5 * (-std::log2((1 + h) / 2) + h * std::log2(2 * h / (1 + h)) + (1 - h));
  EXPECT_NEAR(r.jsd_activity_freq, closed, 1e-12);
  EXPECT_GT(r.jsd_activity_freq, 0.2);
  EXPECT_GT(r.jsd_daily_count, 0.5);
  EXPECT_GT(r.jsd_start_time, 0.5);
}

TEST(ChainStats, TooFewChainsThrows) {
  const SimClock clock;
  const auto agents = mixed_agents(10);
  const auto chains = generate_chains(agents, ActivityModel::default_model(), clock, 1);
  EXPECT_THROW(validate_chains(chains, agents, ActivityModel::default_model(), clock, 2),
               MetricError);
}

}  // namespace
}  // namespace mobsim::activity
