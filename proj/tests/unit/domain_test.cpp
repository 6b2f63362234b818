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

#include <unordered_set>
#include <vector>

#include "mobsim/domain/activity_type.hpp"
#include "mobsim/domain/grouping.hpp"
#include "mobsim/domain/records.hpp"
#include "mobsim/domain/time.hpp"
#include "mobsim/domain/validation.hpp"
#include "test_support.hpp"

namespace mobsim {
namespace {

using testing::at;
using testing::stay;

TEST(Timestamp, IsoRoundTripKeepsOffset) {
  const auto t = parse_iso("2024-01-01T08:29:09-08:00");
  EXPECT_EQ(format_iso(t), "2024-01-01T08:29:09-08:00");
  EXPECT_EQ(t.offset_min, -480);
  EXPECT_EQ(t, make_timestamp(2024, 1, 1, 8, 29, 9));
  const auto u = parse_iso("2024-03-10T23:00:00+05:30");
  EXPECT_EQ(format_iso(u), "2024-03-10T23:00:00+05:30");
  EXPECT_EQ(parse_iso(format_iso(u)), u);
}

TEST(Timestamp, MalformedTextThrows) {
  EXPECT_THROW(parse_iso("2024-01-01 08:00"), Error);
  EXPECT_THROW(parse_iso("2024-13-01T08:00:00-08:00"), Error);
}

TEST(Timestamp, RandomRoundTrips) {
  testing::Gen g(3);
  for (int i = 0; i < 2000; ++i) {
    const Timestamp t(g.integer(0, 4'000'000'000LL),
                      static_cast<std::int16_t>(g.integer(-12 * 4, 14 * 4) * 15));
    EXPECT_EQ(parse_iso(format_iso(t)), t);
  }
}

TEST(SimClock, WindowsAndDays) {
  const SimClock c;
  EXPECT_EQ(format_iso(c.train_start()), "2024-01-01T00:00:00-08:00");
  EXPECT_EQ(format_iso(c.test_start()), "2024-01-29T00:00:00-08:00");
  EXPECT_EQ(format_iso(c.last_instant()), "2024-02-25T23:59:59-08:00");
  EXPECT_EQ(c.day_of(at(1, 0)), 1);
  EXPECT_EQ(c.day_of(at(29, 12)), 29);
  EXPECT_EQ(c.weekday(1), 0);  // 2024-01-01 is a Monday
  EXPECT_TRUE(c.is_weekend(6));
  EXPECT_TRUE(c.is_weekend(7));
  EXPECT_FALSE(c.is_weekend(8));
}

TEST(ActivitySet, SerializesInCanonicalOrder) {
  const ActivitySet s{ActivityType::kDropOff, ActivityType::kVisit, ActivityType::kHome};
  EXPECT_EQ(s.to_string(), "Home|Visit|DropOff");
  EXPECT_EQ(ActivitySet::parse("Home|Visit|DropOff"), s);
  EXPECT_THROW(ActivitySet::parse("Home|Nap"), SchemaError);
}

TEST(ActivityType, NamesRoundTrip) {
  for (auto t : kAllActivityTypes) EXPECT_EQ(parse_activity(to_string(t)), t);
}

TEST(Validation, DisjointIntervalsAreValid) {
  const std::vector<Staypoint> seq{stay(1, 1, at(1, 8), at(1, 9)),
                                   stay(1, 2, at(1, 9, 30), at(1, 10))};
  EXPECT_TRUE(validate_staypoint_sequence(seq).empty());
}

TEST(Validation, OverlapReportedAtSecondIndex) {
  const std::vector<Staypoint> seq{stay(1, 1, at(1, 8), at(1, 9)),
                                   stay(1, 2, at(1, 8, 30), at(1, 10))};
  const auto v = validate_staypoint_sequence(seq);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].index, 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::kOverlap);
}

TEST(Validation, ReversedIntervalReported) {
  const std::vector<Staypoint> seq{stay(1, 1, at(1, 9), at(1, 8))};
  const auto v = validate_staypoint_sequence(seq);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::kReversedInterval);
}

TEST(Validation, UnknownPoiAndMixedAgents) {
  const std::unordered_set<PoiId> known{1};
  const std::vector<Staypoint> seq{stay(1, 1, at(1, 8), at(1, 9)),
                                   stay(2, 5, at(1, 10), at(1, 11))};
  const auto v = validate_staypoint_sequence(seq, &known);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].kind, ViolationKind::kUnknownPoi);
  EXPECT_EQ(v[1].kind, ViolationKind::kMixedAgents);
}

TEST(TruncateToWindow, ClipsAtTrainStart) {
  const SimClock c;
  const std::vector<Staypoint> seq{
      stay(1, 1, parse_iso("2023-12-31T22:00:00-08:00"), parse_iso("2024-01-01T07:00:00-08:00"))};
  const auto s = truncate_to_window(seq, c);
  ASSERT_EQ(s.train.size(), 1u);
  EXPECT_TRUE(s.test.empty());
  EXPECT_EQ(format_iso(s.train[0].start), "2024-01-01T00:00:00-08:00");
  EXPECT_EQ(format_iso(s.train[0].end), "2024-01-01T07:00:00-08:00");
}

TEST(TruncateToWindow, BoundarySpanningStayGoesToTrainWhole) {
  const SimClock c;
  const std::vector<Staypoint> seq{
      stay(1, 1, parse_iso("2024-01-28T17:00:00-08:00"), parse_iso("2024-01-29T08:00:00-08:00")),
      stay(1, 2, parse_iso("2024-01-29T08:30:00-08:00"), parse_iso("2024-01-29T17:00:00-08:00"))};
  const auto s = truncate_to_window(seq, c);
  ASSERT_EQ(s.train.size(), 1u);
  ASSERT_EQ(s.test.size(), 1u);
  EXPECT_EQ(s.train[0], seq[0]);
  EXPECT_EQ(s.test[0], seq[1]);
}

TEST(TruncateToWindow, InteriorTestStayUnchanged) {
  const SimClock c;
  const std::vector<Staypoint> seq{stay(1, 1, at(37, 9), at(37, 17))};
  const auto s = truncate_to_window(seq, c);
  ASSERT_EQ(s.test.size(), 1u);
  EXPECT_EQ(s.test[0], seq[0]);
}

TEST(TruncateToWindow, ClipsAtTestEnd) {
  const SimClock c;
  const std::vector<Staypoint> seq{
      stay(1, 1, parse_iso("2024-02-25T20:00:00-08:00"), parse_iso("2024-02-26T07:00:00-08:00"))};
  const auto s = truncate_to_window(seq, c);
  ASSERT_EQ(s.test.size(), 1u);
  EXPECT_EQ(s.test[0].end, c.last_instant());
}

TEST(TruncateToWindow, OutsideWindowThrows) {
  const SimClock c;
  const std::vector<Staypoint> before{stay(1, 1, parse_iso("2023-12-30T08:00:00-08:00"),
                                           parse_iso("2023-12-30T09:00:00-08:00"))};
  const std::vector<Staypoint> after{stay(1, 1, parse_iso("2024-03-01T08:00:00-08:00"),
                                          parse_iso("2024-03-01T09:00:00-08:00"))};
  EXPECT_THROW(truncate_to_window(before, c), OutOfWindowError);
  EXPECT_THROW(truncate_to_window(after, c), OutOfWindowError);
}

TEST(TruncateToWindow, NoStaypointInBothOutputs) {
  const SimClock c;
  testing::Gen g(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Staypoint> seq;
    Timestamp t = c.train_start().plus_seconds(-g.integer(0, 20000));
    while (true) {
      const Timestamp e = t.plus_seconds(g.integer(600, 40000));
      if (t >= c.last_instant()) break;
      if (e > c.train_start()) seq.push_back(stay(1, g.integer(1, 9), t, e));
      t = e.plus_seconds(g.integer(0, 3000));
    }
    const auto s = truncate_to_window(seq, c);
    EXPECT_EQ(s.train.size() + s.test.size(), seq.size());
    for (const auto& sp : s.train) {
      EXPECT_GE(sp.start, c.train_start());
      EXPECT_LT(sp.start, c.train_end());
    }
    for (const auto& sp : s.test) {
      EXPECT_GE(sp.start, c.test_start());
      EXPECT_LE(sp.end, c.last_instant());
    }
    EXPECT_TRUE(validate_staypoint_sequence(s.train).empty());
    EXPECT_TRUE(validate_staypoint_sequence(s.test).empty());
  }
}

TEST(Grouping, GroupsSortAndAlign) {
  const std::vector<Staypoint> rows{stay(2, 1, at(1, 10), at(1, 11)),
                                    stay(1, 1, at(1, 12), at(1, 13)),
                                    stay(1, 2, at(1, 8), at(1, 9))};
  const auto g = group_by_agent(rows);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0][0].poi_id, 2);
  EXPECT_EQ(g[1][0].agent_id, 2);
  const std::vector<AgentId> ids{3, 2, 1};
  const auto a = align_to_agents(rows, ids);
  EXPECT_TRUE(a[0].empty());
  EXPECT_EQ(a[1].size(), 1u);
  EXPECT_EQ(a[2].size(), 2u);
  EXPECT_EQ(flatten(a).size(), 3u);
}

}  // namespace
}  // namespace mobsim
