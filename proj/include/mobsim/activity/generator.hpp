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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "mobsim/activity/model.hpp"
#include "mobsim/domain/records.hpp"
#include "mobsim/parallel.hpp"
#include "mobsim/random.hpp"

namespace mobsim::activity {

namespace detail {

// Minutes kept free at the end of the day for the trip home plus a short
// Home block.
inline constexpr int kReturnRoom = 15;

inline int sample_minutes(Rng& rng, const DurationParams& d, int floor_min) {
  const double v = lognormal_median(rng, d.median_min, d.sigma);
  return std::max(floor_min, static_cast<int>(std::lround(v)));
}

inline void generate_day(const ActivityModel& m, int day, DayClass dc, Rng& rng,
                         std::vector<ChainEntry>& out) {
  using A = ActivityType;
  const auto& anchor = m.first_departure(dc);
  const double dep_raw =
      anchor.sd_min > 0.0
          ? std::normal_distribution<double>(anchor.mean_min, anchor.sd_min)(rng)
          : anchor.mean_min;
  const int dep = static_cast<int>(
      std::lround(std::clamp(dep_raw, anchor.earliest_min, anchor.latest_min)));

  const std::size_t first = out.size();
  out.push_back({day, A::kHome, 0, dep});
  auto close_home = [&](int t) {
    // Extend a trailing Home block, or open the final one.
    if (out.back().type == A::kHome) {
      out.back().end_min = kMinutesPerDay;
    } else {
      const int s = std::min(t, kMinutesPerDay - kMinDurationMin);
      out.push_back({day, A::kHome, s, kMinutesPerDay});
    }
  };

  int t = dep;
  A cur = A::kHome;
  for (;;) {
    const auto& row = m.row(dc, slot_of(t), cur);
    const auto next = activity_from_index(sample_weighted(rng, row));
    if (cur == A::kHome && next == A::kHome) {
      close_home(t);
      return;
    }
    const int gap = sample_minutes(rng, m.travel_gap(), kMinDurationMin);
    const int s = t + gap;
    const bool room_left =
        static_cast<int>(out.size() - first) < m.max_entries_per_day() - 1;
    const int dur = sample_minutes(rng, m.duration(next), kMinDurationMin);

    if (next == A::kHome) {
      if (!room_left || s + dur > kMinutesPerDay - kMinDurationMin) {
        close_home(s);
        return;
      }
      out.push_back({day, A::kHome, s, s + dur});
      t = s + dur;
      cur = A::kHome;
      continue;
    }
    const int e = std::min(s + dur, kMinutesPerDay - kReturnRoom);
    if (!room_left || e - s < kMinDurationMin) {
      close_home(s);
      return;
    }
    out.push_back({day, next, s, e});
    t = e;
    cur = next;
  }
}

}  // namespace detail

inline DayClass day_class(const SimClock& clock, int day) {
  return clock.is_weekend(day) ? DayClass::kWeekend : DayClass::kWeekday;
}

// Eight weeks of activities for one agent from an already specialised
// model. Each day opens with Home at 00:00 and closes with Home at 24:00;
// gaps between entries are left for travel.
inline ActivityChain generate_chain_with(AgentId agent_id, const ActivityModel& profiled,
                                         const SimClock& clock, std::uint64_t seed) {
  ActivityChain chain;
  chain.agent_id = agent_id;
  Rng rng = make_rng(seed, "activity_chain", static_cast<std::uint64_t>(agent_id));
  for (int day = 1; day <= SimClock::kNumDays; ++day) {
    detail::generate_day(profiled, day, day_class(clock, day), rng, chain.entries);
  }
  return chain;
}

inline ActivityChain generate_chain(const AgentRecord& agent, const ActivityModel& model,
                                    const SimClock& clock, std::uint64_t seed) {
  return generate_chain_with(
      agent.agent_id,
      model.for_profile(agent.demographics.worker, agent.demographics.student), clock,
      seed);
}

// The four worker/student specialisations of a model, built once.
class ProfiledModels {
 public:
  explicit ProfiledModels(const ActivityModel& base) {
    for (int w = 0; w < 2; ++w) {
      for (int s = 0; s < 2; ++s) models_[w * 2 + s] = base.for_profile(w != 0, s != 0);
    }
  }
  const ActivityModel& for_agent(const AgentRecord& a) const {
    return models_[(a.demographics.worker ? 2 : 0) + (a.demographics.student ? 1 : 0)];
  }

 private:
  std::array<ActivityModel, 4> models_;
};

inline std::vector<ActivityChain> generate_chains(std::span<const AgentRecord> agents,
                                                  const ActivityModel& model,
                                                  const SimClock& clock,
                                                  std::uint64_t seed) {
  model.validate();
  const ProfiledModels profiles(model);
  std::vector<ActivityChain> out(agents.size());
  parallel_for(agents.size(), [&](std::size_t i) {
    out[i] = generate_chain_with(agents[i].agent_id, profiles.for_agent(agents[i]),
                                 clock, seed);
  });
  return out;
}

}  // namespace mobsim::activity
