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
#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "mobsim/activity/generator.hpp"
#include "mobsim/activity/jsd.hpp"
#include "mobsim/activity/model.hpp"
#include "mobsim/domain/records.hpp"
#include "mobsim/error.hpp"

namespace mobsim::activity {

inline constexpr int kDailyCountBins = 16;  // 0..14, then 15+
inline constexpr int kDurationBins = 48;    // 30-minute bins up to 24 h
inline constexpr std::size_t kMinChainsForValidation = 100;

struct ChainStatsReport {
  double jsd_activity_freq = 0.0;
  double jsd_start_time = 0.0;
  double jsd_end_time = 0.0;
  double jsd_daily_count = 0.0;
  double jsd_duration = 0.0;
  double transition_similarity = 1.0;
};

// Histograms of a chain set plus transition counts. Tallies merge by
// addition, so partial tallies can be reduced in any order.
class ChainTally {
 public:
  static constexpr std::size_t kTransitionCells =
      std::size_t{kNumDayClasses} * kSlots * kNumActivityTypes * kNumActivityTypes;

  ChainTally()
      : activity_freq(kNumActivityTypes, 0.0),
        start_time(kSlots, 0.0),
        end_time(kSlots, 0.0),
        daily_count(kDailyCountBins, 0.0),
        duration(kDurationBins, 0.0),
        transitions(kTransitionCells, 0.0),
        expected(kTransitionCells, 0.0) {}

  std::vector<double> activity_freq;
  std::vector<double> start_time;
  std::vector<double> end_time;
  std::vector<double> daily_count;
  std::vector<double> duration;
  // Observed counts of consecutive-entry transitions, indexed by
  // (day class, slot of the earlier entry's end, from, to).
  std::vector<double> transitions;
  // Sum of the reference model rows at each observed transition, laid out
  // like `transitions`; empty rows when no model was supplied.
  std::vector<double> expected;

  static std::size_t cell(int dc, int slot, std::size_t from, std::size_t to) {
    return ((static_cast<std::size_t>(dc) * kSlots + static_cast<std::size_t>(slot)) *
                kNumActivityTypes +
            from) *
               kNumActivityTypes +
           to;
  }

  // Adds one chain. `model`, when given, is the agent's specialised model
  // and feeds `expected`.
  void add(const ActivityChain& chain, const SimClock& clock,
           const ActivityModel* model = nullptr) {
    const auto& es = chain.entries;
    std::size_t i = 0;
    while (i < es.size()) {
      const int day = es[i].day;
      const int dc = static_cast<int>(day_class(clock, day));
      std::size_t j = i;
      for (; j < es.size() && es[j].day == day; ++j) {
        const auto& e = es[j];
        activity_freq[index_of(e.type)] += 1.0;
        start_time[slot_of(e.start_min)] += 1.0;
        end_time[slot_of(e.end_min == kMinutesPerDay ? e.end_min - 1 : e.end_min)] += 1.0;
        duration[std::min(kDurationBins - 1, (e.end_min - e.start_min) / 30)] += 1.0;
        if (j > i) add_transition(dc, es[j - 1], e, model);
      }
      daily_count[std::min<std::size_t>(kDailyCountBins - 1, j - i)] += 1.0;
      i = j;
    }
  }

  void merge(const ChainTally& o) {
    auto acc = [](std::vector<double>& a, const std::vector<double>& b) {
      for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
    };
    acc(activity_freq, o.activity_freq);
    acc(start_time, o.start_time);
    acc(end_time, o.end_time);
    acc(daily_count, o.daily_count);
    acc(duration, o.duration);
    acc(transitions, o.transitions);
    acc(expected, o.expected);
  }

 private:
  void add_transition(int dc, const ChainEntry& prev, const ChainEntry& next,
                      const ActivityModel* model) {
    const int slot = slot_of(prev.end_min);
    const std::size_t from = index_of(prev.type);
    transitions[cell(dc, slot, from, index_of(next.type))] += 1.0;
    if (model == nullptr) return;
    TransitionRow r = model->row(static_cast<DayClass>(dc), slot, prev.type);
    // Home -> Home ends the day and is never observed between entries.
    if (prev.type == ActivityType::kHome) {
      r[index_of(ActivityType::kHome)] = 0.0;
    }
    double s = 0.0;
    for (double p : r) s += p;
    if (!(s > 0.0)) return;
    for (std::size_t to = 0; to < kNumActivityTypes; ++to) {
      expected[cell(dc, slot, from, to)] += r[to] / s;
    }
  }
};

namespace detail {

// 1 - count-weighted mean total-variation distance between the observed
// rows of `obs` and the matching rows of `ref` (both raw counts or sums).
inline double weighted_row_similarity(const std::vector<double>& obs,
                                      const std::vector<double>& ref) {
  double tv_sum = 0.0;
  double weight = 0.0;
  for (std::size_t base = 0; base < obs.size(); base += kNumActivityTypes) {
    double n_obs = 0.0, n_ref = 0.0;
    for (std::size_t k = 0; k < kNumActivityTypes; ++k) {
      n_obs += obs[base + k];
      n_ref += ref[base + k];
    }
    if (n_obs <= 0.0 || n_ref <= 0.0) continue;
    double tv = 0.0;
    for (std::size_t k = 0; k < kNumActivityTypes; ++k) {
      tv += std::abs(obs[base + k] / n_obs - ref[base + k] / n_ref);
    }
    tv_sum += n_obs * 0.5 * tv;
    weight += n_obs;
  }
  return weight > 0.0 ? 1.0 - tv_sum / weight : 1.0;
}

}  // namespace detail

// 1 - mean row-wise total-variation distance between two models, all rows
// weighted equally.
inline double transition_similarity(const ActivityModel& a, const ActivityModel& b) {
  double tv_sum = 0.0;
  for (std::size_t i = 0; i < a.num_rows(); ++i) {
    double tv = 0.0;
    for (std::size_t k = 0; k < kNumActivityTypes; ++k) {
      tv += std::abs(a.row_at(i)[k] - b.row_at(i)[k]);
    }
    tv_sum += 0.5 * tv;
  }
  return 1.0 - tv_sum / static_cast<double>(a.num_rows());
}

inline ChainStatsReport compare_tallies(const ChainTally& observed,
                                        const ChainTally& reference,
                                        bool against_model) {
  ChainStatsReport r;
  r.jsd_activity_freq = jsd(observed.activity_freq, reference.activity_freq);
  r.jsd_start_time = jsd(observed.start_time, reference.start_time);
  r.jsd_end_time = jsd(observed.end_time, reference.end_time);
  r.jsd_daily_count = jsd(observed.daily_count, reference.daily_count);
  r.jsd_duration = jsd(observed.duration, reference.duration);
  r.transition_similarity = detail::weighted_row_similarity(
      observed.transitions, against_model ? observed.expected : reference.transitions);
  return r;
}

inline void require_enough_chains(std::size_t n) {
  if (n < kMinChainsForValidation) {
    throw MetricError("chain validation needs at least " +
                      std::to_string(kMinChainsForValidation) + " chains, got " +
                      std::to_string(n));
  }
}

// Validates chains against reference histograms; transitions are compared
// with the reference's observed transition rows.
inline ChainStatsReport validate_chains(std::span<const ActivityChain> chains,
                                        const ChainTally& reference,
                                        const SimClock& clock) {
  require_enough_chains(chains.size());
  ChainTally observed;
  for (const auto& c : chains) observed.add(c, clock);
  return compare_tallies(observed, reference, false);
}

// Validates chains against a model. Reference histograms come from an
// independent sample of the model for the same agents; transitions are
// compared with each agent's specialised model rows.
inline ChainStatsReport validate_chains(std::span<const ActivityChain> chains,
                                        std::span<const AgentRecord> agents,
                                        const ActivityModel& model, const SimClock& clock,
                                        std::uint64_t seed) {
  require_enough_chains(chains.size());
  std::unordered_map<AgentId, const AgentRecord*> by_id;
  for (const auto& a : agents) by_id[a.agent_id] = &a;
  const ProfiledModels profiles(model);

  ChainTally observed;
  std::vector<AgentRecord> sampled;
  sampled.reserve(chains.size());
  for (const auto& c : chains) {
    auto it = by_id.find(c.agent_id);
    if (it == by_id.end()) {
      throw MetricError("chain for unknown agent " + std::to_string(c.agent_id));
    }
    observed.add(c, clock, &profiles.for_agent(*it->second));
    sampled.push_back(*it->second);
  }
  ChainTally reference;
  for (const auto& c : generate_chains(sampled, model, clock,
                                       derive_seed(seed, "chain_reference"))) {
    reference.add(c, clock);
  }
  return compare_tallies(observed, reference, true);
}

}  // namespace mobsim::activity
