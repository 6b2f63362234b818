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
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "mobsim/domain/records.hpp"
#include "mobsim/domain/time.hpp"
#include "mobsim/error.hpp"
#include "mobsim/parallel.hpp"
#include "mobsim/random.hpp"
#include "mobsim/routing/realize.hpp"
#include "mobsim/world/poi_catalog.hpp"

namespace mobsim::inject {

enum class AnomalyKind : std::uint8_t { kNonRecurring, kRecurring, kFrequencyShift };

inline const char* to_string(AnomalyKind k) {
  switch (k) {
    case AnomalyKind::kNonRecurring: return "non_recurring";
    case AnomalyKind::kRecurring: return "recurring";
    case AnomalyKind::kFrequencyShift: return "frequency_shift";
  }
  return "unknown";
}

inline AnomalyKind parse_anomaly_kind(const std::string& s) {
  if (s == "non_recurring") return AnomalyKind::kNonRecurring;
  if (s == "recurring") return AnomalyKind::kRecurring;
  if (s == "frequency_shift") return AnomalyKind::kFrequencyShift;
  throw SchemaError("unknown anomaly kind '" + s + "'");
}

struct InjectionPlan {
  double target_agent_prevalence = 0.00191;
  double target_staypoint_prevalence = 0.000203;
  double recurring_fraction = 0.5;
  int repeat_min = 3;
  int repeat_max = 4;
  // Sizing may push repeat counts into [repeat_floor, repeat_limit] to land
  // the staypoint prevalence inside the tolerance band.
  int repeat_floor = 2;
  int repeat_limit = 12;
  double novel_visit_probability = 0.5;  // non-recurring: insertion vs early departure
  double frequency_shift_fraction = 0.0;  // share of recurring agents
  double min_visit_hours = 1.0;
  double max_visit_hours = 11.0;
  double jitter_minutes = 15.0;
  double tolerance = 0.2;  // relative, for both prevalences
  int attempts_per_agent = 50;
  std::uint64_t seed = 0;

  void validate() const {
    auto open01 = [](double p) { return p > 0.0 && p < 1.0; };
    if (!open01(target_agent_prevalence) || !open01(target_staypoint_prevalence)) {
      throw ConfigError("injection prevalences must lie strictly between 0 and 1");
    }
    if (recurring_fraction < 0.0 || recurring_fraction > 1.0 ||
        novel_visit_probability < 0.0 || novel_visit_probability > 1.0 ||
        frequency_shift_fraction < 0.0 || frequency_shift_fraction > 1.0) {
      throw ConfigError("injection fractions must lie in [0, 1]");
    }
    if (repeat_floor < 2 || repeat_min < repeat_floor || repeat_max < repeat_min ||
        repeat_limit < repeat_max) {
      throw ConfigError("recurring repeat counts must satisfy 2 <= floor <= min <= max <= limit");
    }
    if (!(min_visit_hours > 0.0) || max_visit_hours < min_visit_hours) {
      throw ConfigError("inserted visit duration range is invalid");
    }
    if (!(tolerance > 0.0) || attempts_per_agent < 1 || jitter_minutes < 0.0) {
      throw ConfigError("injection tolerance, attempts and jitter must be positive");
    }
  }
};

// Staypoint references are indices into the agent's anomalous test sequence.
struct AnomalyRecord {
  AgentId agent_id = 0;
  AnomalyKind kind = AnomalyKind::kNonRecurring;
  std::string pattern;  // novel_visit | early_departure | recurring_visit | frequency_shift
  PoiId poi_id = 0;     // target POI of the inserted visits, 0 when none
  int repeat_count = 0;
  int cadence_days = 0;
  std::vector<std::size_t> injected;
  std::vector<std::size_t> modified;
  friend bool operator==(const AnomalyRecord&, const AnomalyRecord&) = default;
};

struct InjectionOutcome {
  std::vector<Staypoint> sequence;
  AnomalyRecord record;
};

namespace detail {

inline std::int64_t travel_s(const routing::TravelFn& travel, PoiId a, PoiId b) {
  return static_cast<std::int64_t>(std::ceil(travel(a, b)));
}

// Inserts a visit to `poi` over [s, e]. The stay in progress at `s` is cut
// short (or split around the visit when it also covers `e` plus travel) and
// the first stay that can still last five minutes after the return trip
// starts late; stays in between are dropped. Fails when a touched stay is
// already labelled or nothing can absorb the visit.
inline bool insert_visit(std::vector<Staypoint>& seq, PoiId poi, Timestamp s, Timestamp e,
                         const routing::TravelFn& travel) {
  constexpr std::int64_t kMin = routing::kMinVisitSeconds;
  std::size_t p = seq.size();
  for (std::size_t k = 0; k < seq.size() && seq[k].start < s; ++k) p = k;
  if (p == seq.size()) return false;
  const Staypoint prev = seq[p];
  if (prev.anomaly) return false;
  const Timestamp leave = s.plus_seconds(-travel_s(travel, prev.poi_id, poi));
  if (seconds_between(prev.start, leave) < kMin) return false;

  Staypoint visit;
  visit.agent_id = prev.agent_id;
  visit.poi_id = poi;
  visit.start = s;
  visit.end = e;
  set_label(visit, AnomalyType::kInjected);

  const Timestamp back_same = e.plus_seconds(travel_s(travel, poi, prev.poi_id));
  if (seconds_between(back_same, prev.end) >= kMin) {
    Staypoint head = prev, tail = prev;
    head.end = leave;
    tail.start = back_same;
    set_label(head, AnomalyType::kModified);
    set_label(tail, AnomalyType::kModified);
    seq[p] = head;
    seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(p) + 1, {visit, tail});
    return true;
  }

  std::size_t n = p + 1;
  Timestamp arrive;
  for (; n < seq.size(); ++n) {
    if (seq[n].anomaly) return false;
    arrive = e.plus_seconds(travel_s(travel, poi, seq[n].poi_id));
    if (seconds_between(arrive, seq[n].end) >= kMin) break;
  }
  if (n == seq.size()) return false;

  Staypoint head = prev;
  if (leave < head.end) {
    head.end = leave;
    set_label(head, AnomalyType::kModified);
  }
  Staypoint next = seq[n];
  if (next.start < arrive) {
    next.start = arrive;
    set_label(next, AnomalyType::kModified);
  }
  std::vector<Staypoint> out(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(p));
  out.reserve(seq.size() + 2);
  out.push_back(head);
  out.push_back(visit);
  out.push_back(next);
  out.insert(out.end(), seq.begin() + static_cast<std::ptrdiff_t>(n) + 1, seq.end());
  seq = std::move(out);
  return true;
}

inline void collect_refs(const std::vector<Staypoint>& seq, AnomalyRecord& rec) {
  rec.injected.clear();
  rec.modified.clear();
  for (std::size_t k = 0; k < seq.size(); ++k) {
    if (seq[k].anomaly_type == AnomalyType::kInjected) rec.injected.push_back(k);
    if (seq[k].anomaly_type == AnomalyType::kModified) rec.modified.push_back(k);
  }
}

inline std::unordered_set<PoiId> history(std::span<const Staypoint> train,
                                         std::span<const Staypoint> test) {
  std::unordered_set<PoiId> h;
  for (const auto& sp : train) h.insert(sp.poi_id);
  for (const auto& sp : test) h.insert(sp.poi_id);
  return h;
}

// A POI with some non-Home activity type that the agent never visited.
inline std::optional<PoiId> pick_novel_poi(const world::PoiCatalog& catalog,
                                           const std::unordered_set<PoiId>& seen,
                                           PoiId own_home, Rng& rng) {
  const auto pois = catalog.pois();
  std::uniform_int_distribution<std::size_t> pick(0, pois.size() - 1);
  for (int tries = 0; tries < 1000; ++tries) {
    const auto& p = pois[pick(rng)];
    if (p.poi_id == own_home || seen.contains(p.poi_id)) continue;
    ActivitySet rest = p.act_types;
    rest.erase(ActivityType::kHome);
    if (!rest.empty()) return p.poi_id;
  }
  return std::nullopt;
}

inline bool has_busy_day(std::span<const Staypoint> test, const SimClock& clock) {
  int day = -1, count = 0;
  for (const auto& sp : test) {
    const int d = clock.day_of(sp.start);
    count = d == day ? count + 1 : 1;
    day = d;
    if (count >= 3) return true;
  }
  return false;
}

inline std::int64_t uniform_seconds(Rng& rng, double lo_s, double hi_s) {
  return static_cast<std::int64_t>(std::llround(lo_s + (hi_s - lo_s) * uniform01(rng)));
}

}  // namespace detail

struct InjectionContext {
  const world::PoiCatalog& catalog;
  routing::TravelFn travel;
  SimClock clock;
  PoiId home_poi = 0;
};

// One novel visit (inserted with neighbour adjustment) or one early
// departure. nullopt when no attempt succeeds.
inline std::optional<InjectionOutcome> inject_non_recurring(
    std::span<const Staypoint> test, std::span<const Staypoint> train,
    const InjectionContext& ctx, const InjectionPlan& plan, Rng& rng) {
  if (!detail::has_busy_day(test, ctx.clock)) return std::nullopt;
  const auto seen = detail::history(train, test);
  const bool novel = uniform01(rng) < plan.novel_visit_probability;
  const Timestamp test_start = ctx.clock.test_start();
  for (int attempt = 0; attempt < plan.attempts_per_agent; ++attempt) {
    std::vector<Staypoint> seq(test.begin(), test.end());
    AnomalyRecord rec;
    rec.agent_id = test.front().agent_id;
    rec.kind = AnomalyKind::kNonRecurring;
    if (novel) {
      const auto poi = detail::pick_novel_poi(ctx.catalog, seen, ctx.home_poi, rng);
      if (!poi) return std::nullopt;
      const int day = std::uniform_int_distribution<int>(SimClock::kTrainDays + 1,
                                                         SimClock::kNumDays)(rng);
      const Timestamp s = ctx.clock.day_start(day).plus_seconds(
          detail::uniform_seconds(rng, 0.0, 22.0 * 3600.0));
      const Timestamp e = s.plus_seconds(detail::uniform_seconds(
          rng, plan.min_visit_hours * 3600.0, plan.max_visit_hours * 3600.0));
      if (s < test_start || !(e < ctx.clock.last_instant())) continue;
      if (!detail::insert_visit(seq, *poi, s, e, ctx.travel)) continue;
      rec.pattern = "novel_visit";
      rec.poi_id = *poi;
      rec.repeat_count = 1;
    } else {
      std::vector<std::size_t> long_stays;
      for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
        if (seq[k].duration_s() >= 2 * 3600) long_stays.push_back(k);
      }
      if (long_stays.empty()) return std::nullopt;
      const std::size_t k = long_stays[std::uniform_int_distribution<std::size_t>(
          0, long_stays.size() - 1)(rng)];
      const double cut = 0.25 + 0.5 * uniform01(rng);
      const auto keep = static_cast<std::int64_t>(
          std::llround(static_cast<double>(seq[k].duration_s()) * (1.0 - cut)));
      seq[k].end = seq[k].start.plus_seconds(std::max(keep, routing::kMinVisitSeconds));
      set_label(seq[k], AnomalyType::kModified);
      rec.pattern = "early_departure";
    }
    detail::collect_refs(seq, rec);
    return InjectionOutcome{std::move(seq), std::move(rec)};
  }
  return std::nullopt;
}

// Days between repeats: weekly when the repeats fit in the test window,
// otherwise the widest cadence that still fits.
inline int cadence_for(int repeat_count) {
  constexpr int span = SimClock::kNumDays - SimClock::kTrainDays - 1;
  if (repeat_count <= 1) return 7;
  return std::min(7, span / (repeat_count - 1));
}

// `repeat_count` visits to one POI at the same time of day (plus jitter) on
// a regular cadence. With `shift` the POI is one the agent already visits
// in train instead of a novel one.
inline std::optional<InjectionOutcome> inject_recurring(
    std::span<const Staypoint> test, std::span<const Staypoint> train,
    const InjectionContext& ctx, const InjectionPlan& plan, int repeat_count, Rng& rng,
    bool shift = false) {
  if (repeat_count < 2) throw ConfigError("recurring anomalies need at least 2 repeats");
  if (!detail::has_busy_day(test, ctx.clock)) return std::nullopt;
  const int cadence = cadence_for(repeat_count);
  const int first_day = SimClock::kTrainDays + 1;
  const int last_start_day = SimClock::kNumDays - cadence * (repeat_count - 1);
  if (cadence < 1 || last_start_day < first_day) return std::nullopt;
  const auto seen = detail::history(train, test);

  std::vector<PoiId> familiar;
  if (shift) {
    std::unordered_set<PoiId> in_train;
    for (const auto& sp : train) {
      if (sp.poi_id != ctx.home_poi && in_train.insert(sp.poi_id).second) {
        familiar.push_back(sp.poi_id);
      }
    }
    std::sort(familiar.begin(), familiar.end());
    if (familiar.empty()) return std::nullopt;
  }

  for (int attempt = 0; attempt < plan.attempts_per_agent; ++attempt) {
    std::optional<PoiId> poi;
    if (shift) {
      poi = familiar[std::uniform_int_distribution<std::size_t>(0, familiar.size() - 1)(rng)];
    } else {
      poi = detail::pick_novel_poi(ctx.catalog, seen, ctx.home_poi, rng);
    }
    if (!poi) return std::nullopt;
    const int d0 = std::uniform_int_distribution<int>(first_day, last_start_day)(rng);
    const std::int64_t tod = detail::uniform_seconds(rng, 3600.0, 21.0 * 3600.0);
    const std::int64_t dur = detail::uniform_seconds(rng, plan.min_visit_hours * 3600.0,
                                                     plan.max_visit_hours * 3600.0);
    const double jitter = plan.jitter_minutes * 60.0;
    std::vector<Staypoint> seq(test.begin(), test.end());
    bool ok = true;
    for (int k = 0; k < repeat_count && ok; ++k) {
      const Timestamp s = ctx.clock.day_start(d0 + k * cadence)
                              .plus_seconds(tod + detail::uniform_seconds(rng, -jitter, jitter));
      const Timestamp e = s.plus_seconds(dur);
      ok = s >= ctx.clock.test_start() && e < ctx.clock.last_instant() &&
           detail::insert_visit(seq, *poi, s, e, ctx.travel);
    }
    if (!ok) continue;
    AnomalyRecord rec;
    rec.agent_id = test.front().agent_id;
    rec.kind = shift ? AnomalyKind::kFrequencyShift : AnomalyKind::kRecurring;
    rec.pattern = shift ? "frequency_shift" : "recurring_visit";
    rec.poi_id = *poi;
    rec.repeat_count = repeat_count;
    rec.cadence_days = cadence;
    detail::collect_refs(seq, rec);
    return InjectionOutcome{std::move(seq), std::move(rec)};
  }
  return std::nullopt;
}

struct InjectionReport {
  std::size_t n_agents = 0;
  std::size_t anomalous_agents = 0;
  std::size_t labelled_staypoints = 0;
  std::size_t test_staypoints = 0;
  double agent_prevalence = 0.0;
  double staypoint_prevalence = 0.0;
  std::vector<AgentId> skipped;  // candidates where no template fit
};

struct AnomalousTestset {
  std::vector<std::vector<Staypoint>> truth;      // per agent, unmodified
  std::vector<std::vector<Staypoint>> anomalous;  // per agent
  std::vector<AnomalyRecord> manifest;            // sorted by agent id
  InjectionReport report;
};

struct AgentWindows {
  AgentId agent_id = 0;
  PoiId home_poi = 0;
  std::span<const Staypoint> train;
  std::span<const Staypoint> test;
};

// Selects round(agent prevalence x n) agents, gives a `recurring_fraction`
// share of them recurring anomalies and the rest non-recurring ones, then
// grows or shrinks recurring repeat counts until the labelled-staypoint
// prevalence is within tolerance. Throws InjectionError if either
// prevalence ends outside its band.
inline AnomalousTestset build_anomalous_testset(std::span<const AgentWindows> agents,
                                                const world::PoiCatalog& catalog,
                                                const routing::TravelFn& travel,
                                                const SimClock& clock,
                                                const InjectionPlan& plan) {
  plan.validate();
  AnomalousTestset out;
  const std::size_t n = agents.size();
  out.truth.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.truth[i].assign(agents[i].test.begin(), agents[i].test.end());
  }
  out.anomalous = out.truth;
  out.report.n_agents = n;

  const auto n_select = static_cast<std::size_t>(
      std::llround(plan.target_agent_prevalence * static_cast<double>(n)));
  const auto n_recurring = static_cast<std::size_t>(
      std::llround(plan.recurring_fraction * static_cast<double>(n_select)));
  const auto n_shift = static_cast<std::size_t>(
      std::llround(plan.frequency_shift_fraction * static_cast<double>(n_recurring)));

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng select_rng = make_rng(plan.seed, "inject.select");
  std::shuffle(order.begin(), order.end(), select_rng);

  struct Slot {
    std::size_t agent;
    AnomalyKind kind;
    int repeats;
    InjectionOutcome outcome;
    bool stuck_grow = false;
    bool stuck_shrink = false;
  };
  std::vector<Slot> slots;

  auto ctx_for = [&](std::size_t i) {
    return InjectionContext{catalog, travel, clock, agents[i].home_poi};
  };
  auto attempt = [&](std::size_t i, AnomalyKind kind,
                     int repeats) -> std::optional<InjectionOutcome> {
    const auto& a = agents[i];
    if (a.test.empty()) return std::nullopt;
    Rng rng = make_rng(derive_seed(plan.seed, to_string(kind),
                                   static_cast<std::uint64_t>(repeats)),
                       "inject.agent", static_cast<std::uint64_t>(a.agent_id));
    const auto ctx = ctx_for(i);
    if (kind == AnomalyKind::kNonRecurring) {
      return inject_non_recurring(a.test, a.train, ctx, plan, rng);
    }
    return inject_recurring(a.test, a.train, ctx, plan, repeats, rng,
                            kind == AnomalyKind::kFrequencyShift);
  };

  Rng size_rng = make_rng(plan.seed, "inject.repeats");
  std::size_t cursor = 0;
  for (std::size_t slot = 0; slot < n_select; ++slot) {
    const AnomalyKind kind = slot < n_shift       ? AnomalyKind::kFrequencyShift
                             : slot < n_recurring ? AnomalyKind::kRecurring
                                                  : AnomalyKind::kNonRecurring;
    const int repeats =
        kind == AnomalyKind::kNonRecurring
            ? 1
            : std::uniform_int_distribution<int>(plan.repeat_min, plan.repeat_max)(size_rng);
    bool placed = false;
    while (!placed && cursor < n) {
      const std::size_t i = order[cursor++];
      if (auto r = attempt(i, kind, repeats)) {
        slots.push_back({i, kind, repeats, std::move(*r)});
        placed = true;
      } else {
        out.report.skipped.push_back(agents[i].agent_id);
      }
    }
  }

  std::size_t total_rows = 0;
  for (const auto& t : out.truth) total_rows += t.size();
  auto labelled = [&] {
    std::size_t l = 0;
    for (const auto& s : slots) {
      l += s.outcome.record.injected.size() + s.outcome.record.modified.size();
    }
    return l;
  };
  auto rows = [&] {
    std::size_t r = total_rows;
    for (const auto& s : slots) r = r - out.truth[s.agent].size() + s.outcome.sequence.size();
    return r;
  };
  auto prevalence = [&] {
    const std::size_t r = rows();
    return r == 0 ? 0.0 : static_cast<double>(labelled()) / static_cast<double>(r);
  };
  const double target = plan.target_staypoint_prevalence;
  const double lo = target * (1.0 - plan.tolerance);
  const double hi = target * (1.0 + plan.tolerance);

  // Adjust one recurring slot at a time, smallest first when growing and
  // largest first when shrinking; stop when in band or no slot can move.
  for (int guard = 0; guard < 4096; ++guard) {
    const double p = prevalence();
    if (p >= lo && p <= hi) break;
    const bool grow = p < lo;
    std::vector<std::size_t> movable;
    for (std::size_t k = 0; k < slots.size(); ++k) {
      const auto& s = slots[k];
      if (s.kind == AnomalyKind::kNonRecurring || (grow ? s.stuck_grow : s.stuck_shrink)) {
        continue;
      }
      if (grow ? s.repeats < plan.repeat_limit : s.repeats > plan.repeat_floor) {
        movable.push_back(k);
      }
    }
    std::stable_sort(movable.begin(), movable.end(), [&](std::size_t a, std::size_t b) {
      return grow ? slots[a].repeats < slots[b].repeats : slots[a].repeats > slots[b].repeats;
    });
    if (movable.empty()) break;
    for (std::size_t k : movable) {
      auto& s = slots[k];
      const int next = s.repeats + (grow ? 1 : -1);
      if (auto r = attempt(s.agent, s.kind, next)) {
        s.repeats = next;
        s.outcome = std::move(*r);
        break;
      }
      (grow ? s.stuck_grow : s.stuck_shrink) = true;
    }
  }

  for (auto& s : slots) {
    out.anomalous[s.agent] = std::move(s.outcome.sequence);
    out.manifest.push_back(std::move(s.outcome.record));
  }
  std::sort(out.manifest.begin(), out.manifest.end(),
            [](const AnomalyRecord& a, const AnomalyRecord& b) { return a.agent_id < b.agent_id; });

  auto& rep = out.report;
  rep.anomalous_agents = slots.size();
  for (const auto& seq : out.anomalous) {
    rep.test_staypoints += seq.size();
    for (const auto& sp : seq) rep.labelled_staypoints += sp.anomaly ? 1 : 0;
  }
  rep.agent_prevalence =
      n == 0 ? 0.0 : static_cast<double>(rep.anomalous_agents) / static_cast<double>(n);
  rep.staypoint_prevalence = rep.test_staypoints == 0
                                 ? 0.0
                                 : static_cast<double>(rep.labelled_staypoints) /
                                       static_cast<double>(rep.test_staypoints);

  auto within = [&](double achieved, double t) {
    return achieved >= t * (1.0 - plan.tolerance) && achieved <= t * (1.0 + plan.tolerance);
  };
  if (!within(rep.agent_prevalence, plan.target_agent_prevalence) ||
      !within(rep.staypoint_prevalence, plan.target_staypoint_prevalence)) {
    throw InjectionError(
        "prevalence targets unreachable: agents " + std::to_string(rep.anomalous_agents) +
        "/" + std::to_string(n) + " = " + std::to_string(rep.agent_prevalence) +
        " (target " + std::to_string(plan.target_agent_prevalence) + "), staypoints " +
        std::to_string(rep.labelled_staypoints) + "/" + std::to_string(rep.test_staypoints) +
        " = " + std::to_string(rep.staypoint_prevalence) + " (target " +
        std::to_string(plan.target_staypoint_prevalence) + "), skipped " +
        std::to_string(rep.skipped.size()) + " candidates");
  }
  return out;
}

}  // namespace mobsim::inject
