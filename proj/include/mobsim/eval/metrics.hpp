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
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "mobsim/error.hpp"

namespace mobsim::eval {

namespace detail {

inline void check_inputs(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw MetricError("scores and labels differ in length");
  for (int l : labels) {
    if (l != 0 && l != 1) throw MetricError("labels must be 0 or 1");
  }
}

// Indices sorted by descending score, ties in input order.
inline std::vector<std::size_t> descending(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return idx;
}

}  // namespace detail

// Probability that a random positive outscores a random negative, ties
// counting one half (Mann-Whitney U over average ranks).
inline double aucroc(std::span<const double> scores, std::span<const int> labels) {
  detail::check_inputs(scores, labels);
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos = 0.0, neg = 0.0, rank_sum = 0.0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[idx[k]] == 1) {
        rank_sum += avg_rank;
        pos += 1.0;
      } else {
        neg += 1.0;
      }
    }
    i = j;
  }
  if (pos == 0.0 || neg == 0.0) throw MetricError("aucroc needs both classes");
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

// Sum over the descending ranking of precision x recall increment. Items
// with equal scores enter the ranking together.
inline double average_precision(std::span<const double> scores, std::span<const int> labels) {
  detail::check_inputs(scores, labels);
  const auto idx = detail::descending(scores);
  double total_pos = 0.0;
  for (int l : labels) total_pos += l;
  if (total_pos == 0.0) throw MetricError("average precision needs a positive");
  double tp = 0.0, seen = 0.0, ap = 0.0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    double group_tp = 0.0;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      group_tp += labels[idx[j]];
      ++j;
    }
    tp += group_tp;
    seen += static_cast<double>(j - i);
    ap += (tp / seen) * (group_tp / total_pos);
    i = j;
  }
  return ap;
}

inline double prevalence(std::span<const int> labels) {
  if (labels.empty()) return 0.0;
  double p = 0.0;
  for (int l : labels) p += l;
  return p / static_cast<double>(labels.size());
}

}  // namespace mobsim::eval
