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

#include "mobsim/eval/metrics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "test_support.hpp"

namespace mobsim::eval {
namespace {

// Pair-counting oracle: fraction of (positive, negative) pairs ordered
// correctly, ties worth one half.
double auc_by_pairs(const std::vector<double>& s, const std::vector<int>& y) {
  double good = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[i] != 1 || y[j] != 0) continue;
      pairs += 1.0;
      good += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return good / pairs;
}

// Threshold-sweep oracle: for each distinct score t (descending), precision
// and recall of the rule "score >= t", summed as sum (R_k - R_{k-1}) P_k.
double ap_by_thresholds(const std::vector<double>& s, const std::vector<int>& y) {
  std::set<double, std::greater<>> thresholds(s.begin(), s.end());
  double total_pos = 0.0;
  for (int l : y) total_pos += l;
  double prev_recall = 0.0, ap = 0.0;
  for (double t : thresholds) {
    double tp = 0.0, predicted = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] >= t) {
        predicted += 1.0;
        tp += y[i];
      }
    }
    const double recall = tp / total_pos;
    ap += (recall - prev_recall) * (tp / predicted);
    prev_recall = recall;
  }
  return ap;
}

TEST(AucRoc, PerfectSeparationIsOne) {
  EXPECT_DOUBLE_EQ(aucroc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, std::vector<int>{1, 1, 0, 0}),
                   1.0);
}

TEST(AucRoc, AllTiesIsOneHalf) {
  EXPECT_DOUBLE_EQ(aucroc(std::vector<double>{0.3, 0.3, 0.3, 0.3}, std::vector<int>{1, 0, 1, 0}),
                   0.5);
}

TEST(AucRoc, InterleavedRankingExample) {
  EXPECT_NEAR(aucroc(std::vector<double>{0.9, 0.8, 0.7, 0.1}, std::vector<int>{1, 0, 1, 0}), 0.75,
              1e-15);
}

TEST(AucRoc, SingleClassThrows) {
  EXPECT_THROW(aucroc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), MetricError);
  EXPECT_THROW(aucroc(std::vector<double>{0.1, 0.2}, std::vector<int>{0, 0}), MetricError);
}

TEST(AucRoc, RejectsMismatchedLengthsAndBadLabels) {
  EXPECT_THROW(aucroc(std::vector<double>{0.1}, std::vector<int>{1, 0}), MetricError);
  EXPECT_THROW(aucroc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 2}), MetricError);
}

TEST(AveragePrecision, PositivesFirstIsOne) {
  EXPECT_DOUBLE_EQ(
      average_precision(std::vector<double>{0.9, 0.8, 0.2, 0.1}, std::vector<int>{1, 1, 0, 0}),
      1.0);
}

TEST(AveragePrecision, InterleavedRankingExample) {
  EXPECT_NEAR(
      average_precision(std::vector<double>{0.9, 0.8, 0.7, 0.1}, std::vector<int>{1, 0, 1, 0}),
      (1.0 + 2.0 / 3.0) / 2.0, 1e-15);
}

TEST(AveragePrecision, NoPositivesThrows) {
  EXPECT_THROW(average_precision(std::vector<double>{0.1, 0.2}, std::vector<int>{0, 0}),
               MetricError);
}

TEST(AveragePrecision, TiedGroupEntersTogether) {
  // One tied group holding everything: precision is the prevalence.
  EXPECT_DOUBLE_EQ(
      average_precision(std::vector<double>{1, 1, 1, 1}, std::vector<int>{1, 0, 0, 0}), 0.25);
}

TEST(Metrics, MatchBruteForceOraclesOnRandomSmallInstances) {
  testing::Gen g(20240101);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = static_cast<std::size_t>(g.integer(2, 12));
    std::vector<double> s(n);
    std::vector<int> y(n);
    // Coarse scores so ties are common.
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(g.integer(0, 5)) / 5.0;
      y[i] = g.coin() ? 1 : 0;
    }
    y[0] = 1;
    y[1] = 0;
    EXPECT_NEAR(aucroc(s, y), auc_by_pairs(s, y), 1e-12);
    EXPECT_NEAR(average_precision(s, y), ap_by_thresholds(s, y), 1e-12);
  }
}

TEST(AveragePrecision, RandomScoresApproachPrevalence) {
  testing::Gen g(99);
  const std::size_t n = 20000;
  const double pi = 0.1;
  std::vector<double> s(n);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = g.real(0.0, 1.0);
    y[i] = g.coin(pi) ? 1 : 0;
  }
  // AP of a random ranking has standard deviation well under 0.01 here.
  EXPECT_NEAR(average_precision(s, y), pi, 0.03);
}

TEST(Prevalence, FractionOfPositives) {
  EXPECT_DOUBLE_EQ(prevalence(std::vector<int>{1, 0, 0, 0}), 0.25);
}

}  // namespace
}  // namespace mobsim::eval
