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

#include <cmath>
#include <span>
#include <vector>

#include "mobsim/error.hpp"

namespace mobsim::activity {

namespace detail {

inline std::vector<double> normalized(std::span<const double> h, bool& changed) {
  double s = 0.0;
  for (double v : h) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw MetricError("histogram entries must be finite and non-negative");
    }
    s += v;
  }
  if (!(s > 0.0)) throw MetricError("histogram has zero mass");
  changed = changed || std::abs(s - 1.0) > 1e-12;
  std::vector<double> out(h.begin(), h.end());
  for (double& v : out) v /= s;
  return out;
}

}  // namespace detail

// Jensen-Shannon divergence in bits, so the result lies in [0, 1].
// Inputs that do not sum to one are renormalised; `renormalized` (if given)
// reports whether that happened.
inline double jsd(std::span<const double> p, std::span<const double> q,
                  bool* renormalized = nullptr) {
  if (p.empty() || q.empty()) throw MetricError("jsd of an empty histogram");
  if (p.size() != q.size()) throw MetricError("jsd histograms differ in support");
  bool changed = false;
  const auto pn = detail::normalized(p, changed);
  const auto qn = detail::normalized(q, changed);
  if (renormalized != nullptr) *renormalized = changed;
  double kl_p = 0.0;
  double kl_q = 0.0;
  for (std::size_t i = 0; i < pn.size(); ++i) {
    const double m = 0.5 * (pn[i] + qn[i]);
    if (pn[i] > 0.0) kl_p += pn[i] * std::log2(pn[i] / m);
    if (qn[i] > 0.0) kl_q += qn[i] * std::log2(qn[i] / m);
  }
  const double d = 0.5 * kl_p + 0.5 * kl_q;
  // Rounding can push identical inputs a hair below zero.
  return d < 0.0 ? 0.0 : (d > 1.0 ? 1.0 : d);
}

}  // namespace mobsim::activity
