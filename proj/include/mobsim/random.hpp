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
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace mobsim {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

// Seed for an independent stream keyed by (root, stage, index). Every random
// draw in the library comes from a stream derived this way, so stages can be
// rerun alone and per-agent work is independent of iteration order.
inline constexpr std::uint64_t derive_seed(std::uint64_t root,
                                           std::string_view stage,
                                           std::uint64_t index = 0) {
  return splitmix64(splitmix64(root ^ hash_tag(stage)) + index);
}

inline Rng make_rng(std::uint64_t root, std::string_view stage,
                    std::uint64_t index = 0) {
  return Rng(derive_seed(root, stage, index));
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// Log-normal parameterised by its median; sigma == 0 returns the median.
inline double lognormal_median(Rng& rng, double median, double sigma) {
  if (sigma <= 0.0) return median;
  return median * std::exp(sigma * std::normal_distribution<double>(0.0, 1.0)(rng));
}

// Index drawn with probability proportional to weights; weights must have a
// positive sum. Returns weights.size() if all weights are zero.
inline std::size_t sample_weighted(Rng& rng, std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) return weights.size();
  double u = uniform01(rng) * total;
  std::size_t last_positive = weights.size();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = i;
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return last_positive;
}

}  // namespace mobsim
