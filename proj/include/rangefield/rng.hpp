/*
 * Copyright 2026 The rangefield Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "rangefield/geometry.hpp"

namespace rangefield {

/// The splitmix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Keyed hash of (seed, key). Distinct keys give statistically independent
/// outputs for a fixed seed.
constexpr std::uint64_t keyed_hash(std::uint64_t seed, std::uint64_t key) {
  return splitmix64(splitmix64(seed) ^ splitmix64(key + 0x632BE59BD9B4E019ULL));
}

/// Maps 64 random bits to the open interval (0, 1).
constexpr double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Maps 64 random bits to [0, 1).
constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Seed of trial i in a run with master seed `seed`. Trials depend on their
/// index only, so results do not change with the worker count.
constexpr std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  return keyed_hash(seed, trial);
}

/// n independent uniform points of [0, 1)^2.
inline std::vector<UnitPoint> uniform_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<UnitPoint> pts(n);
  for (auto& p : pts) {
    p.x = to_unit(gen());
    p.y = to_unit(gen());
  }
  return pts;
}

}  // namespace rangefield
