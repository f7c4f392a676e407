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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "rangefield/geometry.hpp"

namespace rangefield {
namespace {

// Nudge oracle on a dyadic grid: move every query edge right by a step
// smaller than the grid, clamp to the square, and intersect the closed query
// with the cell as point sets.
bool nudged_overlap(double cell_lo, double cell_hi, bool closed_lo, double q_lo, double q_hi) {
  constexpr double kEps = 1.0 / 1024.0;
  const double lo = std::max(std::min(q_lo + kEps, 1.0), cell_lo);
  const double hi = std::min(std::min(q_hi + kEps, 1.0), cell_hi);
  if (lo != hi) return lo < hi;
  return lo <= cell_hi && (closed_lo ? lo >= cell_lo : lo > cell_lo);
}

bool nudged_intersects(const HalfOpenRect& r, const QueryRect& q) {
  return nudged_overlap(r.x_lo, r.x_hi, r.x_closed_lo, q.a, q.b) &&
         nudged_overlap(r.y_lo, r.y_hi, r.y_closed_lo, q.c, q.d);
}

double grid16(std::mt19937_64& rng) { return static_cast<double>(rng() % 17) / 16.0; }

std::pair<double, double> ordered(std::mt19937_64& rng) {
  double u = grid16(rng), v = grid16(rng);
  return {std::min(u, v), std::max(u, v)};
}

TEST(Geometry, IntersectsMatchesNudgeOracle) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200000; ++i) {
    auto [xl, xh] = ordered(rng);
    auto [yl, yh] = ordered(rng);
    const HalfOpenRect r = HalfOpenRect::make(xl, xh, yl, yh);
    auto [a, b] = ordered(rng);
    auto [c, d] = ordered(rng);
    const QueryRect q{a, b, c, d};
    ASSERT_EQ(intersects(r, q), nudged_intersects(r, q))
        << "cell " << xl << "," << xh << "," << yl << "," << yh << " query " << a << "," << b << "," << c << "," << d;
  }
}

TEST(Geometry, DegenerateVerticalLineTakesRightNeighbour) {
  const auto left = HalfOpenRect::make(0.0, 0.5, 0.0, 1.0);
  const auto right = HalfOpenRect::make(0.5, 1.0, 0.0, 1.0);
  const QueryRect line{0.5, 0.5, 0.0, 1.0};
  EXPECT_FALSE(intersects(left, line));
  EXPECT_TRUE(intersects(right, line));
  const QueryRect edge{1.0, 1.0, 0.0, 1.0};
  EXPECT_FALSE(intersects(left, edge));
  EXPECT_TRUE(intersects(right, edge));
  const QueryRect zero{0.0, 0.0, 0.0, 1.0};
  EXPECT_TRUE(intersects(left, zero));
  EXPECT_FALSE(intersects(right, zero));
}

TEST(Geometry, EmptyCellNeverMeets) {
  HalfOpenRect r{0.5, 0.5, 0.0, 1.0, false, true};
  EXPECT_TRUE(r.empty());
  EXPECT_FALSE(intersects(r, QueryRect{0.0, 1.0, 0.0, 1.0}));
}

TEST(Geometry, SplitPartitionsTheCell) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const auto r = HalfOpenRect::make(0.0, 1.0, 0.0, 1.0);
    const UnitPoint p{grid16(rng), grid16(rng)};
    const auto kids = split(r, p);
    for (int j = 0; j < 200; ++j) {
      const UnitPoint z = (j % 2) ? UnitPoint{u(rng), u(rng)} : UnitPoint{grid16(rng), grid16(rng)};
      const int hits = static_cast<int>(std::count_if(kids.begin(), kids.end(),
                                                       [&](const HalfOpenRect& k) { return contains(k, z); }));
      ASSERT_EQ(hits, 1);
      const int expect = (z.x <= p.x ? 0 : 2) + (z.y <= p.y ? 0 : 1);
      ASSERT_TRUE(contains(kids[static_cast<std::size_t>(expect)], z));
    }
    EXPECT_TRUE(contains(kids[0], p));
  }
}

TEST(Geometry, SplitRejectsOutsidePoint) {
  const auto r = HalfOpenRect::make(0.5, 1.0, 0.0, 1.0);
  EXPECT_THROW(split(r, UnitPoint{0.5, 0.5}), DomainError);
  EXPECT_NO_THROW(split(r, UnitPoint{0.75, 0.0}));
}

TEST(Geometry, RelativePositions) {
  const auto r = HalfOpenRect::make(0.25, 0.75, 0.5, 1.0);
  EXPECT_DOUBLE_EQ(phi(r, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(phi(r, 0.75), 1.0);
  EXPECT_EQ(phi(r, 0.25), 0.0);
  EXPECT_EQ(phi(r, 0.9), 0.0);
  EXPECT_DOUBLE_EQ(phi_prime(r, 0.625), 0.25);
  EXPECT_EQ(phi_prime(r, 0.25), 0.0);
}

TEST(Geometry, QueryValidation) {
  EXPECT_THROW(QueryRect::checked(0.6, 0.5, 0.0, 1.0), DomainError);
  EXPECT_THROW(QueryRect::checked(-0.1, 0.5, 0.0, 1.0), DomainError);
  EXPECT_THROW(QueryRect::checked(0.0, 0.5, 0.0, 1.5), DomainError);
  EXPECT_THROW(QueryRect::checked(0.0, std::nan(""), 0.0, 1.0), DomainError);
  const auto q = QueryRect::checked(0.1, 0.4, 0.2, 0.7);
  EXPECT_NEAR(q.vol(), 0.15, 1e-15);
  EXPECT_EQ(q.swapped(), (QueryRect{0.2, 0.7, 0.1, 0.4}));
  EXPECT_EQ(q.swapped().swapped(), q);
  EXPECT_TRUE((QueryRect{0.0, 1.0, 0.0, 1.0}).full());
}

TEST(Geometry, SwapCommutesWithIntersects) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20000; ++i) {
    auto [xl, xh] = ordered(rng);
    auto [yl, yh] = ordered(rng);
    auto [a, b] = ordered(rng);
    auto [c, d] = ordered(rng);
    const auto r = HalfOpenRect::make(xl, xh, yl, yh);
    const QueryRect q{a, b, c, d};
    ASSERT_EQ(intersects(r, q), intersects(r.swapped(), q.swapped()));
  }
}

}  // namespace
}  // namespace rangefield
