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

#include <random>

#include "common.hpp"
#include "rangefield/limit_field.hpp"
#include "rangefield/stats.hpp"

namespace rangefield {
namespace {

using testing::profile;

double base(double t) { return constants().k1 * h(t); }

TEST(SplitFamily, DeterministicAndConsistent) {
  const SplitFamily f(42);
  const Word w = f.child(f.child(f.root(), 3), 1);
  EXPECT_EQ(f.at(w).u, SplitFamily(42).at(w).u);
  EXPECT_NE(f.at(w).u, SplitFamily(43).at(w).u);
  const SplitFamily sub = f.subfamily(3);
  EXPECT_EQ(sub.at(sub.child(sub.root(), 1)).v, f.at(w).v);
  EXPECT_THROW(SplitFamily(1, 3), std::invalid_argument);
}

TEST(SplitFamily, MarginalsAreUniform) {
  const SplitFamily f(9);
  RunningStats u, v, uv;
  Word w = f.root();
  for (int i = 0; i < 20000; ++i) {
    const Word c = f.child(f.child(w, i % 4), (i / 4) % 4);
    const SplitPair p = f.at(Word{c.code + (static_cast<std::uint64_t>(i) << 8), 8});
    ASSERT_GT(p.u, 0.0);
    ASSERT_LT(p.u, 1.0);
    u.add(p.u);
    v.add(p.v);
    uv.add(p.u * p.v);
  }
  EXPECT_NEAR(u.mean(), 0.5, 4 * u.std_error());
  EXPECT_NEAR(v.mean(), 0.5, 4 * v.std_error());
  EXPECT_NEAR(u.variance(), 1.0 / 12, 0.005);
  EXPECT_NEAR(uv.mean(), 0.25, 4 * uv.std_error());
}

TEST(QuadLimitField, ConstrainedAtOneIsPartialMatchBitExact) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const QuadLimitField f(SplitFamily(rng()), LimitOptions{30, 1e-3});
    const double t = u(rng);
    ASSERT_EQ(f.y(t, 1.0), f.z(t));
  }
}

TEST(QuadLimitField, DepthZeroIsTheMeanInitialisation) {
  const QuadLimitField f(SplitFamily(5), LimitOptions{0, 1e-3});
  for (double t : {0.1, 0.5, 0.8}) {
    EXPECT_EQ(f.z(t), base(t));
    EXPECT_EQ(f.y(t, 0.3), base(t));
  }
  EXPECT_EQ(f.o(QueryRect{}), 0.0);
  EXPECT_EQ(f.o(QueryRect{0.2, 0.7, 0.3, 0.8}), 0.0);
}

TEST(QuadLimitField, VanishesOnTheBoundary) {
  const QuadLimitField f(SplitFamily(6), LimitOptions{});
  EXPECT_EQ(f.z(0.0), 0.0);
  EXPECT_EQ(f.z(1.0), 0.0);
  EXPECT_EQ(f.y(0.0, 0.5), 0.0);
  EXPECT_EQ(f.o(QueryRect{}), 0.0);
}

TEST(QuadLimitField, Deterministic) {
  const QueryRect q{0.2, 0.7, 0.3, 0.8};
  EXPECT_EQ(o_eval(SplitFamily(77), LimitOptions{}, q), o_eval(SplitFamily(77), LimitOptions{}, q));
  EXPECT_NE(o_eval(SplitFamily(77), LimitOptions{}, q), o_eval(SplitFamily(78), LimitOptions{}, q));
}

TEST(QuadLimitField, PartialMatchMeanIsPreserved) {
  for (int depth : {5, 20}) {
    RunningStats s;
    for (std::uint64_t i = 0; i < 3000; ++i) s.add(QuadLimitField(SplitFamily(i), LimitOptions{depth, 1e-3}).z(0.5));
    EXPECT_NEAR(s.mean(), base(0.5), 3.5 * s.std_error()) << "depth " << depth;
  }
}

TEST(QuadLimitField, ConstrainedMeanMatchesProfile) {
  const GTable& g = profile();
  for (double sv : {0.25, 0.5}) {
    RunningStats s;
    for (std::uint64_t i = 0; i < 3000; ++i) s.add(QuadLimitField(SplitFamily(i + 100000), LimitOptions{20, 1e-3}).y(0.5, sv));
    EXPECT_NEAR(s.mean(), mu(0.5, sv, g), 3.5 * s.std_error() + 0.01 * mu(0.5, sv, g)) << "s " << sv;
  }
}

TEST(QuadLimitField, RangeMeanMatchesFormula) {
  const GTable& g = profile();
  const QueryRect q{0.2, 0.7, 0.3, 0.8};
  RunningStats s;
  for (std::uint64_t i = 0; i < 2000; ++i) s.add(o_eval(SplitFamily(i + 200000), LimitOptions{20, 1e-3}, q));
  EXPECT_NEAR(s.mean(), mean_O(q, g), 3.5 * s.std_error() + 0.01 * mean_O(q, g));
}

TEST(QuadLimitField, RejectsBadOptions) {
  EXPECT_THROW(QuadLimitField(SplitFamily(1, 2), LimitOptions{}), std::invalid_argument);
  EXPECT_THROW(QuadLimitField(SplitFamily(1), LimitOptions{-1, 1e-3}), std::invalid_argument);
  EXPECT_THROW(QuadLimitField(SplitFamily(1), LimitOptions{40, 1e-3}), std::invalid_argument);
  EXPECT_THROW(QuadLimitField(SplitFamily(1), LimitOptions{}).o(QueryRect{0.5, 0.2, 0, 1}), DomainError);
}

TEST(FixedPointMap, ClipsIntoChildren) {
  const SplitPair p{0.5, 0.25};
  const QueryRect q{0.25, 0.75, 0.0, 0.5};
  const auto sw = clip_to_child(q, p, 0);
  ASSERT_TRUE(sw);
  EXPECT_EQ(*sw, (QueryRect{0.5, 1.0, 0.0, 1.0}));
  const auto ne = clip_to_child(q, p, 3);
  ASSERT_TRUE(ne);
  EXPECT_EQ(*ne, (QueryRect{0.0, 0.5, 0.0, 1.0 / 3.0}));
  EXPECT_FALSE(clip_to_child(QueryRect{0.6, 0.9, 0.0, 0.2}, p, 0));
  EXPECT_FALSE(clip_to_child(QueryRect{0.1, 0.4, 0.0, 0.2}, p, 3));
  const auto w = child_weights(p);
  EXPECT_NEAR(w[0], std::pow(0.125, constants().beta), 1e-15);
}

TEST(FixedPointMap, ZeroFieldsGiveZero) {
  const QueryField zero = [](const QueryRect&) { return 0.0; };
  EXPECT_EQ(apply_D({zero, zero, zero, zero}, SplitPair{0.3, 0.6}, QueryRect{0.2, 0.7, 0.3, 0.8}), 0.0);
  EXPECT_EQ(apply_D_kd({zero, zero}, 0.4, QueryRect{0.2, 0.7, 0.3, 0.8}), 0.0);
}

TEST(FixedPointMap, UnitFieldSumsChildWeights) {
  const QueryField one = [](const QueryRect&) { return 1.0; };
  const SplitPair p{0.3, 0.6};
  const auto w = child_weights(p);
  EXPECT_NEAR(apply_D({one, one, one, one}, p, QueryRect{}), w[0] + w[1] + w[2] + w[3], 1e-15);
}

// Mean squared sup-grid increment of Y between consecutive depths; it decays
// geometrically once the fields are contractions in L2.
double increment(int depth, std::uint64_t seeds) {
  double total = 0.0;
  for (std::uint64_t i = 0; i < seeds; ++i) {
    const QuadLimitField a(SplitFamily(i), LimitOptions{depth, 0.0});
    const QuadLimitField b(SplitFamily(i), LimitOptions{depth + 1, 0.0});
    double sup = 0.0;
    for (int ti = 1; ti < 8; ++ti) {
      for (int si = 1; si <= 8; ++si) {
        sup = std::max(sup, std::abs(b.y(ti / 8.0, si / 8.0) - a.y(ti / 8.0, si / 8.0)));
      }
    }
    total += sup * sup;
  }
  return total / static_cast<double>(seeds);
}

TEST(QuadLimitField, IncrementsDecay) {
  std::vector<double> inc;
  for (int k = 1; k <= 6; ++k) inc.push_back(increment(k, 100));
  double ratio = 0.0;
  for (std::size_t i = 1; i < inc.size(); ++i) ratio += inc[i] / inc[i - 1];
  EXPECT_LT(ratio / static_cast<double>(inc.size() - 1), 1.0);
  EXPECT_LT(inc.back(), inc.front());
}

TEST(KdLimitField, DepthZeroAndFullSquare) {
  const GTable& g = profile();
  const QueryRect q{0.2, 0.7, 0.3, 0.8};
  const auto v = kd_limit_eval(SplitFamily(3, 2), LimitOptions{0, 1e-3}, q, g);
  EXPECT_EQ(v.o_eq, mean_O_kd(q, g).eq_mean);
  EXPECT_EQ(v.o_perp, mean_O_kd(q, g).perp_mean);
  const auto full = kd_limit_eval(SplitFamily(3, 2), LimitOptions{}, QueryRect{}, g);
  EXPECT_EQ(full.o_eq, 0.0);
  EXPECT_EQ(full.o_perp, 0.0);
  EXPECT_THROW(KdLimitField(SplitFamily(1, 4), LimitOptions{}, g), std::invalid_argument);
}

TEST(KdLimitField, MeansArePreserved) {
  const GTable& g = profile();
  const QueryRect q{0.1, 0.9, 0.45, 0.55};
  RunningStats eq, perp;
  for (std::uint64_t i = 0; i < 3000; ++i) {
    const auto v = kd_limit_eval(SplitFamily(i, 2), LimitOptions{16, 1e-3}, q, g);
    eq.add(v.o_eq);
    perp.add(v.o_perp);
  }
  const auto m = mean_O_kd(q, g);
  EXPECT_NEAR(eq.mean(), m.eq_mean, 3.5 * eq.std_error() + 0.005 * m.eq_mean);
  EXPECT_NEAR(perp.mean(), m.perp_mean, 3.5 * perp.std_error() + 0.005 * m.perp_mean);
}

}  // namespace
}  // namespace rangefield
