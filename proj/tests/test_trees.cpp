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

#include "oracles.hpp"
#include "rangefield/kdtree.hpp"
#include "rangefield/quadtree.hpp"
#include "rangefield/rng.hpp"

namespace rangefield {
namespace {

using testing::grid_points;
using testing::kd_cell_oracle;
using testing::quad_cell_oracle;

TEST(Quadtree, CellsMatchOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto pts = seed % 2 ? uniform_points(300, seed) : grid_points(300, 8, seed);
    const Quadtree tree(pts);
    ASSERT_EQ(tree.size(), pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      ASSERT_EQ(tree.node(i).point, pts[i]);
      ASSERT_EQ(tree.node(i).cell, quad_cell_oracle(pts, i)) << "seed " << seed << " node " << i;
      ASSERT_TRUE(contains(tree.node(i).cell, pts[i]));
    }
  }
}

TEST(Quadtree, ChildrenSitInTheirQuadrant) {
  const auto pts = uniform_points(500, 4);
  const Quadtree tree(pts);
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const auto& node = tree.node(i);
    const auto cells = tree.child_cells(i);
    for (std::size_t k = 0; k < 4; ++k) {
      if (node.children[k] == kPlaceholder) continue;
      const auto& child = tree.node(static_cast<std::size_t>(node.children[k]));
      EXPECT_EQ(child.cell, cells[k]);
      EXPECT_EQ(child.depth, node.depth + 1);
      EXPECT_EQ(Quadtree::quadrant(child.point, node.point), static_cast<int>(k));
    }
  }
}

TEST(Quadtree, LeafCellsPartitionTheSquare) {
  const auto pts = grid_points(200, 16, 9);
  const Quadtree tree(pts);
  std::vector<HalfOpenRect> leaves;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const auto cells = tree.child_cells(i);
    for (std::size_t k = 0; k < 4; ++k) {
      if (tree.node(i).children[k] == kPlaceholder) leaves.push_back(cells[k]);
    }
  }
  EXPECT_EQ(leaves.size(), 3 * pts.size() + 1);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int j = 0; j < 5000; ++j) {
    const UnitPoint z = j % 2 ? UnitPoint{u(rng), u(rng)}
                              : UnitPoint{static_cast<double>(rng() % 17) / 16, static_cast<double>(rng() % 17) / 16};
    const auto hits = std::count_if(leaves.begin(), leaves.end(), [&](const HalfOpenRect& r) { return contains(r, z); });
    ASSERT_EQ(hits, 1);
  }
}

TEST(Quadtree, TiesAreFlagged) {
  EXPECT_FALSE(Quadtree(uniform_points(1000, 1)).has_ties());
  const std::vector<UnitPoint> dup{{0.5, 0.5}, {0.5, 0.5}};
  EXPECT_TRUE(Quadtree(dup).has_ties());
  const std::vector<UnitPoint> shared{{0.5, 0.5}, {0.5, 0.25}};
  EXPECT_TRUE(Quadtree(shared).has_ties());
  const std::vector<UnitPoint> edge{{0.0, 0.5}};
  EXPECT_TRUE(Quadtree(edge).has_ties());
}

TEST(Quadtree, DuplicatesGoSouthWest) {
  const std::vector<UnitPoint> dup{{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}};
  const Quadtree tree(dup);
  EXPECT_EQ(tree.node(0).children[0], 1);
  EXPECT_EQ(tree.node(1).children[0], 2);
  EXPECT_EQ(height(tree), 3);
}

TEST(Quadtree, RejectsPointsOutsideTheSquare) {
  Quadtree tree;
  EXPECT_THROW(tree.insert({1.5, 0.5}), DomainError);
  EXPECT_THROW(tree.insert({0.5, std::nan("")}), DomainError);
  EXPECT_NO_THROW(tree.insert({1.0, 1.0}));
}

TEST(Quadtree, EmptyAndSingle) {
  EXPECT_EQ(Quadtree().size(), 0u);
  EXPECT_EQ(height(Quadtree()), 0);
  const std::vector<UnitPoint> one{{0.3, 0.7}};
  const Quadtree t(one);
  EXPECT_EQ(t.node(0).cell, HalfOpenRect::unit());
  EXPECT_EQ(height(t), 1);
}

TEST(KdTree, CellsMatchOracle) {
  for (auto axis : {SplitAxis::horizontal, SplitAxis::vertical}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto pts = seed % 2 ? uniform_points(300, seed) : grid_points(300, 8, seed);
      const KdTree tree(pts, axis);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        ASSERT_EQ(tree.node(i).cell, kd_cell_oracle(pts, i, axis)) << "seed " << seed << " node " << i;
      }
    }
  }
}

TEST(KdTree, AxesAlternate) {
  const auto pts = uniform_points(400, 8);
  const KdTree tree(pts, SplitAxis::horizontal);
  EXPECT_EQ(tree.axis_at(0), SplitAxis::horizontal);
  EXPECT_EQ(tree.axis_at(1), SplitAxis::vertical);
  EXPECT_EQ(tree.axis_at(2), SplitAxis::horizontal);
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const auto& node = tree.node(i);
    const auto cells = tree.child_cells(i);
    if (tree.axis_at(node.depth) == SplitAxis::horizontal) {
      EXPECT_EQ(cells[0].y_hi, node.point.y);
      EXPECT_EQ(cells[0].x_hi, node.cell.x_hi);
    } else {
      EXPECT_EQ(cells[0].x_hi, node.point.x);
      EXPECT_EQ(cells[0].y_hi, node.cell.y_hi);
    }
  }
}

TEST(KdTree, SwappedPointsGiveSwappedTree) {
  const auto pts = uniform_points(500, 12);
  std::vector<UnitPoint> sw(pts.size());
  std::transform(pts.begin(), pts.end(), sw.begin(), [](const UnitPoint& p) { return UnitPoint{p.y, p.x}; });
  const KdTree h(pts, SplitAxis::horizontal);
  const KdTree v(sw, SplitAxis::vertical);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_EQ(h.node(i).cell.swapped(), v.node(i).cell);
    EXPECT_EQ(h.node(i).children, v.node(i).children);
  }
}

TEST(KdTree, TiesAreFlaggedOnTheCutCoordinateOnly) {
  const std::vector<UnitPoint> cut{{0.5, 0.5}, {0.25, 0.5}};
  EXPECT_TRUE(KdTree(cut, SplitAxis::horizontal).has_ties());
  EXPECT_FALSE(KdTree(cut, SplitAxis::vertical).has_ties());
}

}  // namespace
}  // namespace rangefield
