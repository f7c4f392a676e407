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

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "rangefield/geometry.hpp"
#include "rangefield/partition_tree.hpp"

namespace rangefield {

/// Point quadtree over the unit square. Each point splits the cell it lands
/// in into four quadrants (SW, NW, SE, NE); children are stored in that order.
class Quadtree {
 public:
  static constexpr std::size_t arity = 4;
  using Node = TreeNode<4>;

  Quadtree() = default;

  /// Inserts the points in order. `rng_seed` is recorded for provenance.
  explicit Quadtree(std::span<const UnitPoint> points, std::uint64_t rng_seed = 0)
      : rng_seed_(rng_seed) {
    nodes_.reserve(points.size());
    for (const auto& p : points) insert(p);
  }

  /// Child slot of p relative to the split point s.
  static int quadrant(const UnitPoint& p, const UnitPoint& s) {
    return (p.x > s.x ? 2 : 0) + (p.y > s.y ? 1 : 0);
  }

  void insert(const UnitPoint& p) {
    if (!in_unit_square(p)) throw DomainError("point outside the unit square");
    if (p.x == 0.0 || p.y == 0.0 || p.x == 1.0 || p.y == 1.0) ties_ = true;
    if (nodes_.empty()) {
      nodes_.emplace_back(p, HalfOpenRect::unit(), 0);
      return;
    }
    std::size_t i = 0;
    while (true) {
      const Node& node = nodes_[i];
      if (p.x == node.point.x || p.y == node.point.y) ties_ = true;
      const int q = quadrant(p, node.point);
      const std::int32_t c = node.children[static_cast<std::size_t>(q)];
      if (c == kPlaceholder) {
        const HalfOpenRect cell = split(node.cell, node.point)[static_cast<std::size_t>(q)];
        const std::int32_t depth = node.depth + 1;
        const auto idx = static_cast<std::int32_t>(nodes_.size());
        nodes_[i].children[static_cast<std::size_t>(q)] = idx;
        nodes_.emplace_back(p, cell, depth);
        return;
      }
      i = static_cast<std::size_t>(c);
    }
  }

  std::size_t size() const { return nodes_.size(); }
  const Node& node(std::size_t i) const { return nodes_[i]; }
  const std::vector<Node>& nodes() const { return nodes_; }

  /// The four cells a node's point cuts its cell into, stored child or not.
  std::array<HalfOpenRect, 4> child_cells(std::size_t i) const {
    return split(nodes_[i].cell, nodes_[i].point);
  }

  /// True when some point shares a coordinate with an ancestor split point
  /// or sits on the boundary. Membership is then settled by the half-open rule.
  bool has_ties() const { return ties_; }

  std::uint64_t rng_seed() const { return rng_seed_; }

 private:
  std::vector<Node> nodes_;
  std::uint64_t rng_seed_ = 0;
  bool ties_ = false;
};

inline Quadtree build_quadtree(std::span<const UnitPoint> points, std::uint64_t rng_seed = 0) {
  return Quadtree(points, rng_seed);
}

}  // namespace rangefield
