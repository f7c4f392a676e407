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
#include <string_view>
#include <vector>

#include "rangefield/geometry.hpp"
#include "rangefield/partition_tree.hpp"

namespace rangefield {

/// Direction of the cut made at a kd node. A horizontal cut compares y.
enum class SplitAxis { horizontal, vertical };

inline SplitAxis other(SplitAxis a) {
  return a == SplitAxis::horizontal ? SplitAxis::vertical : SplitAxis::horizontal;
}

inline std::string_view to_string(SplitAxis a) {
  return a == SplitAxis::horizontal ? "horizontal" : "vertical";
}

/// Two-dimensional kd tree with alternating cut directions. The root cuts
/// along `root_axis`; child 0 is the lower/left side and owns the split line.
class KdTree {
 public:
  static constexpr std::size_t arity = 2;
  using Node = TreeNode<2>;

  explicit KdTree(SplitAxis root_axis = SplitAxis::horizontal) : root_axis_(root_axis) {}

  KdTree(std::span<const UnitPoint> points, SplitAxis root_axis, std::uint64_t rng_seed = 0)
      : root_axis_(root_axis), rng_seed_(rng_seed) {
    nodes_.reserve(points.size());
    for (const auto& p : points) insert(p);
  }

  SplitAxis root_axis() const { return root_axis_; }

  SplitAxis axis_at(std::int32_t depth) const {
    return depth % 2 == 0 ? root_axis_ : other(root_axis_);
  }

  static int side(const UnitPoint& p, const UnitPoint& s, SplitAxis axis) {
    return axis == SplitAxis::horizontal ? (p.y > s.y ? 1 : 0) : (p.x > s.x ? 1 : 0);
  }

  static std::array<HalfOpenRect, 2> cut(const HalfOpenRect& r, const UnitPoint& s,
                                         SplitAxis axis) {
    if (!contains(r, s)) throw DomainError("split point is not inside the cell");
    if (axis == SplitAxis::horizontal) {
      return {{{r.x_lo, r.x_hi, r.y_lo, s.y, r.x_closed_lo, r.y_closed_lo},
               {r.x_lo, r.x_hi, s.y, r.y_hi, r.x_closed_lo, false}}};
    }
    return {{{r.x_lo, s.x, r.y_lo, r.y_hi, r.x_closed_lo, r.y_closed_lo},
             {s.x, r.x_hi, r.y_lo, r.y_hi, false, r.y_closed_lo}}};
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
      const SplitAxis axis = axis_at(node.depth);
      if ((axis == SplitAxis::horizontal ? p.y == node.point.y : p.x == node.point.x)) {
        ties_ = true;
      }
      const int k = side(p, node.point, axis);
      const std::int32_t c = node.children[static_cast<std::size_t>(k)];
      if (c == kPlaceholder) {
        const HalfOpenRect cell = cut(node.cell, node.point, axis)[static_cast<std::size_t>(k)];
        const std::int32_t depth = node.depth + 1;
        const auto idx = static_cast<std::int32_t>(nodes_.size());
        nodes_[i].children[static_cast<std::size_t>(k)] = idx;
        nodes_.emplace_back(p, cell, depth);
        return;
      }
      i = static_cast<std::size_t>(c);
    }
  }

  std::size_t size() const { return nodes_.size(); }
  const Node& node(std::size_t i) const { return nodes_[i]; }
  const std::vector<Node>& nodes() const { return nodes_; }

  std::array<HalfOpenRect, 2> child_cells(std::size_t i) const {
    return cut(nodes_[i].cell, nodes_[i].point, axis_at(nodes_[i].depth));
  }

  /// True when some point repeats the cut coordinate of an ancestor or sits
  /// on the boundary.
  bool has_ties() const { return ties_; }

  std::uint64_t rng_seed() const { return rng_seed_; }

 private:
  std::vector<Node> nodes_;
  SplitAxis root_axis_ = SplitAxis::horizontal;
  std::uint64_t rng_seed_ = 0;
  bool ties_ = false;
};

inline KdTree build_kdtree(std::span<const UnitPoint> points, SplitAxis root_axis,
                           std::uint64_t rng_seed = 0) {
  return KdTree(points, root_axis, rng_seed);
}

}  // namespace rangefield
