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

#include "rangefield/geometry.hpp"
#include "rangefield/partition_tree.hpp"

namespace rangefield {

/// The terms of the exact cost decomposition for one (tree, query) pair.
/// Y-terms count points visited by a partial match on a query edge line,
/// restricted to the strip outside that edge; d1..d4 count points of the
/// corner regions visited by the exact-match search for the matching corner.
struct CostBreakdown {
  std::int64_t o = 0;
  std::int64_t n_inside = 0;
  std::int64_t y_ge_bd = 0, y_ge_bc = 0, y_lt_ad = 0, y_lt_ac = 0;
  std::int64_t ybar_ge_db = 0, ybar_ge_da = 0, ybar_lt_cb = 0, ybar_lt_ca = 0;
  std::int64_t d1 = 0, d2 = 0, d3 = 0, d4 = 0;
  /// Cost when placeholders meeting the query are also counted.
  std::int64_t o_box = 0;

  std::int64_t strip_terms() const {
    return (y_ge_bd - y_ge_bc) + (y_lt_ad - y_lt_ac) + (ybar_ge_db - ybar_ge_da) +
           (ybar_lt_cb - ybar_lt_ca);
  }

  /// Right side of the decomposition identity.
  std::int64_t rhs() const { return n_inside + strip_terms() + d1 + d2 + d3 + d4; }

  /// Right side of the placeholder identity (quadtrees).
  std::int64_t box_rhs() const { return o + 3 * n_inside + 1 + strip_terms(); }

  bool balanced() const { return o == rhs(); }
  bool box_balanced() const { return o_box == box_rhs(); }
};

namespace detail {

inline void require_query(const QueryRect& q) {
  if (!q.valid()) QueryRect::checked(q.a, q.b, q.c, q.d);
}

inline void require_unit(double t, const char* name) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError(std::string(name) + " must lie in [0, 1]");
  }
}

}  // namespace detail

/// Number of stored nodes whose insertion cell meets q (placeholders excluded).
template <class Tree>
std::int64_t range_cost(const Tree& tree, const QueryRect& q) {
  detail::require_query(q);
  std::int64_t count = 0;
  descend(
      tree, [&](const HalfOpenRect& r) { return intersects(r, q); },
      [&](std::int32_t, const auto&) { ++count; });
  return count;
}

/// range_cost plus the number of placeholder cells meeting q.
template <class Tree>
std::int64_t range_cost_with_placeholders(const Tree& tree, const QueryRect& q) {
  detail::require_query(q);
  if (tree.size() == 0) return intersects(HalfOpenRect::unit(), q) ? 1 : 0;
  std::int64_t count = 0;
  descend(
      tree, [&](const HalfOpenRect& r) { return intersects(r, q); },
      [&](std::int32_t i, const auto& node) {
        ++count;
        const auto cells = tree.child_cells(static_cast<std::size_t>(i));
        for (std::size_t k = 0; k < cells.size(); ++k) {
          if (node.children[k] == kPlaceholder && intersects(cells[k], q)) ++count;
        }
      });
  return count;
}

/// Cost of the partial match query on the vertical line x = t.
template <class Tree>
std::int64_t partial_match_cost(const Tree& tree, double t) {
  detail::require_unit(t, "t");
  return range_cost(tree, QueryRect{t, t, 0.0, 1.0});
}

struct OneSidedCosts {
  std::int64_t lt = 0;  ///< visited points with x <= t
  std::int64_t ge = 0;  ///< visited points with x > t
};

template <class Tree>
OneSidedCosts one_sided_costs(const Tree& tree, double t) {
  detail::require_unit(t, "t");
  const QueryRect q{t, t, 0.0, 1.0};
  OneSidedCosts out;
  descend(
      tree, [&](const HalfOpenRect& r) { return intersects(r, q); },
      [&](std::int32_t, const auto& node) { (node.point.x <= t ? out.lt : out.ge) += 1; });
  return out;
}

struct ConstrainedCosts {
  std::int64_t y = 0;
  std::int64_t y_lt = 0;
  std::int64_t y_ge = 0;
};

/// Visited points of the partial match at x = t with y <= s, split into
/// x <= t (y_lt) and x > t (y_ge).
template <class Tree>
ConstrainedCosts constrained_costs(const Tree& tree, double t, double s) {
  detail::require_unit(t, "t");
  detail::require_unit(s, "s");
  const QueryRect q{t, t, 0.0, 1.0};
  ConstrainedCosts out;
  descend(
      tree, [&](const HalfOpenRect& r) { return intersects(r, q); },
      [&](std::int32_t, const auto& node) {
        if (node.point.y > s) return;
        (node.point.x <= t ? out.y_lt : out.y_ge) += 1;
      });
  out.y = out.y_lt + out.y_ge;
  return out;
}

/// Coordinate-swapped constrained costs: visited points of the partial match
/// on the horizontal line y = t with x <= s, split into y <= t and y > t.
template <class Tree>
ConstrainedCosts constrained_costs_bar(const Tree& tree, double t, double s) {
  detail::require_unit(t, "t");
  detail::require_unit(s, "s");
  const QueryRect q{0.0, 1.0, t, t};
  ConstrainedCosts out;
  descend(
      tree, [&](const HalfOpenRect& r) { return intersects(r, q); },
      [&](std::int32_t, const auto& node) {
        if (node.point.x > s) return;
        (node.point.y <= t ? out.y_lt : out.y_ge) += 1;
      });
  out.y = out.y_lt + out.y_ge;
  return out;
}

/// Points of each corner region visited by the exact-match search for the
/// corresponding corner: (a,c) with [0,a]x[0,c], (a,d) with [0,a]x(d,1],
/// (b,c) with (b,1]x[0,c], (b,d) with (b,1]x(d,1].
template <class Tree>
std::array<std::int64_t, 4> corner_visit_counts(const Tree& tree, const QueryRect& q) {
  detail::require_query(q);
  std::array<std::int64_t, 4> out{};
  const std::array<UnitPoint, 4> corners{{{q.a, q.c}, {q.a, q.d}, {q.b, q.c}, {q.b, q.d}}};
  for (std::size_t k = 0; k < 4; ++k) {
    const UnitPoint z = corners[k];
    const QueryRect probe{z.x, z.x, z.y, z.y};
    const bool east = k >= 2;
    const bool north = (k % 2) == 1;
    descend(
        tree, [&](const HalfOpenRect& r) { return intersects(r, probe); },
        [&](std::int32_t, const auto& node) {
          const bool in_x = east ? node.point.x > z.x : node.point.x <= z.x;
          const bool in_y = north ? node.point.y > z.y : node.point.y <= z.y;
          if (in_x && in_y) ++out[k];
        });
  }
  return out;
}

/// Stored points inside (a,b] x (c,d].
template <class Tree>
std::int64_t count_points_in(const Tree& tree, const QueryRect& q) {
  detail::require_query(q);
  std::int64_t count = 0;
  descend(
      tree, [&](const HalfOpenRect& r) { return intersects(r, q); },
      [&](std::int32_t, const auto& node) {
        const UnitPoint& p = node.point;
        if (p.x > q.a && p.x <= q.b && p.y > q.c && p.y <= q.d) ++count;
      });
  return count;
}

/// Computes every term of the decomposition, each by its own traversal.
template <class Tree>
CostBreakdown decompose(const Tree& tree, const QueryRect& q) {
  detail::require_query(q);
  CostBreakdown out;
  out.o = range_cost(tree, q);
  out.o_box = range_cost_with_placeholders(tree, q);
  out.n_inside = count_points_in(tree, q);
  out.y_ge_bd = constrained_costs(tree, q.b, q.d).y_ge;
  out.y_ge_bc = constrained_costs(tree, q.b, q.c).y_ge;
  out.y_lt_ad = constrained_costs(tree, q.a, q.d).y_lt;
  out.y_lt_ac = constrained_costs(tree, q.a, q.c).y_lt;
  out.ybar_ge_db = constrained_costs_bar(tree, q.d, q.b).y_ge;
  out.ybar_ge_da = constrained_costs_bar(tree, q.d, q.a).y_ge;
  out.ybar_lt_cb = constrained_costs_bar(tree, q.c, q.b).y_lt;
  out.ybar_lt_ca = constrained_costs_bar(tree, q.c, q.a).y_lt;
  const auto d = corner_visit_counts(tree, q);
  out.d1 = d[0];
  out.d2 = d[1];
  out.d3 = d[2];
  out.d4 = d[3];
  return out;
}

/// Exact integer check of the decomposition identity.
template <class Tree>
bool verify_decomposition(const Tree& tree, const QueryRect& q) {
  return decompose(tree, q).balanced();
}

}  // namespace rangefield
