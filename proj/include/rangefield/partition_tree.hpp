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

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "rangefield/geometry.hpp"

namespace rangefield {

inline constexpr std::int32_t kPlaceholder = -1;

/// A stored point together with the insertion cell it splits.
template <std::size_t Arity>
struct TreeNode {
  UnitPoint point;
  HalfOpenRect cell;
  std::array<std::int32_t, Arity> children;
  std::int32_t depth = 0;

  TreeNode() { children.fill(kPlaceholder); }
  TreeNode(UnitPoint p, HalfOpenRect r, std::int32_t dep) : point(p), cell(r), depth(dep) {
    children.fill(kPlaceholder);
  }
};

/// Calls visit(index, node) for every node whose cell satisfies enter(cell).
/// enter must be monotone: a cell that passes implies its parent passes.
template <class Tree, class Enter, class Visit>
void descend(const Tree& tree, Enter&& enter, Visit&& visit) {
  if (tree.size() == 0) return;
  const auto& nodes = tree.nodes();
  if (!enter(nodes[0].cell)) return;
  std::vector<std::int32_t> stack;
  stack.reserve(64);
  stack.push_back(0);
  while (!stack.empty()) {
    const std::int32_t i = stack.back();
    stack.pop_back();
    const auto& node = nodes[static_cast<std::size_t>(i)];
    visit(i, node);
    for (std::int32_t c : node.children) {
      if (c != kPlaceholder && enter(nodes[static_cast<std::size_t>(c)].cell)) {
        stack.push_back(c);
      }
    }
  }
}

/// Length of the longest root-to-node path, counted in nodes.
template <class Tree>
int height(const Tree& tree) {
  int h = 0;
  for (const auto& node : tree.nodes()) h = std::max(h, node.depth + 1);
  return h;
}

}  // namespace rangefield
