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
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rangefield/constants.hpp"
#include "rangefield/geometry.hpp"
#include "rangefield/limit_field.hpp"
#include "rangefield/partition_tree.hpp"

namespace rangefield {

/// Uniform corner grid i / (resolution - 1), i = 0 .. resolution - 1.
inline std::vector<double> corner_grid(int resolution) {
  if (resolution < 2) throw std::invalid_argument("grid resolution must be at least 2");
  std::vector<double> xs(static_cast<std::size_t>(resolution));
  for (int i = 0; i < resolution; ++i) xs[static_cast<std::size_t>(i)] = static_cast<double>(i) / (resolution - 1);
  return xs;
}

/// Maximiser of a grid-sup statistic.
struct GridSup {
  double value = -std::numeric_limits<double>::infinity();
  QueryRect argmax;
};

namespace detail {

// Dense 4-d table indexed by (a, b, c, d) grid indices.
class Grid4 {
 public:
  explicit Grid4(std::size_t m) : m_(m), data_(m * m * m * m, 0) {}
  std::int64_t& at(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    return data_[((i * m_ + j) * m_ + k) * m_ + l];
  }
  std::size_t size() const { return m_; }

  // In-place inclusive prefix sums along every axis.
  void prefix_sums() {
    const std::size_t m = m_;
    for (std::size_t axis = 0; axis < 4; ++axis) {
      const std::size_t stride = axis == 0 ? m * m * m : axis == 1 ? m * m : axis == 2 ? m : 1;
      for (std::size_t idx = 0; idx < data_.size(); ++idx) {
        if ((idx / stride) % m != 0) data_[idx] += data_[idx - stride];
      }
    }
  }

 private:
  std::size_t m_;
  std::vector<std::int64_t> data_;
};

inline std::size_t first_at_least(const std::vector<double>& xs, double v) {
  return static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), v) - xs.begin());
}

}  // namespace detail

/// Sup over grid corners (a <= b, c <= d) of (O_n(q) - n Vol(q)) / n^b for a
/// quadtree or 2-d tree. Every stored cell adds one to the orthant box of
/// grid queries it meets; the counts are recovered by prefix sums.
template <class Tree>
GridSup discrete_grid_sup(const Tree& tree, int resolution) {
  const auto xs = corner_grid(resolution);
  const std::size_t m = xs.size();
  detail::Grid4 diff(m);
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const HalfOpenRect& r = tree.node(i).cell;
    if (r.empty()) continue;
    // Meeting rule on the grid: x_lo <= b, a reaches x_hi, likewise in y.
    const std::size_t a_end = r.x_hi == 1.0 ? m : detail::first_at_least(xs, r.x_hi);
    const std::size_t b_begin = detail::first_at_least(xs, r.x_lo);
    const std::size_t c_end = r.y_hi == 1.0 ? m : detail::first_at_least(xs, r.y_hi);
    const std::size_t d_begin = detail::first_at_least(xs, r.y_lo);
    if (a_end == 0 || b_begin == m || c_end == 0 || d_begin == m) continue;
    diff.at(0, b_begin, 0, d_begin) += 1;
    if (a_end < m) diff.at(a_end, b_begin, 0, d_begin) -= 1;
    if (c_end < m) diff.at(0, b_begin, c_end, d_begin) -= 1;
    if (a_end < m && c_end < m) diff.at(a_end, b_begin, c_end, d_begin) += 1;
  }
  diff.prefix_sums();
  const double n = static_cast<double>(tree.size());
  const double scale = n > 0 ? std::pow(n, -constants().beta) : 1.0;
  GridSup best;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t l = k; l < m; ++l) {
          const double v =
              (static_cast<double>(diff.at(i, j, k, l)) - n * (xs[j] - xs[i]) * (xs[l] - xs[k])) *
              scale;
          if (v > best.value) best = {v, {xs[i], xs[j], xs[k], xs[l]}};
        }
      }
    }
  }
  return best;
}

/// Sup of the depth-K range-query limit field over the same corner grid,
/// from Y and Ybar tabulated on the grid.
inline GridSup limit_grid_sup(const QuadLimitField& field, int resolution) {
  const auto xs = corner_grid(resolution);
  const std::size_t m = xs.size();
  std::vector<double> y(m * m), yb(m * m);
  for (std::size_t t = 0; t < m; ++t) {
    for (std::size_t s = 0; s < m; ++s) {
      y[t * m + s] = field.y(xs[t], xs[s]);
      yb[t * m + s] = field.ybar(xs[t], xs[s]);
    }
  }
  auto Y = [&](std::size_t t, std::size_t s) { return y[t * m + s]; };
  auto Yb = [&](std::size_t t, std::size_t s) { return yb[t * m + s]; };
  GridSup best;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t l = k; l < m; ++l) {
          const double v = 0.5 * (Y(j, l) - Y(j, k) + Y(i, l) - Y(i, k) + Yb(l, j) - Yb(l, i) +
                                  Yb(k, j) - Yb(k, i));
          if (v > best.value) best = {v, {xs[i], xs[j], xs[k], xs[l]}};
        }
      }
    }
  }
  return best;
}

}  // namespace rangefield
