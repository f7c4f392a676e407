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
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rangefield/constants.hpp"
#include "rangefield/geometry.hpp"
#include "rangefield/kdtree.hpp"
#include "rangefield/meansolver.hpp"
#include "rangefield/quadrature.hpp"
#include "rangefield/split_family.hpp"

namespace rangefield {

/// Truncation controls of the recursive limit constructions.
struct LimitOptions {
  /// Number of recursion levels K below the evaluation root.
  int depth = 30;
  /// A subtree whose accumulated weight (product of A^b along its path)
  /// falls below this value is replaced by its depth-0 initialisation.
  /// The initialisations are mean fields, so expectations are unchanged.
  double cutoff = 1e-3;
};

/// Volume fractions A_r = |Q_r| of the four children of the unit square cut
/// at (u, v), raised to the power b. Order SW, NW, SE, NE.
inline std::array<double, 4> child_weights(const SplitPair& p) {
  const double b = constants().beta;
  const double ub = std::pow(p.u, b), uc = std::pow(1.0 - p.u, b);
  const double vb = std::pow(p.v, b), vc = std::pow(1.0 - p.v, b);
  return {ub * vb, ub * vc, uc * vb, uc * vc};
}

/// Child-normalised query for child r (0 = SW, 1 = NW, 2 = SE, 3 = NE) of the
/// square cut at (u, v), or nothing when the query misses that child. Query
/// edges outside the child are clamped to the child boundary.
inline std::optional<QueryRect> clip_to_child(const QueryRect& q, const SplitPair& p, int r) {
  const bool left = r < 2;
  const bool south = r % 2 == 0;
  QueryRect out;
  if (left) {
    if (!(q.a <= p.u)) return std::nullopt;
    out.a = q.a / p.u;
    out.b = q.b <= p.u ? q.b / p.u : 1.0;
  } else {
    if (!(q.b > p.u)) return std::nullopt;
    out.a = q.a > p.u ? (q.a - p.u) / (1.0 - p.u) : 0.0;
    out.b = (q.b - p.u) / (1.0 - p.u);
  }
  if (south) {
    if (!(q.c <= p.v)) return std::nullopt;
    out.c = q.c / p.v;
    out.d = q.d <= p.v ? q.d / p.v : 1.0;
  } else {
    if (!(q.d > p.v)) return std::nullopt;
    out.c = q.c > p.v ? (q.c - p.v) / (1.0 - p.v) : 0.0;
    out.d = (q.d - p.v) / (1.0 - p.v);
  }
  return out;
}

using QueryField = std::function<double(const QueryRect&)>;

/// One application of the right side of the range-field fixed-point map:
/// sum over r of A_r^b f_r(clip_r(q)) for the children the query meets.
inline double apply_D(const std::array<QueryField, 4>& fields, const SplitPair& p,
                      const QueryRect& q) {
  const auto w = child_weights(p);
  double sum = 0.0;
  for (int r = 0; r < 4; ++r) {
    if (auto c = clip_to_child(q, p, r)) sum += w[static_cast<std::size_t>(r)] * fields[static_cast<std::size_t>(r)](*c);
  }
  return sum;
}

/// Expectation over the split point (U, V) of the fixed-point map's right
/// side with the same field f in all four children. The integrand jumps where
/// U or V crosses a query edge, so each axis is integrated piecewise between
/// those edges with graded Gauss rules.
inline double apply_G_star_star(const QueryField& f, const QueryRect& q,
                                std::size_t panels = kG2DPanels) {
  auto pieces = [panels](double lo_edge, double hi_edge) {
    std::vector<double> cuts{0.0, lo_edge, hi_edge, 1.0};
    QuadRule all;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      if (!(cuts[k + 1] > cuts[k])) continue;
      const QuadRule r = graded_rule(cuts[k], cuts[k + 1], panels);
      all.x.insert(all.x.end(), r.x.begin(), r.x.end());
      all.w.insert(all.w.end(), r.w.begin(), r.w.end());
    }
    return all;
  };
  const QuadRule ru = pieces(q.a, q.b);
  const QuadRule rv = pieces(q.c, q.d);
  const std::array<QueryField, 4> fields{f, f, f, f};
  double sum = 0.0;
  for (std::size_t i = 0; i < ru.size(); ++i) {
    for (std::size_t j = 0; j < rv.size(); ++j) {
      sum += ru.w[i] * rv.w[j] * apply_D(fields, SplitPair{ru.x[i], rv.x[j]}, q);
    }
  }
  return sum;
}

/// Child-normalised query for the kd cut at `split` along `axis`; child 0 is
/// the lower/left side.
inline std::optional<QueryRect> clip_to_kd_child(const QueryRect& q, double split,
                                                 SplitAxis axis, int r) {
  double lo = axis == SplitAxis::horizontal ? q.c : q.a;
  double hi = axis == SplitAxis::horizontal ? q.d : q.b;
  double nlo, nhi;
  if (r == 0) {
    if (!(lo <= split)) return std::nullopt;
    nlo = lo / split;
    nhi = hi <= split ? hi / split : 1.0;
  } else {
    if (!(hi > split)) return std::nullopt;
    nlo = lo > split ? (lo - split) / (1.0 - split) : 0.0;
    nhi = (hi - split) / (1.0 - split);
  }
  QueryRect out = q;
  if (axis == SplitAxis::horizontal) {
    out.c = nlo;
    out.d = nhi;
  } else {
    out.a = nlo;
    out.b = nhi;
  }
  return out;
}

/// Right side of the kd fixed-point map for a horizontal cut at v: the two
/// fields are evaluated on the child-normalised query. Callers compose the
/// fields with the coordinate swap where the construction asks for it.
inline double apply_D_kd(const std::array<QueryField, 2>& fields, double v, const QueryRect& q) {
  const double b = constants().beta;
  const std::array<double, 2> w{std::pow(v, b), std::pow(1.0 - v, b)};
  double sum = 0.0;
  for (int r = 0; r < 2; ++r) {
    if (auto c = clip_to_kd_child(q, v, SplitAxis::horizontal, r)) {
      sum += w[static_cast<std::size_t>(r)] * fields[static_cast<std::size_t>(r)](*c);
    }
  }
  return sum;
}

/// Expectation over the horizontal cut V of the kd fixed-point map's right
/// side with the field f in both children, integrated piecewise between the
/// query's horizontal edges.
inline double apply_kd_G_star_star(const QueryField& f, const QueryRect& q,
                                   std::size_t panels = kG2DPanels) {
  const std::array<double, 4> cuts{0.0, q.c, q.d, 1.0};
  const std::array<QueryField, 2> fields{f, f};
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (!(cuts[k + 1] > cuts[k])) continue;
    const QuadRule r = graded_rule(cuts[k], cuts[k + 1], panels);
    for (std::size_t i = 0; i < r.size(); ++i) sum += r.w[i] * apply_D_kd(fields, r.x[i], q);
  }
  return sum;
}

/// Depth-K iterates of the quadtree limit fields driven by one split family:
/// the partial-match field Z, the constrained field Y and its coordinate-
/// swapped twin Ybar, and the range-query field O built from Y and Ybar.
class QuadLimitField {
 public:
  QuadLimitField(const SplitFamily& family, LimitOptions options)
      : family_(family), options_(options) {
    if (family.arity() != 4) throw std::invalid_argument("quadtree fields need a 4-ary family");
    if (options.depth < 0) throw std::invalid_argument("depth must be non-negative");
    if (family.root().length + options.depth > family.max_length()) {
      throw std::invalid_argument("depth exceeds the word encoding");
    }
  }

  const SplitFamily& family() const { return family_; }
  const LimitOptions& options() const { return options_; }

  /// Z_K(t). `weight` is the path weight the evaluation root carries.
  double z(double t, double weight = 1.0) const {
    return z_rec(family_.root(), t, options_.depth, weight);
  }

  /// Y_K(t, s).
  double y(double t, double s, double weight = 1.0) const {
    return y_rec<false>(family_.root(), t, s, options_.depth, weight);
  }

  /// Ybar_K(t, s): the constrained field of the coordinate-swapped partition.
  double ybar(double t, double s, double weight = 1.0) const {
    return y_rec<true>(family_.root(), t, s, options_.depth, weight);
  }

  /// O_K(a, b, c, d).
  double o(const QueryRect& q, double weight = 1.0) const {
    if (!q.valid()) QueryRect::checked(q.a, q.b, q.c, q.d);
    const double vert = y(q.b, q.d, weight) - y(q.b, q.c, weight) + y(q.a, q.d, weight) -
                        y(q.a, q.c, weight);
    const double horiz = ybar(q.d, q.b, weight) - ybar(q.d, q.a, weight) +
                         ybar(q.c, q.b, weight) - ybar(q.c, q.a, weight);
    return 0.5 * (vert + horiz);
  }

 private:
  double base(double t) const { return constants().k1 * h(t); }

  double z_rec(Word w, double t, int k, double weight) const {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    if (k == 0 || weight < options_.cutoff) return base(t);
    const SplitPair p = family_.at(w);
    const double b = constants().beta;
    const bool left = t <= p.u;
    const double x = left ? t / p.u : (t - p.u) / (1.0 - p.u);
    const double a = std::pow(left ? p.u : 1.0 - p.u, b);
    const double ws = a * std::pow(p.v, b);
    const double wn = a * std::pow(1.0 - p.v, b);
    const int south = left ? 0 : 2;
    return ws * z_rec(family_.child(w, south), x, k - 1, weight * ws) +
           wn * z_rec(family_.child(w, south + 1), x, k - 1, weight * wn);
  }

  // In the swapped frame the node's cut reads (v, u) and local child r is
  // stored under word letter kSwapChild[r].
  template <bool Swapped>
  double y_rec(Word w, double t, double s, int k, double weight) const {
    static constexpr std::array<int, 4> kSwapChild{0, 2, 1, 3};
    if (t <= 0.0 || t >= 1.0) return 0.0;
    if (k == 0) return base(t);
    if (s >= 1.0 && weight < options_.cutoff) return base(t);
    const SplitPair raw = family_.at(w);
    const SplitPair p = Swapped ? SplitPair{raw.v, raw.u} : raw;
    const double b = constants().beta;
    const bool left = t <= p.u;
    const double x = left ? t / p.u : (t - p.u) / (1.0 - p.u);
    const double a = std::pow(left ? p.u : 1.0 - p.u, b);
    const double ws = a * std::pow(p.v, b);
    const double wn = a * std::pow(1.0 - p.v, b);
    const int south = left ? 0 : 2;
    const Word cs = family_.child(w, Swapped ? kSwapChild[south] : south);
    const Word cn = family_.child(w, Swapped ? kSwapChild[south + 1] : south + 1);
    if (s <= p.v) return ws * y_rec<Swapped>(cs, x, s / p.v, k - 1, weight * ws);
    return ws * y_rec<Swapped>(cs, x, 1.0, k - 1, weight * ws) +
           wn * y_rec<Swapped>(cn, x, (s - p.v) / (1.0 - p.v), k - 1, weight * wn);
  }

  SplitFamily family_;
  LimitOptions options_;
};

inline double z_eval(const SplitFamily& family, const LimitOptions& options, double t) {
  return QuadLimitField(family, options).z(t);
}

struct YZValues {
  std::vector<double> y;
  std::vector<double> ybar;
  std::vector<double> z;
};

/// Y, Ybar and Z at each (t, s) from one family; z is evaluated at t.
inline YZValues yz_eval(const SplitFamily& family, const LimitOptions& options,
                        std::span<const std::pair<double, double>> points) {
  const QuadLimitField f(family, options);
  YZValues out;
  out.y.reserve(points.size());
  out.ybar.reserve(points.size());
  out.z.reserve(points.size());
  for (const auto& [t, s] : points) {
    out.y.push_back(f.y(t, s));
    out.ybar.push_back(f.ybar(t, s));
    out.z.push_back(f.z(t));
  }
  return out;
}

inline double o_eval(const SplitFamily& family, const LimitOptions& options, const QueryRect& q) {
  return QuadLimitField(family, options).o(q);
}

/// Depth-K iterates of the kd range-query limit fields. Each level cuts the
/// current frame along the axis the tree alternates to (a horizontal cut
/// uses V of the node, a vertical cut uses U); truncated subtrees take the
/// mean field of the tree orientation they stand for.
class KdLimitField {
 public:
  KdLimitField(const SplitFamily& family, LimitOptions options, const GTable& g)
      : family_(family), options_(options), g_(&g) {
    if (family.arity() != 2) throw std::invalid_argument("kd fields need a binary family");
    if (options.depth < 0) throw std::invalid_argument("depth must be non-negative");
    if (family.root().length + options.depth > family.max_length()) {
      throw std::invalid_argument("depth exceeds the word encoding");
    }
  }

  /// Field of the tree whose root cut is `root_axis`.
  double eval(const QueryRect& q, SplitAxis root_axis, double weight = 1.0) const {
    if (!q.valid()) QueryRect::checked(q.a, q.b, q.c, q.d);
    return rec(family_.root(), q, root_axis, options_.depth, weight);
  }

 private:
  double rec(Word w, const QueryRect& q, SplitAxis axis, int k, double weight) const;

  SplitFamily family_;
  LimitOptions options_;
  const GTable* g_;
};

struct KdLimitValues {
  double o_eq = 0.0;    ///< horizontal root cut
  double o_perp = 0.0;  ///< vertical root cut
};

inline double KdLimitField::rec(Word w, const QueryRect& q, SplitAxis axis, int k,
                                double weight) const {
  if (q.full()) return 0.0;
  if (k == 0 || weight < options_.cutoff) {
    const KdMeans m = mean_O_kd(q, *g_);
    return axis == SplitAxis::horizontal ? m.eq_mean : m.perp_mean;
  }
  const SplitPair p = family_.at(w);
  const double split = axis == SplitAxis::horizontal ? p.v : p.u;
  const double b = constants().beta;
  const std::array<double, 2> wt{std::pow(split, b), std::pow(1.0 - split, b)};
  double sum = 0.0;
  for (int r = 0; r < 2; ++r) {
    if (auto c = clip_to_kd_child(q, split, axis, r)) {
      const double wr = wt[static_cast<std::size_t>(r)];
      sum += wr * rec(family_.child(w, r), *c, other(axis), k - 1, weight * wr);
    }
  }
  return sum;
}

/// Both kd fields at q from one binary family.
inline KdLimitValues kd_limit_eval(const SplitFamily& family, const LimitOptions& options,
                                   const QueryRect& q, const GTable& g) {
  const KdLimitField f(family, options, g);
  return {f.eval(q, SplitAxis::horizontal), f.eval(q, SplitAxis::vertical)};
}

}  // namespace rangefield
