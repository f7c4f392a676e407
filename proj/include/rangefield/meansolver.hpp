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
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// pchip.hpp calls isnan unqualified; declare it first.
#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>

#include "rangefield/constants.hpp"
#include "rangefield/geometry.hpp"
#include "rangefield/quadrature.hpp"

namespace rangefield {

/// Raised when a fixed-point iteration stops before reaching its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Symmetric sigmoidal grading s = w(x) = x^p / (x^p + (1 - x)^p) of [0, 1].
/// The complement 1 - w(x) is evaluated as w(1 - x), so nodes near s = 1
/// keep full relative precision in their distance to 1.
struct Grading {
  double p = 1.0;

  double operator()(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = std::pow(x, p);
    const double b = std::pow(1.0 - x, p);
    return a / (a + b);
  }
  double complement(double x) const { return (*this)(1.0 - x); }
  double derivative(double x) const {
    if (x <= 0.0 || x >= 1.0) return p == 1.0 ? 1.0 : 0.0;
    const double a = std::pow(x, p);
    const double b = std::pow(1.0 - x, p);
    const double s = a + b;
    return p * std::pow(x, p - 1.0) * std::pow(1.0 - x, p - 1.0) / (s * s);
  }
  double inverse(double s) const {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = std::pow(s, 1.0 / p);
    const double b = std::pow(1.0 - s, 1.0 / p);
    return a / (a + b);
  }
};

/// Default grading exponent of the profile grid. The profile behaves like
/// s^((b+1)/2) at 0 (and symmetrically at 1); grading makes it smooth in the
/// grid coordinate so cubic interpolation keeps its order up to the ends.
inline constexpr double kProfileGrading = 4.0;

/// Tabulated constrained mean profile g. Node i sits at s_i = w(i / (m - 1))
/// for the grading w; values are interpolated by a monotone cubic in the grid
/// coordinate.
class GTable {
 public:
  GTable() = default;

  GTable(std::vector<double> values, Grading grading, double residual, int iterations,
         std::vector<double> update_norms)
      : values_(std::move(values)),
        grading_(grading),
        residual_(residual),
        iterations_(iterations),
        update_norms_(std::move(update_norms)) {
    if (values_.size() < 4) throw std::invalid_argument("a GTable needs at least 4 nodes");
    interp_.emplace(coordinates(values_.size()), std::vector<double>(values_));
  }

  /// The uniform grid coordinates i / (m - 1).
  static std::vector<double> coordinates(std::size_t m) {
    std::vector<double> x(m);
    for (std::size_t i = 0; i < m; ++i) x[i] = static_cast<double>(i) / static_cast<double>(m - 1);
    x.back() = 1.0;
    return x;
  }

  /// Node positions s_i.
  std::vector<double> nodes() const {
    std::vector<double> x = coordinates(values_.size());
    for (auto& v : x) v = grading_(v);
    return x;
  }

  bool empty() const { return values_.empty(); }
  std::size_t grid_size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  const Grading& grading() const { return grading_; }
  /// Sup-norm of the last update, which bounds the fixed-point residual.
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }
  /// Sup-norm of each iteration's update, in order.
  const std::vector<double>& update_norms() const { return update_norms_; }

  double operator()(double s) const { return at_coordinate(grading_.inverse(s)); }

  /// Interpolated value at grid coordinate x, i.e. at s = w(x).
  double at_coordinate(double x) const {
    if (!interp_) throw std::logic_error("GTable is empty");
    if (x <= 0.0) return values_.front();
    if (x >= 1.0) return values_.back();
    return (*interp_)(x);
  }

 private:
  std::vector<double> values_;
  Grading grading_;
  double residual_ = 0.0;
  int iterations_ = 0;
  std::vector<double> update_norms_;
  std::optional<boost::math::interpolators::pchip<std::vector<double>>> interp_;
};

namespace detail {

// Discretised right side of the profile equation after the substitutions
// u = s / v and w = (s - v) / (1 - v):
//   G(y)(s) = (b+1)/2 [s^(b+1) int_s^1 u^(-b-2) y(u) du
//                      + (1-s)^(b+1) int_0^s (1-w)^(-b-2) y(w) dw] + s^(b+1)/2.
// Both integrals are taken in the grid coordinate as cumulative sums of
// per-cell Gauss rules applied to the interpolated iterate.
class ProfileOperator {
 public:
  ProfileOperator(std::size_t m, Grading grading)
      : m_(m), grading_(grading), x_(GTable::coordinates(m)) {
    const double b = constants().beta;
    const std::size_t cells = m_ - 1;
    offsets_.reserve(cells + 1);
    offsets_.push_back(0);
    for (std::size_t i = 0; i < cells; ++i) {
      // Cells near either end carry the steep weight of the opposite
      // integral, so they get several sub-panels.
      const std::size_t edge = std::min(i, cells - 1 - i);
      const std::size_t pieces = edge < kRefinedCells ? kSubPanels : 1;
      const double width = (x_[i + 1] - x_[i]) / static_cast<double>(pieces);
      for (std::size_t k = 0; k < pieces; ++k) {
        const double lo = x_[i] + width * static_cast<double>(k);
        const double hi = k + 1 == pieces ? x_[i + 1] : lo + width;
        gauss_panel(lo, hi, [&](double x, double w) {
          nodes_.push_back(x);
          w_hi_.push_back(i == 0 ? 0.0 : hi_weight(x) * w);
          w_lo_.push_back(i + 1 == cells ? 0.0 : lo_weight(x) * w);
        });
      }
      offsets_.push_back(nodes_.size());
    }
    pow_s_.resize(m_);
    pow_1ms_.resize(m_);
    for (std::size_t j = 0; j < m_; ++j) {
      pow_s_[j] = std::pow(grading_(x_[j]), b + 1.0);
      pow_1ms_[j] = std::pow(grading_.complement(x_[j]), b + 1.0);
    }
  }

  /// Applies the operator to the interpolant of grid values `y`.
  std::vector<double> apply(const std::vector<double>& y) const {
    const boost::math::interpolators::pchip<std::vector<double>> f{std::vector<double>(x_),
                                                                   std::vector<double>(y)};
    Sums sums = cell_sums([&](double x) { return f(x); });
    const double b = constants().beta;
    std::vector<double> out(m_);
    out[0] = 0.5 * y[0];
    out[m_ - 1] = 0.5 * y[m_ - 1] + 0.5;
    for (std::size_t j = 1; j + 1 < m_; ++j) {
      out[j] = 0.5 * (b + 1.0) * (pow_s_[j] * sums.upper[j] + pow_1ms_[j] * sums.lower[j]) +
               0.5 * pow_s_[j];
    }
    return out;
  }

  /// Operator applied to g at arbitrary grid coordinates.
  std::vector<double> apply_at(const GTable& g, const std::vector<double>& xs) const {
    const double b = constants().beta;
    Sums sums = cell_sums([&](double x) { return g.at_coordinate(x); });
    std::vector<double> out(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const double x = xs[k];
      if (x <= 0.0) {
        out[k] = 0.5 * g.at_coordinate(0.0);
        continue;
      }
      if (x >= 1.0) {
        out[k] = 0.5 * g.at_coordinate(1.0) + 0.5;
        continue;
      }
      const auto it = std::upper_bound(x_.begin(), x_.end(), x);
      const auto cell = std::min(static_cast<std::size_t>(it - x_.begin()) - 1, m_ - 2);
      double part_hi = 0.0, part_lo = 0.0;
      for (std::size_t k = 0; k < kSubPanels; ++k) {
        const double f0 = static_cast<double>(k) / kSubPanels;
        const double f1 = static_cast<double>(k + 1) / kSubPanels;
        gauss_panel(x + (x_[cell + 1] - x) * f0, x + (x_[cell + 1] - x) * f1,
                    [&](double u, double w) { part_hi += w * hi_weight(u) * g.at_coordinate(u); });
        gauss_panel(x_[cell] + (x - x_[cell]) * f0, x_[cell] + (x - x_[cell]) * f1,
                    [&](double u, double w) { part_lo += w * lo_weight(u) * g.at_coordinate(u); });
      }
      const double up = part_hi + sums.upper[cell + 1];
      const double dn = sums.lower[cell] + part_lo;
      const double ps = std::pow(grading_(x), b + 1.0);
      const double pc = std::pow(grading_.complement(x), b + 1.0);
      out[k] = 0.5 * (b + 1.0) * (ps * up + pc * dn) + 0.5 * ps;
    }
    return out;
  }

 private:
  struct Sums {
    std::vector<double> upper;  // int from node j to 1
    std::vector<double> lower;  // int from 0 to node j
  };

  double hi_weight(double x) const {
    return std::pow(grading_(x), -constants().beta - 2.0) * grading_.derivative(x);
  }
  double lo_weight(double x) const {
    return std::pow(grading_.complement(x), -constants().beta - 2.0) * grading_.derivative(x);
  }

  template <class F>
  Sums cell_sums(F&& f) const {
    const std::size_t cells = m_ - 1;
    std::vector<double> hi(cells, 0.0), lo(cells, 0.0);
    for (std::size_t i = 0; i < cells; ++i) {
      double sh = 0.0, sl = 0.0;
      for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
        const double v = f(nodes_[k]);
        sh += w_hi_[k] * v;
        sl += w_lo_[k] * v;
      }
      hi[i] = sh;
      lo[i] = sl;
    }
    Sums s{std::vector<double>(m_, 0.0), std::vector<double>(m_, 0.0)};
    for (std::size_t j = cells; j-- > 1;) s.upper[j] = s.upper[j + 1] + hi[j];
    for (std::size_t j = 1; j < m_; ++j) s.lower[j] = s.lower[j - 1] + lo[j - 1];
    return s;
  }

  static constexpr std::size_t kRefinedCells = 32;
  static constexpr std::size_t kSubPanels = 8;

  std::size_t m_;
  Grading grading_;
  std::vector<double> x_;
  std::vector<std::size_t> offsets_;
  std::vector<double> nodes_, w_hi_, w_lo_;
  std::vector<double> pow_s_, pow_1ms_;
};

}  // namespace detail

/// Solves the constrained mean profile equation by fixed-point iteration
/// from g0(s) = s, stopping once the sup-norm update drops below `tol`.
inline GTable solve_g(std::size_t m, double tol, int max_iter = 200,
                      Grading grading = Grading{kProfileGrading}) {
  if (m < 65) throw std::invalid_argument("grid size must be at least 65");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be positive");
  const detail::ProfileOperator op(m, grading);
  std::vector<double> y = GTable::coordinates(m);
  for (auto& v : y) v = grading(v);
  std::vector<double> norms;
  double update = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<double> next = op.apply(y);
    update = 0.0;
    for (std::size_t j = 0; j < m; ++j) update = std::max(update, std::abs(next[j] - y[j]));
    norms.push_back(update);
    y = std::move(next);
    if (update < tol) return GTable(std::move(y), grading, update, it, std::move(norms));
  }
  throw ConvergenceError("profile iteration did not converge, last update " +
                             std::to_string(update),
                         update, max_iter);
}

/// Sup-norm of G(g) - g on the grid refined twice (the midpoints between
/// nodes), which measures the interpolation error of the table.
inline double audit_residual(const GTable& g) {
  const std::size_t m = g.grid_size();
  const detail::ProfileOperator op(m, g.grading());
  std::vector<double> mids(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    mids[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(m - 1);
  }
  const std::vector<double> image = op.apply_at(g, mids);
  double r = 0.0;
  for (std::size_t i = 0; i < mids.size(); ++i) {
    r = std::max(r, std::abs(image[i] - g.at_coordinate(mids[i])));
  }
  return r;
}

/// Mean of the constrained limit field: k1 h(t) g(s).
inline double mu(double t, double s, const GTable& g) {
  return constants().k1 * h(t) * g(s);
}

/// Sum of the vertical-edge terms mu(a,d) - mu(a,c) + mu(b,d) - mu(b,c).
inline double vertical_edge_mean(const QueryRect& q, const GTable& g) {
  return mu(q.a, q.d, g) - mu(q.a, q.c, g) + mu(q.b, q.d, g) - mu(q.b, q.c, g);
}

/// Sum of the horizontal-edge terms mu(c,b) - mu(c,a) + mu(d,b) - mu(d,a).
inline double horizontal_edge_mean(const QueryRect& q, const GTable& g) {
  return mu(q.c, q.b, g) - mu(q.c, q.a, g) + mu(q.d, q.b, g) - mu(q.d, q.a, g);
}

/// Mean of the quadtree range-query limit field.
inline double mean_O(const QueryRect& q, const GTable& g) {
  if (!q.valid()) QueryRect::checked(q.a, q.b, q.c, q.d);
  return 0.5 * (vertical_edge_mean(q, g) + horizontal_edge_mean(q, g));
}

/// Combination kd_eq_factor/2 * vertical_edge_mean + kd_perp_factor/2 *
/// horizontal_edge_mean, the mean of the 2-d tree field whose root cut is
/// vertical.
inline double kd_vertical_root_mean(const QueryRect& q, const GTable& g) {
  if (!q.valid()) QueryRect::checked(q.a, q.b, q.c, q.d);
  const auto& k = constants();
  return 0.5 * k.kd_eq_factor * vertical_edge_mean(q, g) +
         0.5 * k.kd_perp_factor * horizontal_edge_mean(q, g);
}

struct KdMeans {
  double eq_mean = 0.0;    ///< root cut horizontal
  double perp_mean = 0.0;  ///< root cut vertical
};

/// Means of the two 2-d tree range-query limit fields. They are related by
/// the coordinate swap: eq_mean(q) = perp_mean(swap(q)).
inline KdMeans mean_O_kd(const QueryRect& q, const GTable& g) {
  return {kd_vertical_root_mean(q.swapped(), g), kd_vertical_root_mean(q, g)};
}

/// Panels per integration direction used by the two-dimensional operator.
inline constexpr std::size_t kG2DPanels = 8;

namespace detail {

// Nodes of one integration direction of the two-dimensional operator: the
// image coordinate fed to the field and the weight times the volume factor.
struct G2DAxis {
  std::vector<double> x;
  std::vector<double> w;
};

// Upper piece: integration variable u in [t, 1], image t / u, factor u^b.
inline G2DAxis g2d_upper(double t, std::size_t panels) {
  const double b = constants().beta;
  const QuadRule r = graded_rule(t, 1.0, panels);
  G2DAxis a;
  for (std::size_t i = 0; i < r.size(); ++i) {
    a.x.push_back(t / r.x[i]);
    a.w.push_back(r.w[i] * std::pow(r.x[i], b));
  }
  return a;
}

// Lower piece: u in [0, t], image (t - u) / (1 - u), factor (1 - u)^b.
inline G2DAxis g2d_lower(double t, std::size_t panels) {
  const double b = constants().beta;
  const QuadRule r = graded_rule(0.0, t, panels);
  G2DAxis a;
  for (std::size_t i = 0; i < r.size(); ++i) {
    a.x.push_back((t - r.x[i]) / (1.0 - r.x[i]));
    a.w.push_back(r.w[i] * std::pow(1.0 - r.x[i], b));
  }
  return a;
}

// v in [0, s] with factor v^b; the image is v itself and is ignored by the
// inhomogeneous terms.
inline G2DAxis g2d_lower_plain(double s, std::size_t panels) {
  const double b = constants().beta;
  const QuadRule r = graded_rule(0.0, s, panels);
  G2DAxis a;
  for (std::size_t i = 0; i < r.size(); ++i) {
    a.x.push_back(r.x[i]);
    a.w.push_back(r.w[i] * std::pow(r.x[i], b));
  }
  return a;
}

template <class F>
double g2d_sum(F&& f, const G2DAxis& du, const G2DAxis& dv) {
  double sum = 0.0;
  for (std::size_t i = 0; i < du.x.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < dv.x.size(); ++j) row += dv.w[j] * f(du.x[i], dv.x[j]);
    sum += du.w[i] * row;
  }
  return sum;
}

}  // namespace detail

/// The two-dimensional mean operator of the constrained field applied to a
/// field f(t, s), evaluated by tensor Gauss quadrature of its six terms.
/// The first inhomogeneous term carries the weight (u v)^b of the south
/// child evaluated at second coordinate 1.
template <class F>
double apply_G2D(F&& f, double t, double s, std::size_t panels = kG2DPanels) {
  const double k1 = constants().k1;
  const auto u_hi = detail::g2d_upper(t, panels);
  const auto u_lo = detail::g2d_lower(t, panels);
  const auto v_hi = detail::g2d_upper(s, panels);
  const auto v_lo = detail::g2d_lower(s, panels);
  const auto v_plain = detail::g2d_lower_plain(s, panels);
  auto source = [k1](double x, double) { return k1 * h(x); };
  return detail::g2d_sum(f, u_hi, v_hi) + detail::g2d_sum(f, u_lo, v_lo) +
         detail::g2d_sum(f, u_hi, v_lo) + detail::g2d_sum(f, u_lo, v_hi) +
         detail::g2d_sum(source, u_hi, v_plain) + detail::g2d_sum(source, u_lo, v_plain);
}

/// Sup over the grid (i / (grid - 1), j / (grid - 1)) of
/// |G(K1 h (x) g) - K1 h (x) g|.
inline double residual_G2D(const GTable& g, std::size_t grid, std::size_t panels = kG2DPanels) {
  if (grid < 2) throw std::invalid_argument("grid must have at least 2 points");
  const double k1 = constants().k1;
  double r = 0.0;
  for (std::size_t i = 0; i < grid; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(grid - 1);
    for (std::size_t j = 0; j < grid; ++j) {
      const double s = static_cast<double>(j) / static_cast<double>(grid - 1);
      const double lhs = apply_G2D([&](double x, double y) { return k1 * h(x) * g(y); }, t, s, panels);
      r = std::max(r, std::abs(lhs - k1 * h(t) * g(s)));
    }
  }
  return r;
}

/// Sum over the four children of E[A_r^(2b)] by tensor quadrature over the
/// split point (U, V).
inline double contraction_quadrature(std::size_t panels = kG2DPanels) {
  const double b2 = 2.0 * constants().beta;
  const QuadRule r = graded_rule(0.0, 1.0, panels);
  double sum = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double u = r.x[i];
    for (std::size_t j = 0; j < r.size(); ++j) {
      const double v = r.x[j];
      const double a = std::pow(u * v, b2) + std::pow(u * (1.0 - v), b2) +
                       std::pow((1.0 - u) * v, b2) + std::pow((1.0 - u) * (1.0 - v), b2);
      sum += r.w[i] * r.w[j] * a;
    }
  }
  return sum;
}

}  // namespace rangefield
