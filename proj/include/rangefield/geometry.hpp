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
#include <sstream>
#include <stdexcept>
#include <string>

namespace rangefield {

/// Raised when an argument lies outside the unit square or the query domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct UnitPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const UnitPoint&, const UnitPoint&) = default;
};

/// True when both coordinates lie in [0, 1]. NaN coordinates fail.
inline bool in_unit_square(const UnitPoint& p) {
  return p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0;
}

/// Axis-aligned rectangle (x_lo, x_hi] x (y_lo, y_hi]. A lower edge may be
/// closed, which only happens on the boundary of the unit square.
struct HalfOpenRect {
  double x_lo = 0.0;
  double x_hi = 1.0;
  double y_lo = 0.0;
  double y_hi = 1.0;
  bool x_closed_lo = true;
  bool y_closed_lo = true;

  static HalfOpenRect unit() { return {}; }

  /// Rectangle whose lower edges are closed exactly when they sit at 0.
  static HalfOpenRect make(double x_lo, double x_hi, double y_lo, double y_hi) {
    return {x_lo, x_hi, y_lo, y_hi, x_lo == 0.0, y_lo == 0.0};
  }

  bool x_contains(double x) const {
    return (x_closed_lo ? x >= x_lo : x > x_lo) && x <= x_hi;
  }
  bool y_contains(double y) const {
    return (y_closed_lo ? y >= y_lo : y > y_lo) && y <= y_hi;
  }

  /// True when the rectangle holds no point of the plane.
  bool empty() const {
    return x_hi < x_lo || y_hi < y_lo || (!x_closed_lo && x_lo == x_hi) ||
           (!y_closed_lo && y_lo == y_hi);
  }

  double area() const { return (x_hi - x_lo) * (y_hi - y_lo); }

  /// Reflection across the diagonal.
  HalfOpenRect swapped() const {
    return {y_lo, y_hi, x_lo, x_hi, y_closed_lo, x_closed_lo};
  }

  friend bool operator==(const HalfOpenRect&, const HalfOpenRect&) = default;
};

/// Closed query rectangle [a, b] x [c, d] inside the unit square.
struct QueryRect {
  double a = 0.0;
  double b = 1.0;
  double c = 0.0;
  double d = 1.0;

  /// True when 0 <= a <= b <= 1 and 0 <= c <= d <= 1.
  bool valid() const {
    return 0.0 <= a && a <= b && b <= 1.0 && 0.0 <= c && c <= d && d <= 1.0;
  }

  /// Builds a query and throws DomainError when it leaves the query domain.
  static QueryRect checked(double a, double b, double c, double d) {
    QueryRect q{a, b, c, d};
    if (!q.valid()) {
      std::ostringstream os;
      os.precision(17);
      os << "query (" << a << ", " << b << ", " << c << ", " << d
         << ") is outside 0 <= a <= b <= 1, 0 <= c <= d <= 1";
      throw DomainError(os.str());
    }
    return q;
  }

  double vol() const { return (b - a) * (d - c); }

  /// The coordinate swap (a, b, c, d) -> (c, d, a, b).
  QueryRect swapped() const { return {c, d, a, b}; }

  bool full() const { return a == 0.0 && b == 1.0 && c == 0.0 && d == 1.0; }

  friend bool operator==(const QueryRect&, const QueryRect&) = default;
};

inline double vol(const QueryRect& q) { return q.vol(); }

inline bool contains(const HalfOpenRect& r, const UnitPoint& p) {
  return r.x_contains(p.x) && r.y_contains(p.y);
}

namespace detail {

// Right-continuous reach test of a query lower edge against a cell upper edge.
// A query starting at 1 still reaches cells whose upper edge is 1.
inline bool reaches(double query_lo, double cell_hi) {
  return query_lo < cell_hi || (query_lo == 1.0 && cell_hi == 1.0);
}

}  // namespace detail

/// Cell/query meeting rule used by every cost counter. Each query edge is
/// read as its right limit, so a degenerate query (t, t, 0, 1) selects the
/// cells crossed by the vertical line just right of t, and a query edge that
/// coincides with a cell's upper edge does not reach into the cell.
inline bool intersects(const HalfOpenRect& r, const QueryRect& q) {
  if (r.empty()) return false;
  return r.x_lo <= q.b && detail::reaches(q.a, r.x_hi) && r.y_lo <= q.d &&
         detail::reaches(q.c, r.y_hi);
}

/// Quadrants of r around p, ordered SW, NW, SE, NE. The split point belongs
/// to SW; new edges are open below.
inline std::array<HalfOpenRect, 4> split(const HalfOpenRect& r, const UnitPoint& p) {
  if (!contains(r, p)) {
    std::ostringstream os;
    os.precision(17);
    os << "split point (" << p.x << ", " << p.y << ") is not inside the cell";
    throw DomainError(os.str());
  }
  return {{
      {r.x_lo, p.x, r.y_lo, p.y, r.x_closed_lo, r.y_closed_lo},
      {r.x_lo, p.x, p.y, r.y_hi, r.x_closed_lo, false},
      {p.x, r.x_hi, r.y_lo, p.y, false, r.y_closed_lo},
      {p.x, r.x_hi, p.y, r.y_hi, false, false},
  }};
}

/// Relative horizontal position of t inside r, or 0 when r's x-range misses t.
inline double phi(const HalfOpenRect& r, double t) {
  if (!r.x_contains(t) || r.x_hi == r.x_lo) return 0.0;
  return (t - r.x_lo) / (r.x_hi - r.x_lo);
}

/// Relative vertical position of s inside r, or 0 when r's y-range misses s.
inline double phi_prime(const HalfOpenRect& r, double s) {
  if (!r.y_contains(s) || r.y_hi == r.y_lo) return 0.0;
  return (s - r.y_lo) / (r.y_hi - r.y_lo);
}

}  // namespace rangefield
