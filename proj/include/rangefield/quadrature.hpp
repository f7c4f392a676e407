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

#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace rangefield {

/// A fixed set of nodes and weights on an interval.
struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;

  std::size_t size() const { return x.size(); }

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += w[i] * f(x[i]);
    return sum;
  }
};

inline constexpr std::size_t kGaussOrder = 8;

/// Gauss-Legendre nodes of order kGaussOrder mapped onto [lo, hi].
template <class Visit>
void gauss_panel(double lo, double hi, Visit&& visit) {
  using G = boost::math::quadrature::gauss<double, kGaussOrder>;
  const auto& abs = G::abscissa();
  const auto& wts = G::weights();
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  // Boost stores the non-negative half of a symmetric rule.
  for (std::size_t i = 0; i < abs.size(); ++i) {
    if (abs[i] == 0.0) {
      visit(mid, half * wts[i]);
    } else {
      visit(mid - half * abs[i], half * wts[i]);
      visit(mid + half * abs[i], half * wts[i]);
    }
  }
}

/// Composite Gauss-Legendre rule with equal panels on [lo, hi].
inline QuadRule composite_rule(double lo, double hi, std::size_t panels) {
  QuadRule r;
  r.x.reserve(panels * kGaussOrder);
  r.w.reserve(panels * kGaussOrder);
  const double width = (hi - lo) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = lo + width * static_cast<double>(p);
    const double b = (p + 1 == panels) ? hi : a + width;
    gauss_panel(a, b, [&](double x, double w) {
      r.x.push_back(x);
      r.w.push_back(w);
    });
  }
  return r;
}

/// Composite rule on [lo, hi] after the sigmoidal change of variable
/// x = lo + (hi - lo) tau^p / (tau^p + (1 - tau)^p). Nodes cluster at both
/// ends, which absorbs algebraic endpoint singularities of the integrand.
inline QuadRule graded_rule(double lo, double hi, std::size_t panels, double p = 4.0) {
  const QuadRule base = composite_rule(0.0, 1.0, panels);
  QuadRule r;
  r.x.resize(base.size());
  r.w.resize(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double tau = base.x[i];
    const double a = std::pow(tau, p);
    const double b = std::pow(1.0 - tau, p);
    const double s = a + b;
    const double dw = p * std::pow(tau, p - 1.0) * std::pow(1.0 - tau, p - 1.0) / (s * s);
    r.x[i] = lo + (hi - lo) * (a / s);
    r.w[i] = (hi - lo) * dw * base.w[i];
  }
  return r;
}

}  // namespace rangefield
