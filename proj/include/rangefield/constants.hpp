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

#include <boost/math/special_functions/gamma.hpp>

namespace rangefield {

/// Closed-form constants of the cost asymptotics. Evaluated once in extended
/// precision and rounded to double.
struct Constants {
  double beta;            ///< (sqrt(17) - 3) / 2, root of b^2 + 3b - 2
  double k1;              ///< partial-match profile constant
  double kappa_printed;   ///< Gamma(2b+3) / (2 Gamma(b+1)^3)
  double kappa_integral;  ///< k1 * integral of h = Gamma(2b+2) / (2 Gamma(b+1)^3)
  double gamma_contr;     ///< 4 / (2b+1)^2
  double g_contr;         ///< 1 - 2^(-b-1)
  double kd_eq_factor;    ///< 13 (3 - 5b) / 2
  double kd_perp_factor;  ///< 13 (2b - 1)
};

namespace detail {

inline Constants compute_constants() {
  using boost::math::tgamma;
  using R = long double;
  const R b = (std::sqrt(R{17}) - R{3}) / R{2};
  const R g1 = tgamma(b + R{1});
  const R g1cube = g1 * g1 * g1;
  const R ghalf = tgamma(b / R{2} + R{1});
  Constants c{};
  c.beta = static_cast<double>(b);
  c.k1 = static_cast<double>(tgamma(R{2} * b + R{2}) * tgamma(b + R{2}) /
                             (R{2} * g1cube * ghalf * ghalf));
  c.kappa_printed = static_cast<double>(tgamma(R{2} * b + R{3}) / (R{2} * g1cube));
  c.kappa_integral = static_cast<double>(tgamma(R{2} * b + R{2}) / (R{2} * g1cube));
  c.gamma_contr = static_cast<double>(R{4} / ((R{2} * b + R{1}) * (R{2} * b + R{1})));
  c.g_contr = static_cast<double>(R{1} - std::pow(R{2}, -b - R{1}));
  c.kd_eq_factor = static_cast<double>(R{13} * (R{3} - R{5} * b) / R{2});
  c.kd_perp_factor = static_cast<double>(R{13} * (R{2} * b - R{1}));
  return c;
}

}  // namespace detail

inline const Constants& constants() {
  static const Constants c = detail::compute_constants();
  return c;
}

/// Partial-match profile h(t) = (t (1 - t))^(b/2).
inline double h(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return std::pow(t * (1.0 - t), 0.5 * constants().beta);
}

}  // namespace rangefield
