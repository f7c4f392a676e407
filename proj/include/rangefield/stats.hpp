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
#include <limits>
#include <span>

namespace rangefield {

/// Sample mean and variance by Welford's update.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  std::size_t count() const { return n_; }
  double mean() const { return n_ > 0 ? mean_ : std::numeric_limits<double>::quiet_NaN(); }

  /// Unbiased sample variance; zero for a single sample.
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double sd() const { return std::sqrt(variance()); }

  /// Standard error of the mean: sd / sqrt(count).
  double std_error() const {
    return n_ > 0 ? sd() / std::sqrt(static_cast<double>(n_)) : std::numeric_limits<double>::quiet_NaN();
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

inline RunningStats summarize(std::span<const double> xs) {
  RunningStats s;
  for (double x : xs) s.add(x);
  return s;
}

/// Standard error of the sample variance for the normal-theory approximation,
/// var * sqrt(2 / (n - 1)).
inline double variance_std_error(const RunningStats& s) {
  return s.count() > 1 ? s.variance() * std::sqrt(2.0 / static_cast<double>(s.count() - 1))
                       : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace rangefield
