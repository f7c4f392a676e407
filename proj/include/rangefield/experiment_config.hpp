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
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rangefield/geometry.hpp"

namespace rangefield {

enum class ExperimentKind {
  pm_fixed,
  pm_uniform,
  one_sided,
  constrained,
  range_field,
  worst_case,
  limit_vs_discrete,
  fixpoint_residual,
  kd_means,
};

enum class TreeKind { quadtree, kd_horizontal, kd_vertical };

/// Which uniform partial-match constant normalises the 2-d tree predictions.
enum class KappaChoice { integral, printed };

inline constexpr std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::pm_fixed: return "pm-fixed";
    case ExperimentKind::pm_uniform: return "pm-uniform";
    case ExperimentKind::one_sided: return "one-sided";
    case ExperimentKind::constrained: return "constrained";
    case ExperimentKind::range_field: return "range-field";
    case ExperimentKind::worst_case: return "worst-case";
    case ExperimentKind::limit_vs_discrete: return "limit-vs-discrete";
    case ExperimentKind::fixpoint_residual: return "fixpoint-residual";
    case ExperimentKind::kd_means: return "kd-means";
  }
  return "";
}

inline constexpr std::string_view to_string(TreeKind k) {
  switch (k) {
    case TreeKind::quadtree: return "quadtree";
    case TreeKind::kd_horizontal: return "kd-horizontal";
    case TreeKind::kd_vertical: return "kd-vertical";
  }
  return "";
}

inline constexpr std::string_view to_string(KappaChoice k) {
  return k == KappaChoice::integral ? "integral" : "printed";
}

inline std::optional<ExperimentKind> parse_experiment_kind(std::string_view s) {
  for (int i = 0; i <= static_cast<int>(ExperimentKind::kd_means); ++i) {
    const auto k = static_cast<ExperimentKind>(i);
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

/// Accepts the long names and the short forms kd-h / kd-v.
inline std::optional<TreeKind> parse_tree_kind(std::string_view s) {
  if (s == "quadtree") return TreeKind::quadtree;
  if (s == "kd-horizontal" || s == "kd-h") return TreeKind::kd_horizontal;
  if (s == "kd-vertical" || s == "kd-v") return TreeKind::kd_vertical;
  return std::nullopt;
}

/// Invalid experiment configuration. `problems` names every offending field.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : std::invalid_argument(join(problems)), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& ps) {
    std::string out = "invalid experiment config:";
    for (const auto& p : ps) out += "\n  " + p;
    return out;
  }
  std::vector<std::string> problems_;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::pm_fixed;
  TreeKind tree = TreeKind::quadtree;
  std::vector<std::int64_t> n_values;
  int trials = 1;
  std::uint64_t seed = 0;
  /// Depth K of the limit-field iterates.
  int depth_K = 30;
  /// Corner-grid resolutions of the worst-case study.
  std::vector<int> grid{21};
  std::vector<QueryRect> queries;
  std::vector<double> t_values;
  std::vector<std::pair<double, double>> ts_values;
  /// Independent split families for limit-field pipelines; 0 means `trials`.
  int limit_trials = 0;
  /// Weight cutoff of the limit-field iterates.
  double cutoff = 1e-3;
  KappaChoice kappa = KappaChoice::integral;

  int limit_samples() const { return limit_trials > 0 ? limit_trials : trials; }

  /// Every violated constraint, empty when the config is usable.
  std::vector<std::string> problems() const {
    std::vector<std::string> p;
    if (trials < 1) p.emplace_back("trials: must be at least 1");
    if (limit_trials < 0) p.emplace_back("limit_trials: must be non-negative");
    const bool limit_only = experiment == ExperimentKind::fixpoint_residual;
    if (n_values.empty() && !limit_only) p.emplace_back("n_values: must not be empty");
    for (auto n : n_values) {
      if (n < 1) p.emplace_back("n_values: entries must be at least 1");
    }
    if (!std::is_sorted(n_values.begin(), n_values.end())) {
      p.emplace_back("n_values: must be sorted ascending");
    }
    if (depth_K < 0 || depth_K > 30) p.emplace_back("depth_K: must lie in [0, 30]");
    if (!(cutoff >= 0.0 && cutoff < 1.0)) p.emplace_back("cutoff: must lie in [0, 1)");
    for (int g : grid) {
      if (g < 2 || g > 64) p.emplace_back("grid: resolutions must lie in [2, 64]");
    }
    for (const auto& q : queries) {
      if (!q.valid()) p.emplace_back("queries: every query must satisfy 0 <= a <= b <= 1, 0 <= c <= d <= 1");
    }
    for (double t : t_values) {
      if (!(t >= 0.0 && t <= 1.0)) p.emplace_back("t_values: entries must lie in [0, 1]");
    }
    for (const auto& [t, s] : ts_values) {
      if (!(t >= 0.0 && t <= 1.0 && s >= 0.0 && s <= 1.0)) {
        p.emplace_back("ts_values: entries must lie in [0, 1]^2");
      }
    }
    switch (experiment) {
      case ExperimentKind::pm_fixed:
        if (t_values.empty()) p.emplace_back("t_values: required by pm-fixed");
        break;
      case ExperimentKind::one_sided:
        if (t_values.empty()) p.emplace_back("t_values: required by one-sided");
        for (const auto& [s, t] : ts_values) {
          if (s > t) p.emplace_back("ts_values: one-sided strip probes need s <= t");
        }
        break;
      case ExperimentKind::constrained:
        if (ts_values.empty()) p.emplace_back("ts_values: required by constrained");
        if (tree != TreeKind::quadtree) p.emplace_back("tree: constrained supports quadtree only");
        break;
      case ExperimentKind::range_field:
      case ExperimentKind::kd_means:
        if (queries.empty()) p.emplace_back("queries: required by " + std::string(to_string(experiment)));
        break;
      case ExperimentKind::limit_vs_discrete:
      case ExperimentKind::fixpoint_residual:
        if (queries.empty()) p.emplace_back("queries: required by " + std::string(to_string(experiment)));
        if (tree != TreeKind::quadtree) {
          p.emplace_back("tree: " + std::string(to_string(experiment)) + " supports quadtree only");
        }
        break;
      case ExperimentKind::worst_case:
        if (grid.empty()) p.emplace_back("grid: required by worst-case");
        break;
      case ExperimentKind::pm_uniform:
        break;
    }
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    return p;
  }

  void validate() const {
    auto p = problems();
    if (!p.empty()) throw ConfigError(std::move(p));
  }
};

namespace detail {

template <class T>
void read_field(const nlohmann::json& j, const char* key, T& out, std::vector<std::string>& problems) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    problems.emplace_back(std::string(key) + ": wrong type");
  }
}

}  // namespace detail

/// Parses one config object. Unknown keys and malformed values are reported
/// together in a ConfigError, followed by the semantic checks.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  std::vector<std::string> problems;
  if (!j.is_object()) throw ConfigError({"config: must be a JSON object"});
  static const std::vector<std::string> known{
      "experiment", "tree",    "n_values",  "trials",     "seed",         "depth_K", "grid",
      "queries",    "t_values", "ts_values", "limit_trials", "cutoff",    "kappa"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      problems.push_back(key + ": unknown field");
    }
  }
  ExperimentConfig c;
  if (!j.contains("experiment")) {
    problems.emplace_back("experiment: required");
  } else if (!j.at("experiment").is_string()) {
    problems.emplace_back("experiment: wrong type");
  } else if (auto k = parse_experiment_kind(j.at("experiment").get<std::string>())) {
    c.experiment = *k;
  } else {
    problems.emplace_back("experiment: unknown experiment '" + j.at("experiment").get<std::string>() + "'");
  }
  if (j.contains("tree")) {
    if (!j.at("tree").is_string()) {
      problems.emplace_back("tree: wrong type");
    } else if (auto t = parse_tree_kind(j.at("tree").get<std::string>())) {
      c.tree = *t;
    } else {
      problems.emplace_back("tree: unknown tree '" + j.at("tree").get<std::string>() + "'");
    }
  }
  if (j.contains("kappa")) {
    const auto& k = j.at("kappa");
    if (k.is_string() && k.get<std::string>() == "integral") {
      c.kappa = KappaChoice::integral;
    } else if (k.is_string() && k.get<std::string>() == "printed") {
      c.kappa = KappaChoice::printed;
    } else {
      problems.emplace_back("kappa: must be \"integral\" or \"printed\"");
    }
  }
  detail::read_field(j, "n_values", c.n_values, problems);
  detail::read_field(j, "trials", c.trials, problems);
  detail::read_field(j, "seed", c.seed, problems);
  detail::read_field(j, "depth_K", c.depth_K, problems);
  detail::read_field(j, "grid", c.grid, problems);
  detail::read_field(j, "t_values", c.t_values, problems);
  detail::read_field(j, "limit_trials", c.limit_trials, problems);
  detail::read_field(j, "cutoff", c.cutoff, problems);
  std::vector<std::array<double, 4>> qs;
  detail::read_field(j, "queries", qs, problems);
  for (const auto& q : qs) c.queries.push_back({q[0], q[1], q[2], q[3]});
  std::vector<std::array<double, 2>> ts;
  detail::read_field(j, "ts_values", ts, problems);
  for (const auto& p : ts) c.ts_values.emplace_back(p[0], p[1]);
  auto semantic = c.problems();
  problems.insert(problems.end(), semantic.begin(), semantic.end());
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return c;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["experiment"] = std::string(to_string(c.experiment));
  j["tree"] = std::string(to_string(c.tree));
  j["n_values"] = c.n_values;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["depth_K"] = c.depth_K;
  j["grid"] = c.grid;
  auto qs = nlohmann::json::array();
  for (const auto& q : c.queries) qs.push_back({q.a, q.b, q.c, q.d});
  j["queries"] = qs;
  j["t_values"] = c.t_values;
  auto ts = nlohmann::json::array();
  for (const auto& [t, s] : c.ts_values) ts.push_back({t, s});
  j["ts_values"] = ts;
  j["limit_trials"] = c.limit_trials;
  j["cutoff"] = c.cutoff;
  j["kappa"] = std::string(to_string(c.kappa));
  return j;
}

/// A config document is either one config object or {"experiments": [...]}.
inline std::vector<ExperimentConfig> configs_from_json(const nlohmann::json& j) {
  std::vector<ExperimentConfig> out;
  if (j.is_object() && j.contains("experiments")) {
    const auto& list = j.at("experiments");
    if (!list.is_array() || list.empty()) throw ConfigError({"experiments: must be a non-empty array"});
    std::vector<std::string> problems;
    for (std::size_t i = 0; i < list.size(); ++i) {
      try {
        out.push_back(config_from_json(list[i]));
      } catch (const ConfigError& e) {
        for (const auto& p : e.problems()) problems.push_back("experiments[" + std::to_string(i) + "]." + p);
      }
    }
    if (!problems.empty()) throw ConfigError(std::move(problems));
    return out;
  }
  out.push_back(config_from_json(j));
  return out;
}

inline std::vector<ExperimentConfig> load_configs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"config: cannot open '" + path + "'"});
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({std::string("config: ") + e.what()});
  }
  return configs_from_json(j);
}

}  // namespace rangefield
