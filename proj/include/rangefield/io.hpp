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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "rangefield/constants.hpp"
#include "rangefield/experiments.hpp"
#include "rangefield/geometry.hpp"
#include "rangefield/meansolver.hpp"
#include "rangefield/version.hpp"

namespace rangefield {

/// Malformed input file.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-tripping decimal form; empty for NaN.
inline std::string format_real(double x) {
  if (std::isnan(x)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_real(const std::string& s, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  while (used < s.size() && (s[used] == ' ' || s[used] == '\r')) ++used;
  if (s.empty() || used != s.size()) {
    throw InputError("line " + std::to_string(line) + ": '" + s + "' is not a number");
  }
  return v;
}

}  // namespace detail

/// Reads rows of `columns` reals from CSV. A first line that is not numeric
/// is taken as a header; blank lines are skipped.
inline std::vector<std::vector<double>> read_real_rows(std::istream& in, std::size_t columns) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto cells = detail::split_csv_line(line);
    if (rows.empty() && lineno == 1) {
      bool numeric = true;
      try {
        for (const auto& c : cells) detail::parse_real(c, lineno);
      } catch (const InputError&) {
        numeric = false;
      }
      if (!numeric) continue;
    }
    if (cells.size() != columns) {
      throw InputError("line " + std::to_string(lineno) + ": expected " + std::to_string(columns) +
                       " columns, found " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(detail::parse_real(c, lineno));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Points CSV with columns x,y in [0, 1].
inline std::vector<UnitPoint> read_points_csv(std::istream& in) {
  std::vector<UnitPoint> pts;
  for (const auto& r : read_real_rows(in, 2)) {
    const UnitPoint p{r[0], r[1]};
    if (!in_unit_square(p)) {
      throw InputError("point (" + format_real(p.x) + ", " + format_real(p.y) + ") is outside [0, 1]^2");
    }
    pts.push_back(p);
  }
  return pts;
}

inline std::vector<UnitPoint> read_points_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_points_csv(in);
}

inline void write_points_csv(std::ostream& out, std::span<const UnitPoint> pts) {
  out << "x,y\n";
  for (const auto& p : pts) out << format_real(p.x) << ',' << format_real(p.y) << '\n';
}

/// GTable export: header s,g with one row per grid node.
inline void write_gtable_csv(std::ostream& out, const GTable& g) {
  out << "s,g\n";
  const auto& s = g.nodes();
  const auto& v = g.values();
  for (std::size_t i = 0; i < s.size(); ++i) out << format_real(s[i]) << ',' << format_real(v[i]) << '\n';
}

/// Field samples: kind,seed,depth,p1,p2,p3,p4,value with unused coordinates empty.
struct FieldSample {
  std::string kind;
  std::uint64_t seed = 0;
  int depth = 0;
  std::vector<double> point;
  double value = 0.0;
};

inline void write_field_samples_csv(std::ostream& out, const std::vector<FieldSample>& samples) {
  out << "kind,seed,depth,p1,p2,p3,p4,value\n";
  for (const auto& s : samples) {
    out << s.kind << ',' << s.seed << ',' << s.depth;
    for (std::size_t k = 0; k < 4; ++k) {
      out << ',';
      if (k < s.point.size()) out << format_real(s.point[k]);
    }
    out << ',' << format_real(s.value) << '\n';
  }
}

/// JSON text with every real printed to 17 significant digits.
inline std::string constants_text() {
  const auto& c = constants();
  const std::vector<std::pair<const char*, double>> fields{
      {"beta", c.beta},         {"k1", c.k1},
      {"kappa_printed", c.kappa_printed}, {"kappa_integral", c.kappa_integral},
      {"gamma_contr", c.gamma_contr},     {"g_contr", c.g_contr},
      {"kd_eq_factor", c.kd_eq_factor},   {"kd_perp_factor", c.kd_perp_factor}};
  std::string out = "{\n";
  for (std::size_t i = 0; i < fields.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", fields[i].second);
    out += "  \"" + std::string(fields[i].first) + "\": " + buf + (i + 1 < fields.size() ? ",\n" : "\n");
  }
  return out + "}\n";
}

inline void write_result_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "experiment,n,probe,estimate,std_error,prediction,ratio\n";
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.n << ',' << r.probe << ',' << format_real(r.estimate) << ','
        << format_real(r.std_error) << ',' << format_real(r.prediction) << ',' << format_real(r.ratio) << '\n';
  }
}

inline void write_raw_csv(std::ostream& out, const ExperimentResult& r) {
  out << "experiment,n,probe,trial,value\n";
  const std::string name(to_string(r.config.experiment));
  for (const auto& s : r.raw) {
    out << name << ',' << s.n << ',' << s.probe << ',' << s.trial << ',' << format_real(s.value) << '\n';
  }
}

/// Summary document: config echo, checks and pass flags. Wall times are kept
/// out of it so that reruns produce identical files.
inline nlohmann::ordered_json summary_json(const std::vector<ExperimentResult>& results) {
  nlohmann::ordered_json j;
  j["version"] = std::string(kVersion);
  bool all = true;
  auto list = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json e;
    e["experiment"] = std::string(to_string(r.config.experiment));
    e["config"] = to_json(r.config);
    auto checks = nlohmann::ordered_json::array();
    for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    e["checks"] = checks;
    e["passed"] = r.all_passed();
    all = all && r.all_passed();
    list.push_back(e);
  }
  j["experiments"] = list;
  j["all_passed"] = all;
  return j;
}

/// Writes <stem>.csv and <stem>_trials.csv per experiment, summary.json and
/// timing.json into `dir`. Stems are experiment names, suffixed -2, -3, ...
/// when an experiment repeats.
inline void write_results(const std::filesystem::path& dir, const std::vector<ExperimentResult>& results) {
  std::filesystem::create_directories(dir);
  std::map<std::string, int> seen;
  nlohmann::ordered_json timing = nlohmann::ordered_json::array();
  auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
    return f;
  };
  for (const auto& r : results) {
    std::string stem(to_string(r.config.experiment));
    const int k = ++seen[stem];
    if (k > 1) stem += "-" + std::to_string(k);
    {
      auto f = open(dir / (stem + ".csv"));
      write_result_csv(f, r.rows);
    }
    {
      auto f = open(dir / (stem + "_trials.csv"));
      write_raw_csv(f, r);
    }
    timing.push_back({{"file", stem}, {"wall_seconds", r.wall_seconds}});
  }
  {
    auto f = open(dir / "summary.json");
    f << summary_json(results).dump(2) << '\n';
  }
  auto f = open(dir / "timing.json");
  f << timing.dump(2) << '\n';
}

}  // namespace rangefield
