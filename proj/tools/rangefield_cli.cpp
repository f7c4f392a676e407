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
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rangefield/rangefield.hpp"

namespace rf = rangefield;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

/// Usage error raised after parsing, reported with exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

rf::TreeKind tree_kind(const std::string& s) {
  if (auto t = rf::parse_tree_kind(s)) return *t;
  throw UsageError("--tree must be quadtree, kd-h or kd-v");
}

std::vector<rf::UnitPoint> load_points(const std::string& file, std::optional<std::int64_t> n,
                                       std::uint64_t seed) {
  if (!file.empty()) return rf::read_points_file(file);
  if (!n) throw UsageError("give --points-file or --n");
  if (*n < 0) throw UsageError("--n must be non-negative");
  return rf::uniform_points(static_cast<std::size_t>(*n), seed);
}

template <class Fn>
auto with_tree(rf::TreeKind kind, const std::vector<rf::UnitPoint>& pts, Fn&& fn) {
  switch (kind) {
    case rf::TreeKind::kd_horizontal: return fn(rf::build_kdtree(pts, rf::SplitAxis::horizontal));
    case rf::TreeKind::kd_vertical: return fn(rf::build_kdtree(pts, rf::SplitAxis::vertical));
    case rf::TreeKind::quadtree: break;
  }
  return fn(rf::build_quadtree(pts));
}

/// Writes through `path`, or to stdout when it is empty.
template <class Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  fn(out);
}

void print_breakdown(const rf::CostBreakdown& c, std::ostream& out) {
  out << "O: " << c.o << '\n'
      << "N: " << c.n_inside << '\n'
      << "O_with_placeholders: " << c.o_box << '\n'
      << "Y_ge(b,d): " << c.y_ge_bd << '\n'
      << "Y_ge(b,c): " << c.y_ge_bc << '\n'
      << "Y_lt(a,d): " << c.y_lt_ad << '\n'
      << "Y_lt(a,c): " << c.y_lt_ac << '\n'
      << "Ybar_ge(d,b): " << c.ybar_ge_db << '\n'
      << "Ybar_ge(d,a): " << c.ybar_ge_da << '\n'
      << "Ybar_lt(c,b): " << c.ybar_lt_cb << '\n'
      << "Ybar_lt(c,a): " << c.ybar_lt_ca << '\n'
      << "D1: " << c.d1 << '\n'
      << "D2: " << c.d2 << '\n'
      << "D3: " << c.d3 << '\n'
      << "D4: " << c.d4 << '\n';
}

rf::QueryRect query_from(const std::vector<double>& v) {
  if (v.size() != 4) throw UsageError("--query takes four numbers a b c d");
  try {
    return rf::QueryRect::checked(v[0], v[1], v[2], v[3]);
  } catch (const rf::DomainError& e) {
    throw UsageError(e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Range-query costs in random quadtrees and 2-d trees, and their limit fields"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rf::kVersion));

  // cost
  auto* cost = app.add_subcommand("cost", "Cost of one range query with its decomposition");
  std::string cost_points;
  std::optional<std::int64_t> cost_n;
  std::uint64_t cost_seed = 0;
  std::string cost_tree = "quadtree";
  std::vector<double> cost_query;
  cost->add_option("--points-file", cost_points, "CSV of points x,y")->check(CLI::ExistingFile);
  cost->add_option("--n", cost_n, "Number of uniform random points");
  cost->add_option("--seed", cost_seed, "Seed of the random points");
  cost->add_option("--tree", cost_tree, "quadtree, kd-h or kd-v");
  cost->add_option("--query", cost_query, "Query a b c d")->expected(4)->required();

  // decomp
  auto* decomp = app.add_subcommand("decomp", "Check the cost decomposition on random trees and queries");
  std::int64_t decomp_n = 1000;
  std::uint64_t decomp_seed = 0;
  int decomp_trials = 100;
  std::string decomp_tree = "quadtree";
  decomp->add_option("--n", decomp_n, "Maximum number of points")->check(CLI::PositiveNumber);
  decomp->add_option("--seed", decomp_seed, "Master seed");
  decomp->add_option("--trials", decomp_trials, "Number of random cases")->check(CLI::PositiveNumber);
  decomp->add_option("--tree", decomp_tree, "quadtree, kd-h or kd-v");

  // g-table
  auto* gtab = app.add_subcommand("g-table", "Solve the mean profile g and write it as CSV");
  std::size_t g_grid = 4097;
  double g_tol = 1e-10;
  int g_max_iter = 200;
  std::string g_out;
  gtab->add_option("--grid", g_grid, "Number of grid nodes")->check(CLI::Range(3, 1 << 20));
  gtab->add_option("--tol", g_tol, "Sup-norm update tolerance")->check(CLI::PositiveNumber);
  gtab->add_option("--max-iter", g_max_iter, "Iteration limit")->check(CLI::PositiveNumber);
  gtab->add_option("--out", g_out, "Output CSV (stdout when omitted)");

  // limit
  auto* limit = app.add_subcommand("limit", "Evaluate depth-K limit fields at points");
  std::uint64_t l_seed = 0;
  int l_depth = 30;
  double l_cutoff = 1e-3;
  std::string l_kind;
  std::string l_points;
  std::string l_out;
  limit->add_option("--seed", l_seed, "Seed of the split family");
  limit->add_option("--depth", l_depth, "Depth K")->check(CLI::Range(0, 60));
  limit->add_option("--cutoff", l_cutoff, "Weight cutoff")->check(CLI::Range(0.0, 1.0));
  limit->add_option("--kind", l_kind, "z, y, ybar, o, kd-eq or kd-perp")
      ->required()
      ->check(CLI::IsMember({"z", "y", "ybar", "o", "kd-eq", "kd-perp"}));
  limit->add_option("--points-file", l_points, "CSV of evaluation points")->required()->check(CLI::ExistingFile);
  limit->add_option("--out", l_out, "Output CSV (stdout when omitted)");

  // experiment
  auto* exper = app.add_subcommand("experiment", "Run Monte Carlo experiments from a JSON config");
  std::string e_config;
  std::string e_out = "results";
  exper->add_option("--config", e_config, "JSON config")->required()->check(CLI::ExistingFile);
  exper->add_option("--out", e_out, "Output directory");

  // constants
  auto* consts = app.add_subcommand("constants", "Print the closed-form constants as JSON");
  std::string c_out;
  consts->add_option("--out", c_out, "Output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*cost) {
      const auto pts = load_points(cost_points, cost_n, cost_seed);
      const auto q = query_from(cost_query);
      const bool ok = with_tree(tree_kind(cost_tree), pts, [&](const auto& tree) {
        const auto c = rf::decompose(tree, q);
        print_breakdown(c, std::cout);
        std::cout << "decomposition_ok: " << (c.balanced() ? "true" : "false") << '\n'
                  << "placeholder_identity_ok: " << (c.box_balanced() ? "true" : "false") << '\n';
        return c.balanced();
      });
      return ok ? kOk : kFailure;
    }
    if (*decomp) {
      const auto kind = tree_kind(decomp_tree);
      int failures = 0;
      for (int i = 0; i < decomp_trials; ++i) {
        const std::uint64_t s = rf::trial_seed(decomp_seed, static_cast<std::uint64_t>(i));
        const auto n = static_cast<std::size_t>(rf::keyed_hash(s, 1) % static_cast<std::uint64_t>(decomp_n + 1));
        const auto pts = rf::uniform_points(n, s);
        double x[4];
        for (int k = 0; k < 4; ++k) x[k] = rf::to_unit(rf::keyed_hash(s, 2 + static_cast<std::uint64_t>(k)));
        const rf::QueryRect q{std::min(x[0], x[1]), std::max(x[0], x[1]), std::min(x[2], x[3]), std::max(x[2], x[3])};
        const bool ok = with_tree(kind, pts, [&](const auto& tree) { return rf::verify_decomposition(tree, q); });
        if (!ok) {
          ++failures;
          std::cout << "failure: trial " << i << " n=" << n << '\n';
        }
      }
      std::cout << "cases: " << decomp_trials << "\nfailures: " << failures << '\n';
      return failures == 0 ? kOk : kFailure;
    }
    if (*gtab) {
      const auto g = rf::solve_g(g_grid, g_tol, g_max_iter);
      emit(g_out, [&](std::ostream& out) { rf::write_gtable_csv(out, g); });
      std::cerr << "iterations: " << g.iterations() << "\nresidual: " << rf::format_real(g.residual()) << '\n';
      return kOk;
    }
    if (*limit) {
      const std::size_t cols = l_kind == "z" ? 1 : (l_kind == "y" || l_kind == "ybar") ? 2 : 4;
      std::ifstream in(l_points);
      const auto rows = rf::read_real_rows(in, cols);
      const rf::LimitOptions opt{l_depth, l_cutoff};
      std::vector<rf::FieldSample> samples;
      if (l_kind == "kd-eq" || l_kind == "kd-perp") {
        const auto g = rf::solve_g(rf::kPredictionGrid, 1e-11);
        const rf::KdLimitField f(rf::SplitFamily(l_seed, 2), opt, g);
        const auto axis = l_kind == "kd-eq" ? rf::SplitAxis::horizontal : rf::SplitAxis::vertical;
        for (const auto& r : rows) {
          samples.push_back({l_kind, l_seed, l_depth, r, f.eval(query_from(r), axis)});
        }
      } else {
        const rf::QuadLimitField f(rf::SplitFamily(l_seed, 4), opt);
        for (const auto& r : rows) {
          for (double x : r) {
            if (!(x >= 0.0 && x <= 1.0)) throw UsageError("evaluation points must lie in [0, 1]");
          }
          double v = 0.0;
          if (l_kind == "z") v = f.z(r[0]);
          if (l_kind == "y") v = f.y(r[0], r[1]);
          if (l_kind == "ybar") v = f.ybar(r[0], r[1]);
          if (l_kind == "o") v = f.o(query_from(r));
          samples.push_back({l_kind, l_seed, l_depth, r, v});
        }
      }
      emit(l_out, [&](std::ostream& out) { rf::write_field_samples_csv(out, samples); });
      return kOk;
    }
    if (*exper) {
      const auto configs = rf::load_configs(e_config);
      const auto g = rf::prediction_table();
      std::vector<rf::ExperimentResult> results;
      for (const auto& c : configs) {
        results.push_back(rf::run_experiment(c, g));
        for (const auto& ch : results.back().checks) {
          std::cout << (ch.passed ? "PASS " : "FAIL ") << rf::to_string(c.experiment) << ": " << ch.name;
          if (!ch.detail.empty()) std::cout << " (" << ch.detail << ')';
          std::cout << '\n';
        }
      }
      rf::write_results(e_out, results);
      bool all = true;
      for (const auto& r : results) all = all && r.all_passed();
      return all ? kOk : kFailure;
    }
    if (*consts) {
      emit(c_out, [&](std::ostream& out) { out << rf::constants_text(); });
      return kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const rf::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const rf::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const rf::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const rf::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
