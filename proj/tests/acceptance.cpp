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

// Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero
// when any criterion fails. Criteria 5-7, 9-12 take their Monte Carlo
// evidence from the experiments in configs/acceptance.json (or the config
// given as the first argument).

#include <chrono>
#include <cstdio>
#include <exception>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rangefield/rangefield.hpp"

namespace rf = rangefield;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome c1_decomposition() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::int64_t bad = 0, bad_box = 0, kd_bad = 0;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const std::size_t n = 1 + rng() % 1000;
    const auto pts = rf::uniform_points(n, rf::keyed_hash(1, i));
    const rf::Quadtree tree(pts);
    const rf::QueryRect q = rf::testing::random_query(rng);
    const auto b = rf::decompose(tree, q);
    if (!b.balanced()) ++bad;
    if (!tree.has_ties() && !b.box_balanced()) ++bad_box;
  }
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + rng() % 1000;
    const auto pts = rf::uniform_points(n, rf::keyed_hash(2, i));
    const rf::KdTree tree(pts, i % 2 ? rf::SplitAxis::vertical : rf::SplitAxis::horizontal);
    if (!rf::verify_decomposition(tree, rf::testing::random_query(rng))) ++kd_bad;
  }
  const double secs = seconds_since(t0);
  o.require(bad == 0, std::to_string(bad) + " quadtree cases unbalanced");
  o.require(bad_box == 0, std::to_string(bad_box) + " placeholder identity failures");
  o.require(kd_bad == 0, std::to_string(kd_bad) + " 2-d tree cases unbalanced");
  o.require(secs < 120, "runtime " + num(secs) + " s");
  o.note("10000 quadtree + 1000 2-d tree cases exact, " + num(secs) + " s");
  return o;
}

Outcome c2_oracle() {
  Outcome o;
  std::mt19937_64 rng(77);
  std::int64_t bad = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + rng() % 200;
    const auto pts = i % 4 == 0 ? rf::testing::grid_points(n, 8, i) : rf::uniform_points(n, rf::keyed_hash(3, i));
    const rf::QueryRect q = rf::testing::random_query(rng, 8);
    const int kind = static_cast<int>(i % 3);
    std::int64_t brute = 0, fast = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const auto cell = kind == 0   ? rf::testing::quad_cell_oracle(pts, j)
                        : kind == 1 ? rf::testing::kd_cell_oracle(pts, j, rf::SplitAxis::horizontal)
                                    : rf::testing::kd_cell_oracle(pts, j, rf::SplitAxis::vertical);
      if (rf::intersects(cell, q)) ++brute;
    }
    if (kind == 0) fast = rf::range_cost(rf::Quadtree(pts), q);
    if (kind == 1) fast = rf::range_cost(rf::KdTree(pts, rf::SplitAxis::horizontal), q);
    if (kind == 2) fast = rf::range_cost(rf::KdTree(pts, rf::SplitAxis::vertical), q);
    if (fast != brute) ++bad;
  }
  o.require(bad == 0, std::to_string(bad) + " mismatches");
  o.note("1000 cases, descent equals brute force");
  return o;
}

Outcome c3_solver() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const rf::GTable g = rf::solve_g(4097, 1e-10);
  const double secs = seconds_since(t0);
  double sym = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double s = i / 10000.0;
    sym = std::max(sym, std::abs(g(s) + g(1.0 - s) - 1.0));
  }
  bool monotone = true;
  for (std::size_t i = 1; i < g.values().size(); ++i) monotone = monotone && g.values()[i - 1] <= g.values()[i];
  const auto& u = g.update_norms();
  double worst_ratio = 0.0;
  constexpr std::size_t kBurnIn = 3;
  for (std::size_t i = kBurnIn + 1; i < u.size(); ++i) worst_ratio = std::max(worst_ratio, u[i] / u[i - 1]);
  o.require(g.iterations() <= 80, "iterations " + std::to_string(g.iterations()));
  o.require(std::abs(g(0.0)) <= 1e-9 && std::abs(g(1.0) - 1.0) <= 1e-9 && std::abs(g(0.5) - 0.5) <= 1e-9, "endpoint values");
  o.require(sym <= 1e-8, "symmetry " + num(sym));
  o.require(monotone, "monotone");
  o.require(worst_ratio <= 0.70, "contraction ratio " + num(worst_ratio));
  o.require(secs < 30, "runtime " + num(secs) + " s");
  o.note(std::to_string(g.iterations()) + " iterations, symmetry " + num(sym) + ", worst ratio " + num(worst_ratio) +
         ", " + num(secs) + " s");
  return o;
}

Outcome c4_constants() {
  Outcome o;
  const auto& k = rf::constants();
  const double root = std::abs(k.beta * k.beta + 3 * k.beta - 2);
  const double gq = std::abs(rf::contraction_quadrature() - k.gamma_contr);
  const double fac = std::abs(2 * k.kd_eq_factor - (k.beta + 1) * k.kd_perp_factor);
  const rf::QuadRule r = rf::graded_rule(0.0, 1.0, 16);
  double integral = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) integral += r.w[i] * rf::h(r.x[i]);
  const double kap = std::abs(k.k1 * integral - k.kappa_integral);
  o.require(root <= 1e-14, "beta root " + num(root));
  o.require(k.gamma_contr < 1.0 && gq <= 1e-8, "gamma quadrature " + num(gq));
  o.require(fac <= 1e-12, "factor identity " + num(fac));
  o.require(kap <= 1e-10, "kappa integral " + num(kap));
  o.note("beta root " + num(root) + ", gamma " + num(gq) + ", factor " + num(fac) + ", kappa " + num(kap));
  return o;
}

Outcome c8_limit_construction() {
  Outcome o;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const rf::QuadLimitField f(rf::SplitFamily(rng()), rf::LimitOptions{30, 1e-3});
    const double t = unif(rng);
    if (f.y(t, 1.0) != f.z(t)) ++mismatches;
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " probes with Y(t,1) != Z(t)");
  const double target = rf::constants().k1 * rf::h(0.5);
  for (int depth : {0, 10, 30}) {
    rf::RunningStats s;
    for (std::uint64_t i = 0; i < 10000; ++i) {
      s.add(rf::QuadLimitField(rf::SplitFamily(rf::keyed_hash(0x5A, i)), rf::LimitOptions{depth, 1e-3}).z(0.5));
    }
    const double dev = std::abs(s.mean() - target);
    o.require(dev <= 3 * s.std_error(), "Z mean at K=" + std::to_string(depth) + " off by " + num(dev));
    o.note("K=" + std::to_string(depth) + " mean " + num(s.mean()) + " (se " + num(s.std_error()) + ")");
  }
  // Increments between consecutive depths, without cutoff, on an 8x8 grid.
  std::vector<double> inc;
  for (int depth = 1; depth <= 7; ++depth) {
    double total = 0.0;
    constexpr int kSeeds = 200;
    for (int i = 0; i < kSeeds; ++i) {
      const rf::SplitFamily fam(rf::keyed_hash(0x5B, static_cast<std::uint64_t>(i)));
      const rf::QuadLimitField a(fam, rf::LimitOptions{depth, 0.0});
      const rf::QuadLimitField b(fam, rf::LimitOptions{depth + 1, 0.0});
      double sup = 0.0;
      for (int ti = 1; ti < 8; ++ti) {
        for (int si = 1; si <= 8; ++si) sup = std::max(sup, std::abs(b.y(ti / 8.0, si / 8.0) - a.y(ti / 8.0, si / 8.0)));
      }
      total += sup * sup;
    }
    inc.push_back(total / kSeeds);
  }
  double ratio = 0.0;
  for (std::size_t i = 1; i < inc.size(); ++i) ratio += inc[i] / inc[i - 1];
  ratio /= static_cast<double>(inc.size() - 1);
  o.require(ratio < 1.0, "average increment ratio " + num(ratio));
  o.note("increment ratio " + num(ratio));
  return o;
}

Outcome c11_swap() {
  Outcome o;
  std::mt19937_64 rng(11);
  int bad = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + rng() % 1000;
    const auto pts = rf::uniform_points(n, rf::keyed_hash(4, i));
    std::vector<rf::UnitPoint> sw(n);
    for (std::size_t j = 0; j < n; ++j) sw[j] = {pts[j].y, pts[j].x};
    const rf::KdTree eq(pts, rf::SplitAxis::horizontal);
    const rf::KdTree perp(sw, rf::SplitAxis::vertical);
    const rf::QueryRect q = rf::testing::random_query(rng);
    if (rf::range_cost(eq, q) != rf::range_cost(perp, q.swapped())) ++bad;
  }
  o.require(bad == 0, std::to_string(bad) + " swap mismatches");
  o.note("swap identity exact on 1000 cases");
  return o;
}

void absorb(Outcome& o, const rf::ExperimentResult& r) {
  for (const auto& c : r.checks) {
    if (!c.passed) o.require(false, std::string(rf::to_string(r.config.experiment)) + ": " + c.name + " (" + c.detail + ")");
  }
  o.note(std::string(rf::to_string(r.config.experiment)) + " " + std::to_string(r.checks.size()) + " checks, " +
         num(r.wall_seconds) + " s");
}

}  // namespace

int main(int argc, char** argv) {
  const std::string config = argc > 1 ? argv[1] : RANGEFIELD_SOURCE_DIR "/configs/acceptance.json";
  const std::map<rf::ExperimentKind, std::vector<int>> criterion{
      {rf::ExperimentKind::pm_fixed, {5}},         {rf::ExperimentKind::pm_uniform, {5}},
      {rf::ExperimentKind::one_sided, {6}},        {rf::ExperimentKind::constrained, {7}},
      {rf::ExperimentKind::range_field, {9}},      {rf::ExperimentKind::limit_vs_discrete, {9}},
      {rf::ExperimentKind::fixpoint_residual, {10}}, {rf::ExperimentKind::kd_means, {11}},
      {rf::ExperimentKind::worst_case, {12}}};
  const std::map<int, std::string> titles{
      {1, "exact decomposition"},        {2, "descent equals brute force"},
      {3, "profile solver"},             {4, "constants"},
      {5, "partial match mean"},         {6, "one-sided halves"},
      {7, "constrained mean"},           {8, "limit-field construction"},
      {9, "two-pipeline range field"},   {10, "fixed-point residual"},
      {11, "2-d trees"},                 {12, "worst case"}};
  std::map<int, Outcome> outcomes;
  auto guarded = [&](int k, Outcome (*fn)()) {
    try {
      outcomes[k] = fn();
    } catch (const std::exception& e) {
      outcomes[k] = {false, std::string("error: ") + e.what()};
    }
  };
  guarded(1, c1_decomposition);
  guarded(2, c2_oracle);
  guarded(3, c3_solver);
  guarded(4, c4_constants);
  guarded(8, c8_limit_construction);
  guarded(11, c11_swap);
  try {
    const auto configs = rf::load_configs(config);
    const rf::GTable g = rf::prediction_table();
    std::map<int, bool> seen;
    for (const auto& cfg : configs) {
      const auto it = criterion.find(cfg.experiment);
      if (it == criterion.end()) continue;
      try {
        const auto r = rf::run_experiment(cfg, g);
        for (int k : it->second) absorb(outcomes[k], r);
      } catch (const std::exception& e) {
        for (int k : it->second) outcomes[k].require(false, std::string("error: ") + e.what());
      }
      for (int k : it->second) seen[k] = true;
    }
    for (int k : {5, 6, 7, 9, 10, 11, 12}) {
      if (!seen[k]) outcomes[k].require(false, "no experiment in " + config);
    }
  } catch (const std::exception& e) {
    for (int k : {5, 6, 7, 9, 10, 11, 12}) outcomes[k].require(false, std::string("error: ") + e.what());
  }
  int failed = 0;
  for (int k = 1; k <= 12; ++k) {
    const Outcome& o = outcomes[k];
    if (!o.pass) ++failed;
    std::printf("C%d %s %s: %s\n", k, o.pass ? "PASS" : "FAIL", titles.at(k).c_str(), o.detail.c_str());
  }
  std::printf("%d of 12 criteria passed\n", 12 - failed);
  return failed == 0 ? 0 : 1;
}
