#include <set>

#include "doctest.h"
#include "dtap/lp.hpp"
#include "dtap/oracle.hpp"
#include "dtap/reductions.hpp"
#include "support.hpp"

using namespace dtap;

TEST_CASE("build_matrix: 1x1 and the 5-cycle") {
  RootedInstance tiny = parse_instance("root r\narc a r\nlink r a 1\n");
  CoverageMatrix m = build_matrix(tiny);
  CHECK(m.rows == 1);
  CHECK(m.cols == 1);
  CHECK(m.entry(0, 0));

  RootedInstance gap = integrality_gap_instance();
  CoverageMatrix g = build_matrix(gap);
  CHECK(g.rows == 5);
  CHECK(g.cols == 5);
  for (int l = 0; l < 5; ++l) CHECK(g.col_arcs[l].size() == 2);
  for (int a = 0; a < 5; ++a) CHECK(g.row_links[a].size() == 2);
  // 5-cycle: the bipartite incidence graph between arcs and links is one
  // cycle of length 10
  std::set<std::pair<int, int>> edges;
  for (int l = 0; l < 5; ++l)
    for (int a : g.col_arcs[l]) edges.insert({a, l});
  CHECK(edges.size() == 10);
  int walk_arc = 0;
  int walk_link = g.row_links[0][0];
  std::set<int> seen_arcs;
  for (int step = 0; step < 5; ++step) {
    seen_arcs.insert(walk_arc);
    walk_link = g.row_links[walk_arc][0] == walk_link ? g.row_links[walk_arc][1] : g.row_links[walk_arc][0];
    walk_arc = g.col_arcs[walk_link][0] == walk_arc ? g.col_arcs[walk_link][1] : g.col_arcs[walk_link][0];
  }
  CHECK(seen_arcs.size() == 5);  // one cycle through all arcs
}

TEST_CASE("build_matrix agrees with path_view recomputation") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GeneratorConfig cfg;
    cfg.n = 7;
    cfg.m = 12;
    cfg.seed = seed;
    RootedInstance inst = random_instance(cfg);
    CoverageMatrix m = build_matrix(inst);
    for (int l = 0; l < inst.link_count(); ++l) {
      PathView pv = path_view(inst, inst.links[l]);
      for (int a = 0; a < inst.arc_count(); ++a) {
        bool expect = std::find(pv.fwd_arcs.begin(), pv.fwd_arcs.end(), a) != pv.fwd_arcs.end();
        CHECK(m.entry(a, l) == expect);
      }
    }
  }
}

TEST_CASE("solve_lp: gap instance optimum is 5/2 at x = 1/2") {
  RootedInstance gap = integrality_gap_instance();
  LpOutcome lp = solve_lp(gap);
  REQUIRE(lp.status == LpStatus::Optimal);
  CHECK(lp.objective == Rat(5, 2));
  for (int l = 0; l < gap.link_count(); ++l) CHECK(lp.solution.value(l) == Rat(1, 2));
}

TEST_CASE("solve_lp: uncovered arc is infeasible") {
  std::vector<std::string> w;
  RootedInstance bad = parse_instance("root r\narc a r\narc b r\nlink r a 1\n", &w);
  CHECK(solve_lp(bad).status == LpStatus::Infeasible);
}

TEST_CASE("solve_lp: rows satisfied exactly, support bounded, weak duality") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    GeneratorConfig cfg;
    cfg.n = 4 + static_cast<int>(seed % 6);
    cfg.m = cfg.n + 5;
    cfg.seed = seed;
    RootedInstance inst = random_instance(cfg);
    LpOutcome lp = solve_lp(inst);
    REQUIRE(lp.status == LpStatus::Optimal);
    CoverageMatrix m = build_matrix(inst);
    for (int a = 0; a < m.rows; ++a) {
      Rat row = 0;
      for (int l : m.row_links[a]) row += lp.solution.value(l);
      CHECK(row >= 1);
    }
    CHECK(static_cast<int>(lp.solution.support().size()) <= m.rows);
    test::ExhaustiveResult opt = test::exhaustive_opt(inst);
    REQUIRE(opt.feasible);
    CHECK(lp.objective <= opt.cost);
    CHECK(lp.objective == lp.solution.cost(inst));
  }
}

TEST_CASE("solve_lp honors extra constraints and cost caps") {
  RootedInstance gap = integrality_gap_instance();
  // force x_0 >= 1
  ExtraConstraint ec;
  ec.coeffs.push_back({0, Rat(1)});
  ec.rhs = 1;
  LpOutcome lp = solve_lp(gap, {ec});
  REQUIRE(lp.status == LpStatus::Optimal);
  CHECK(lp.solution.value(0) >= 1);
  CHECK(lp.objective >= Rat(5, 2));

  LpOutcome capped = solve_lp(gap, {}, Rat(5, 2));
  REQUIRE(capped.status == LpStatus::Optimal);
  CHECK(capped.objective == Rat(5, 2));
  LpOutcome too_tight = solve_lp(gap, {}, Rat(2));
  CHECK(too_tight.status == LpStatus::Infeasible);
}

TEST_CASE("assert_integral: integral set, fractional witness") {
  FractionalSolution x;
  x.set(0, Rat(1));
  x.set(3, Rat(1));
  IntegralityResult r = assert_integral(x);
  CHECK(r.integral);
  CHECK(r.links == std::vector<int>{0, 3});

  RootedInstance gap = integrality_gap_instance();
  LpOutcome lp = solve_lp(gap);
  IntegralityResult frac = assert_integral(lp.solution);
  CHECK(!frac.integral);
  CHECK(frac.fractional_value == Rat(1, 2));
}

TEST_CASE("willow instances from the generator solve integrally") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    GeneratorConfig cfg;
    cfg.n = 5 + static_cast<int>(seed % 6);
    cfg.m = cfg.n + 4;
    cfg.seed = seed * 17;
    RootedInstance inst = random_willow_instance(cfg);
    LpOutcome lp = solve_lp(inst);
    REQUIRE(lp.status == LpStatus::Optimal);
    CHECK(assert_integral(lp.solution).integral);
  }
}
