#include <random>

#include "doctest.h"
#include "dtap/oracle.hpp"
#include "dtap/reductions.hpp"
#include "dtap/willow.hpp"
#include "support.hpp"

using namespace dtap;

namespace {

// The willow of Fig. 4/5: W = {r, u, v}, u down-independent, v up-independent.
RootedInstance fig4_willow() {
  return parse_instance(
      "root r\n"
      "arc v1p r\n"
      "arc v1 v1p\n"
      "arc r v2\n"
      "arc v1 u\n"
      "arc v4 v2\n"
      "arc v2 v\n"
      "arc v6 u\n"
      "arc v7 u\n"
      "arc v v10\n"
      "arc v v11\n"
      "arc v12 v7\n"
      "arc u v13\n"
      "arc v14 v\n"
      "arc v14 v15\n"
      "arc v14 v16\n"
      "link v1 v12 1\n"
      "link v11 r 1\n"
      "link u v4 1\n"
      "link v13 v7 1\n"
      "link v15 v6 1\n"
      "link v10 v14 1\n"
      "link v16 v13 1\n"
      "link v13 v6 1\n");
}

std::vector<int> all_links(const RootedInstance& inst) {
  std::vector<int> ids(inst.link_count());
  for (int i = 0; i < inst.link_count(); ++i) ids[i] = i;
  return ids;
}

// Quantifier-expansion oracle for Def 5.1.
bool up_independent_oracle(const RootedInstance& inst, int v) {
  SubtreeView sub = subtree_view(inst, v);
  for (int l = 0; l < inst.link_count(); ++l) {
    const PathView& pv = inst.link_path(l);
    bool meets = false, contained = true;
    for (int a : pv.fwd_arcs) {
      bool in_sub = std::binary_search(sub.arcs.begin(), sub.arcs.end(), a);
      if (in_sub && inst.arc_is_up(a)) meets = true;
      if (!in_sub) contained = false;
    }
    if (meets && !contained) return false;
  }
  return true;
}

bool down_independent_oracle(const RootedInstance& inst, int v) {
  SubtreeView sub = subtree_view(inst, v);
  for (int l = 0; l < inst.link_count(); ++l) {
    const PathView& pv = inst.link_path(l);
    bool meets = false, contained = true;
    for (int a : pv.fwd_arcs) {
      bool in_sub = std::binary_search(sub.arcs.begin(), sub.arcs.end(), a);
      if (in_sub && !inst.arc_is_up(a)) meets = true;
      if (!in_sub) contained = false;
    }
    if (meets && !contained) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("independence: the root is always independent both ways") {
  RootedInstance gap = integrality_gap_instance();
  CHECK(is_up_independent(gap, gap.root, all_links(gap)));
  CHECK(is_down_independent(gap, gap.root, all_links(gap)));
}

TEST_CASE("independence on the Fig. 4 willow") {
  RootedInstance w = fig4_willow();
  int u = w.vertex_id("u"), v = w.vertex_id("v");
  REQUIRE(u >= 0);
  REQUIRE(v >= 0);
  CHECK(is_down_independent(w, u, all_links(w)));
  CHECK(!is_up_independent(w, u, all_links(w)));
  CHECK(is_up_independent(w, v, all_links(w)));
  CHECK(!is_down_independent(w, v, all_links(w)));
}

TEST_CASE("independence agrees with the quantifier-expansion oracle") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GeneratorConfig cfg;
    cfg.n = 7;
    cfg.m = 12;
    cfg.seed = seed;
    RootedInstance inst = random_instance(cfg);
    for (int v = 0; v < inst.n(); ++v) {
      CHECK(is_up_independent(inst, v, all_links(inst)) == up_independent_oracle(inst, v));
      CHECK(is_down_independent(inst, v, all_links(inst)) == down_independent_oracle(inst, v));
    }
  }
}

TEST_CASE("recognize_willow: up/down-only instances have W = {r}") {
  RootedInstance inst = parse_instance(
      "root r\narc a r\narc b a\narc r c\nlink r b 1\nlink a b 1\nlink r c 1\n");
  RecognitionResult rec = recognize_willow(inst);
  REQUIRE(rec.willow);
  CHECK(rec.cert.w == std::vector<int>{inst.root});
}

TEST_CASE("recognize_willow: Fig. 4 gives W = {r, u, v}") {
  RootedInstance w = fig4_willow();
  RecognitionResult rec = recognize_willow(w);
  REQUIRE(rec.willow);
  std::vector<int> expect{w.root, w.vertex_id("u"), w.vertex_id("v")};
  std::sort(expect.begin(), expect.end());
  CHECK(rec.cert.w == expect);
}

TEST_CASE("recognize_willow rejects the gap instance") {
  RecognitionResult rec = recognize_willow(integrality_gap_instance());
  CHECK(!rec.willow);
  CHECK(rec.violator >= 0);
}

TEST_CASE("recognition is monotone under link removal") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    GeneratorConfig cfg;
    cfg.n = 7;
    cfg.m = 12;
    cfg.seed = seed * 31;
    RootedInstance inst = random_willow_instance(cfg);
    REQUIRE(recognize_willow(inst).willow);
    std::mt19937_64 rng(seed);
    std::vector<int> subset;
    for (int l = 0; l < inst.link_count(); ++l)
      if (rng() % 2) subset.push_back(l);
    CHECK(recognize_willow(inst, subset).willow);
  }
}

TEST_CASE("gh_signing: empty B is trivially valid") {
  RootedInstance w = fig4_willow();
  RecognitionResult rec = recognize_willow(w);
  GHSigning gh = gh_signing(w, rec.cert, {});
  CHECK(gh.sigma.empty());
}

TEST_CASE("gh_signing reproduces the Fig. 5 sign pattern on B = A") {
  RootedInstance w = fig4_willow();
  RecognitionResult rec = recognize_willow(w);
  REQUIRE(rec.willow);
  std::vector<int> all_arcs(w.arc_count());
  for (int a = 0; a < w.arc_count(); ++a) all_arcs[a] = a;
  GHSigning gh = gh_signing(w, rec.cert, all_arcs);
  auto sign_of = [&](const std::string& t, const std::string& h) {
    for (int a = 0; a < w.arc_count(); ++a)
      if (w.name(w.arcs[a].tail) == t && w.name(w.arcs[a].head) == h) return gh.sigma.at(a);
    REQUIRE(false);
    return 0;
  };
  CHECK(sign_of("v1p", "r") == 1);
  CHECK(sign_of("v1", "v1p") == -1);
  CHECK(sign_of("r", "v2") == -1);
  CHECK(sign_of("v1", "u") == -1);
  CHECK(sign_of("v4", "v2") == 1);
  CHECK(sign_of("v2", "v") == 1);
  CHECK(sign_of("v6", "u") == 1);
  CHECK(sign_of("v7", "u") == 1);
  CHECK(sign_of("v", "v10") == -1);
  CHECK(sign_of("v", "v11") == -1);
  CHECK(sign_of("v12", "v7") == -1);
  CHECK(sign_of("u", "v13") == -1);
  CHECK(sign_of("v14", "v") == 1);
  CHECK(sign_of("v14", "v15") == -1);
  CHECK(sign_of("v14", "v16") == -1);
}

TEST_CASE("gh_signing satisfies the row condition on random willows and subsets") {
  std::mt19937_64 rng(7);
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    GeneratorConfig cfg;
    cfg.n = 8;
    cfg.m = 13;
    cfg.seed = seed * 101;
    RootedInstance inst = random_willow_instance(cfg);
    RecognitionResult rec = recognize_willow(inst);
    REQUIRE(rec.willow);
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<int> b;
      for (int a = 0; a < inst.arc_count(); ++a)
        if (rng() % 2) b.push_back(a);
      GHSigning gh = gh_signing(inst, rec.cert, b);  // throws on violation
      std::vector<bool> in_b(inst.arc_count(), false);
      for (int a : b) in_b[a] = true;
      for (int l = 0; l < inst.link_count(); ++l) {
        int sum = 0;
        for (int a : inst.link_path(l).fwd_arcs)
          if (in_b[a]) sum += gh.sigma.at(a);
        CHECK(sum >= -1);
        CHECK(sum <= 1);
      }
    }
  }
}

TEST_CASE("solve_willow: single arc and brute-force agreement") {
  RootedInstance tiny = parse_instance("root r\narc a r\nlink r a 2\n");
  WillowSolveResult r = solve_willow(tiny);
  REQUIRE(r.status == WillowSolveStatus::Solved);
  CHECK(r.cost == 2);
  CHECK(r.links == std::vector<int>{0});

  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    GeneratorConfig cfg;
    cfg.n = 5 + static_cast<int>(seed % 8);
    cfg.m = cfg.n + 4;
    cfg.seed = seed * 13;
    RootedInstance inst = random_willow_instance(cfg);
    WillowSolveResult w = solve_willow(inst);
    REQUIRE(w.status == WillowSolveStatus::Solved);
    test::ExhaustiveResult opt = test::exhaustive_opt(inst);
    REQUIRE(opt.feasible);
    CHECK(w.cost == opt.cost);
  }
}

TEST_CASE("verify_tu_bruteforce: base cases and the 5-cycle negative control") {
  RootedInstance tiny = parse_instance("root r\narc a r\nlink r a 1\n");
  CHECK(verify_tu_bruteforce(build_matrix(tiny)));
  CHECK(!verify_tu_bruteforce(build_matrix(integrality_gap_instance())));

  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    GeneratorConfig cfg;
    cfg.n = 5;
    cfg.m = 6;
    cfg.seed = seed * 7;
    RootedInstance inst = random_willow_instance(cfg);
    RootedInstance trimmed = inst;
    if (trimmed.link_count() > 6) trimmed.links.resize(6);
    trimmed.finalize();
    CHECK(verify_tu_bruteforce(build_matrix(trimmed)));
  }

  RootedInstance big = parse_instance(
      "root r\narc a r\narc b a\narc c b\narc d c\narc e d\narc f e\narc g f\narc h g\n"
      "link r h 1\n");
  CHECK_THROWS_AS(verify_tu_bruteforce(build_matrix(big)), InstanceError);
}
