#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dtap/instance.hpp"
#include "dtap/lp.hpp"
#include "dtap/splitting.hpp"

namespace dtap {

// Constant chain: eps_bar = min{1, eps_user/10}, eps = min{1, eps_bar}/7,
// gamma = eps/(2 Delta), zeta1 = 2/eps, zeta2 = 6 zeta1 Delta/(eps (1-eps)),
// k = ceil((1 + 1/gamma) zeta2).
struct ApproxConstants {
  Rat eps_user, eps_bar, eps, gamma, zeta1, zeta2, k_exact, delta;
  long long k = 0;

  static ApproxConstants derive(const Rat& eps_user, const Rat& delta);
  static ApproxConstants from_internal_eps(const Rat& eps, const Rat& delta);
  bool inequalities_hold() const;
};

// Counts every paper-property check; a failure throws, so `failures` stays
// empty on any run that returns.
struct AssertionLog {
  long long checked = 0;
  std::vector<std::string> failures;
  void require(bool ok, const char* what) {
    ++checked;
    if (!ok) {
      failures.emplace_back(what);
      throw InstanceError(0, std::string("paper property violated: ") + what);
    }
  }
};

struct HeavyFlags {
  std::vector<bool> covered;   // per arc: alpha-covered
  std::vector<bool> heavy;     // per arc: alpha-heavy
  std::vector<bool> involved;  // per link: alpha-heavily involved
};

HeavyFlags classify_heavy(const RootedInstance& inst, const FractionalSolution& x, const Rat& alpha);

struct Phase1Result {
  Splitting sigma_star;
  FractionalSolution x_star;
  std::vector<int> w_up, w_down, w_star;  // sorted; w_star includes the root
  // per processed vertex: supp(x*) snapshot at the start of its iteration
  std::vector<std::vector<int>> supp_snapshot;  // indexed by vertex id
};

struct CoreStructure {
  struct Core {
    bool up = false;               // direction class of the component
    int root = -1;                 // r_C
    std::vector<int> base_arcs;    // b_1..b_t in depth-then-id order
    std::vector<int> arcs;         // A(core), sorted
    std::vector<int> vertices;     // V(core), sorted
    struct Trunk {
      std::vector<int> arcs;       // bottom to top
      int top_vertex = -1;         // v_i
      int top_arc = -1;            // a_i
      int sibling_arc = -1;        // s_i, -1 when top_vertex == r_C
    };
    std::vector<Trunk> trunks;
  };
  std::vector<Core> cores;
  std::vector<int> core_of_arc;        // arc -> core index or -1
  std::vector<int> up_core_of_vertex;  // vertex -> core index or -1
  std::vector<int> down_core_of_vertex;
  std::vector<int> x_vertices;         // union of core vertex sets, sorted
};

struct LinkPartition {
  // over supp(x**), pairwise disjoint
  std::vector<int> cross, fwd, bwd, rest;  // L_cross, ->L, <-L, L_rest
  std::vector<int> core_of_fwd_link;       // parallel to fwd: the unique core
};

// A valid inequality sum_l coeff_l x_l >= rhs for the integer hull, derived
// from a splitting and a contracted arc set whose contracted support universe
// has bounded visible width.
struct ModificationInequality {
  std::vector<Rat> coeffs;            // over the instance's links
  Rat rhs;
  int k_wide = 0;                     // certified width bound
  std::vector<std::pair<int, int>> contracted_arcs;          // (tail, head) vertex ids
  std::vector<std::pair<Link, std::vector<Link>>> sigma_dump; // support-restricted splitting
};

struct OracleResult {
  enum class Kind { Solution, Cut } kind = Kind::Solution;
  std::vector<int> links;  // solution in the caller instance's link ids
  Rat cost;
  ModificationInequality cut;
};

// The partial separation oracle: either a solution of cost at most
// (1.75 + eps_bar) c(x), or a violated modification inequality.
// `k_request` overrides the width target fed to the DP (engineering mode);
// pass 0 to use the derived constants.
OracleResult partial_separation_oracle(const RootedInstance& inst, const FractionalSolution& x,
                                       const Rat& eps_bar, long long k_request, AssertionLog& log);

// --- phase internals, exposed for tests ---------------------------------------

struct Zeta1Cover {
  std::vector<int> zeta1_arcs;   // the contracted arc set A'
  Contraction contraction;       // inst / A'
  std::vector<int> cover_links;  // F'' in the input instance's link ids
  Rat cover_cost;
};

// Contracts the zeta1-covered arcs and builds the cheap cover F'' for them
// (cost <= eps * c(x)) via an apex-split willow solve.
Zeta1Cover contract_and_cover_zeta1(const RootedInstance& inst, const FractionalSolution& x,
                                    const ApproxConstants& consts, AssertionLog& log);

Phase1Result phase1_light_splitting(const Workspace& ws, const FractionalSolution& x,
                                    const ApproxConstants& consts, AssertionLog& log);

CoreStructure build_core_structure(const Workspace& ws, const FractionalSolution& x_star,
                                   const ApproxConstants& consts, AssertionLog& log);

struct Phase2Result {
  Splitting sigma_2star;
  FractionalSolution x_2star;
};

Phase2Result phase2_core_splitting(const Workspace& ws, const FractionalSolution& x_star,
                                   const CoreStructure& cores, const ApproxConstants& consts,
                                   const FractionalSolution& x_base, AssertionLog& log);

LinkPartition partition_links(const Workspace& ws, const FractionalSolution& x_2star,
                              const std::vector<int>& w_star, const CoreStructure& cores,
                              AssertionLog& log);

// --- drivers -------------------------------------------------------------------

struct ApproxOutcome {
  bool feasible = false;
  bool fallback_2approx = false;  // iteration budget exhausted
  std::vector<int> links;
  Rat cost;
  Rat lp_lower_bound;
  int cuts_emitted = 0;
  std::string mode;
  long long assertions_checked = 0;
  std::vector<ModificationInequality> cuts;  // every cut emitted along the way
};

// mode: "engineering" (LP-with-cuts at the optimum, user width k) or
// "theoretical" (binary search with cost caps, formula constants).
ApproxOutcome approx_175(const RootedInstance& inst, const Rat& eps_user, const std::string& mode,
                         long long k_override = 3, int max_cuts = 50);

struct Approx2Result {
  bool feasible = false;
  std::vector<int> links;
  Rat cost;
};

// Contract up-arcs / down-arcs, solve each arborescence side exactly, union.
Approx2Result approx_2(const RootedInstance& inst);

}  // namespace dtap
