#pragma once

#include <optional>
#include <vector>

#include "dtap/instance.hpp"
#include "dtap/rational.hpp"

namespace dtap {

struct VisibilityReport {
  std::vector<std::vector<int>> visible;  // per vertex: sorted visible arc ids
  std::vector<int> up_width;              // viwidth_up(v)
  std::vector<int> down_width;
  std::vector<int> width;                 // max of the two
  int instance_width = 0;
};

// Arcs of A_v that some link in `link_set` covers while v is strictly
// interior to the link's generic-shadow path.
std::vector<int> visible_arcs(const RootedInstance& inst, int v, const std::vector<int>& link_set);

VisibilityReport viwidth(const RootedInstance& inst, const std::vector<int>& link_set);
VisibilityReport viwidth(const RootedInstance& inst);  // all links

// Directional width at v relative to a_v's orientation (fwd = same class).
int viwidth_fwd(const RootedInstance& inst, const VisibilityReport& rep, int v);
int viwidth_bwd(const RootedInstance& inst, const VisibilityReport& rep, int v);

// Every vertex is interior to at most k paths P_l, l in F.
bool is_k_thin(const RootedInstance& inst, const std::vector<int>& link_ids, int k);

// True iff every in-order subpair with nonempty forward coverage of every link
// path is present at no larger cost (all the DP needs from shadow-completeness).
bool is_shadow_complete(const RootedInstance& inst);

enum class DpStatus { Solved, Infeasible, NotShadowComplete };

struct DpResult {
  DpStatus status = DpStatus::Infeasible;
  std::vector<int> links;  // sorted link ids
  Rat cost;
};

// Cheapest N-thin solution via the subtree-interface dynamic program.
DpResult solve_n_thin(const RootedInstance& inst, int n_thin);

enum class BoundedStatus { Solved, Infeasible, WidthExceeded, NotShadowComplete };

struct BoundedResult {
  BoundedStatus status = BoundedStatus::Infeasible;
  std::vector<int> links;
  Rat cost;
  int measured_width = 0;
};

// Guards viwidth(inst) <= k, then runs solve_n_thin with N = 2k.
BoundedResult solve_bounded_viwidth(const RootedInstance& inst, int k);

// Replaces links by generic shadows, then repeatedly substitutes proper
// shadows while the set stays feasible, scanning links in cost-descending
// order. The result is shadow-minimal and never costlier.
std::vector<Link> shadow_minimalize(const RootedInstance& inst, const std::vector<int>& link_ids);

}  // namespace dtap
