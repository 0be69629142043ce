#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dtap/instance.hpp"

namespace dtap {

// Undirected tree plus undirected links; solutions are multisets covering
// every fundamental cut at least twice.
struct Multi2TapInstance {
  std::vector<std::string> vertex_names;
  struct Edge { int u = -1, v = -1; };
  std::vector<Edge> edges;
  struct ULink { int u = -1, v = -1; Rat cost; };
  std::vector<ULink> links;

  int n() const { return static_cast<int>(vertex_names.size()); }
  void validate() const;  // throws InstanceError unless (V, edges) is a tree
};

// Undirected tree, directed links; every fundamental cut must be crossed in
// both directions. Zero-cost links are allowed here (and only here).
struct BiDirectedCoverInstance {
  std::vector<std::string> vertex_names;
  std::vector<Multi2TapInstance::Edge> edges;
  struct DLink { int tail = -1, head = -1; Rat cost; };
  std::vector<DLink> links;

  int n() const { return static_cast<int>(vertex_names.size()); }
};

// Each undirected link becomes two opposite directed links of equal cost.
BiDirectedCoverInstance m2tap_to_bidirected(const Multi2TapInstance& inst);

struct WdtapFromBidirected {
  RootedInstance inst;
  std::vector<int> link_origin;     // WDTAP link -> bidirected link index
  std::vector<bool> free_tier;      // WDTAP links that stand in for zero-cost links
  Rat free_tier_cost;               // the symbolic cost assigned to that tier
};

// Subdivides every edge with a midpoint and orients the two halves toward it;
// links carry over on the original vertices. Zero-cost input links enter a
// "free" tier priced so low (below the input cost grid) that exact optima can
// be recovered by subtracting free_tier_cost per free link used.
WdtapFromBidirected bidirected_to_wdtap(const BiDirectedCoverInstance& inst);

struct BidirectedFromWdtap {
  BiDirectedCoverInstance inst;
  int zero_cost_links = 0;  // the ell_a tier appended after the original links
};

// Undirects the tree and adds a zero-cost link parallel to each arc.
BidirectedFromWdtap wdtap_to_bidirected(const RootedInstance& inst);

// Orients a 2-covering multiset (link indices, repetition allowed) so that
// every fundamental cut is crossed in both directions. Solved as an exact LP
// over the cross-free shore system; the vertex is integral by submodular-flow
// integrality and every output is certified shore-by-shore. Returns nullopt
// when F is not a 2-covering.
std::optional<std::vector<BiDirectedCoverInstance::DLink>> orient_2cover(
    const Multi2TapInstance& inst, const std::vector<int>& cover_multiset);

struct ThreeDmInstance {
  RootedInstance inst;
  int p = 0;       // |M|
  int q = 0;       // |W| = |X| = |Y|
  int target = 0;  // p + q; optimum equals this iff a perfect matching exists
};

// Hardness-family generator: triples (i,j,k) are 1-based indices into W, X, Y.
ThreeDmInstance gen_3dm_instance(const std::vector<std::array<int, 3>>& triples, int q);

// The fixed 6-vertex instance whose coverage matrix is a 5-cycle:
// LP optimum 5/2, integral optimum 3.
RootedInstance integrality_gap_instance();

}  // namespace dtap
