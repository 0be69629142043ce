#pragma once

// Independent oracles for the test suites. Everything here recomputes results
// from first principles (BFS, subset enumeration, definition unfolding) and
// must stay independent of the implementation paths it checks.

#include <optional>
#include <vector>

#include "dtap/instance.hpp"
#include "dtap/lp.hpp"
#include "dtap/reductions.hpp"

namespace dtap::test {

// Tree path by BFS over the undirected adjacency, independent of the
// parent-walk in path_view.
std::vector<int> bfs_path(const RootedInstance& inst, int u, int v);

// Exact optimum by enumerating all link subsets (use only for small m).
struct ExhaustiveResult {
  bool feasible = false;
  Rat cost;
  std::vector<int> links;
};
ExhaustiveResult exhaustive_opt(const RootedInstance& inst);

// Definition-unfolding visibility oracle.
bool visible_by_definition(const RootedInstance& inst, int v, int arc, const std::vector<int>& link_set);

// Maximum ancestor-free subset by subset enumeration.
int max_ancestor_free_bruteforce(const RootedInstance& inst, const std::vector<int>& arcs);

// Cheapest 2-covering multiset (each link taken 0, 1 or 2 times).
struct TwoCoverResult {
  bool feasible = false;
  Rat cost;
  std::vector<int> multiset;  // link ids with repetition
};
TwoCoverResult brute_force_2cover(const Multi2TapInstance& inst);

// Cheapest bi-directed cover (links taken at most once; zero costs allowed).
struct BiCoverResult {
  bool feasible = false;
  Rat cost;
  std::vector<int> links;
};
BiCoverResult brute_force_bidirected(const BiDirectedCoverInstance& inst);

bool covers_all_arcs(const RootedInstance& inst, const std::vector<int>& links);

// Random multi 2-TAP instance with every cut coverable twice.
Multi2TapInstance random_m2tap(int n, int m, std::uint64_t seed);

}  // namespace dtap::test
