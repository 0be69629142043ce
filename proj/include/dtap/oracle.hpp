#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dtap/instance.hpp"
#include "dtap/lp.hpp"

namespace dtap {

struct GeneratorConfig {
  int n = 6;                 // vertex count, >= 2
  double bias = 0.5;         // probability of an up-arc
  int m = 8;                 // total link count target (>= n-1 when feasible)
  Rat cost_max = Rat(4);     // costs drawn from a rational grid in [1, cost_max]
  std::uint64_t seed = 1;
  bool ensure_feasible = true;  // inject per-arc direct-cover links
};

enum class BruteStatus { Optimal, Infeasible, BudgetExceeded };

struct BruteResult {
  BruteStatus status = BruteStatus::Infeasible;
  std::vector<int> links;  // sorted link ids
  Rat cost;
  std::uint64_t nodes = 0;
};

// Exact optimum via branch and bound: branch on the lowest-indexed uncovered
// arc over its covering links in cost/|cov| density order; prune with
// cost-so-far + per-arc density lower bound and stop early once the incumbent
// meets the root LP bound. Budget counts explored nodes.
BruteResult brute_force_opt(const RootedInstance& inst, std::uint64_t budget = 50'000'000);

RootedInstance random_instance(const GeneratorConfig& cfg);

// Random willow: a witness set W (containing the root) is drawn and every
// generated link is an up-link, a down-link or a W-cross-link that keeps all
// of W up-/down-independent. Always feasible via direct-cover links.
RootedInstance random_willow_instance(const GeneratorConfig& cfg);

// --- ratio harness -----------------------------------------------------------

struct SolverEntry {
  std::string name;
  // returns (cost, feasible solution links) on the given instance
  std::function<std::pair<Rat, std::vector<int>>(const RootedInstance&)> run;
};

struct HarnessRow {
  std::uint64_t seed = 0;
  int n = 0, m = 0;
  Rat delta, opt, lp, cost, ratio;
  std::string solver;
};

struct HarnessReport {
  std::vector<HarnessRow> rows;
  Rat min_ratio(const std::string& solver) const;
  Rat max_ratio(const std::string& solver) const;
  Rat mean_ratio(const std::string& solver) const;
  std::string to_csv() const;
  std::string to_json() const;
};

// Runs `trials` seeded instances of the family ("random" | "willow") through
// every solver; trials fan out over a small thread pool and rows are
// assembled in trial order.
HarnessReport ratio_harness(const std::vector<SolverEntry>& solvers, const std::string& family,
                            int trials, const GeneratorConfig& base_cfg, int threads = 4);

}  // namespace dtap
