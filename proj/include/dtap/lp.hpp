#pragma once

#include <map>
#include <optional>
#include <vector>

#include "dtap/instance.hpp"
#include "dtap/rational.hpp"

namespace dtap {

// Sparse arc-link-coverage matrix: entry(a,l) = 1 iff a in ->cov(l).
struct CoverageMatrix {
  int rows = 0;  // arcs
  int cols = 0;  // links
  std::vector<std::vector<int>> col_arcs;   // per link: sorted covered arc ids
  std::vector<std::vector<int>> row_links;  // per arc: sorted covering link ids

  bool entry(int arc, int link) const;
};

CoverageMatrix build_matrix(const RootedInstance& inst);

// Nonnegative rational assignment over links; only positive entries stored.
class FractionalSolution {
 public:
  FractionalSolution() = default;

  void set(int link, const Rat& value);
  Rat value(int link) const;
  const std::map<int, Rat>& entries() const { return values_; }
  std::vector<int> support() const;
  bool in_support(int link) const { return values_.count(link) > 0; }

  // sum of x over an arbitrary link set
  template <typename It>
  Rat mass(It first, It last) const {
    Rat total = 0;
    for (; first != last; ++first) total += value(*first);
    return total;
  }
  Rat mass(const std::vector<int>& links) const { return mass(links.begin(), links.end()); }

  Rat cost(const RootedInstance& inst) const;

 private:
  std::map<int, Rat> values_;
};

// Sparse >= row over links.
struct ExtraConstraint {
  std::vector<std::pair<int, Rat>> coeffs;  // (link id, coefficient)
  Rat rhs;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  FractionalSolution solution;  // valid when Optimal
  Rat objective;
};

// Exact solve of min c.x : M.x >= 1, extras, [c.x <= cost_cap], x >= 0.
// Returns an optimal basic (vertex) solution.
LpOutcome solve_lp(const RootedInstance& inst, const std::vector<ExtraConstraint>& extra = {},
                   const std::optional<Rat>& cost_cap = std::nullopt);

struct IntegralityResult {
  bool integral = false;
  std::vector<int> links;     // support when integral
  int fractional_link = -1;   // witness otherwise
  Rat fractional_value;
};

// Extracts {l : x_l = 1} when every coordinate is 0/1.
IntegralityResult assert_integral(const FractionalSolution& x);

// --- generic exact LP (shared with the reductions module) --------------------

struct GeneralLp {
  enum Sense { GE = 1, LE = -1, EQ = 0 };
  struct Row {
    std::vector<std::pair<int, Rat>> coeffs;
    Rat rhs;
    Sense sense = GE;
  };
  int num_vars = 0;
  std::vector<Rat> objective;  // minimized; size num_vars
  std::vector<Row> rows;
};

struct GeneralLpResult {
  LpStatus status = LpStatus::Infeasible;
  std::vector<Rat> x;
  Rat objective;
};

// Two-phase primal tableau simplex over exact rationals. Entering column:
// most negative reduced cost, smallest index on ties; ratio ties leave the
// smallest basic index; falls back to Bland's rule after a run of degenerate
// pivots, so it always terminates. Deterministic.
GeneralLpResult solve_general_lp(const GeneralLp& lp);

}  // namespace dtap
