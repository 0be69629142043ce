#include "dtap/lp.hpp"

#include <algorithm>
#include <cassert>

namespace dtap {

bool CoverageMatrix::entry(int arc, int link) const {
  const auto& col = col_arcs[link];
  return std::binary_search(col.begin(), col.end(), arc);
}

CoverageMatrix build_matrix(const RootedInstance& inst) {
  CoverageMatrix m;
  m.rows = inst.arc_count();
  m.cols = inst.link_count();
  m.col_arcs.resize(m.cols);
  m.row_links.resize(m.rows);
  for (int l = 0; l < m.cols; ++l) {
    m.col_arcs[l] = inst.link_path(l).fwd_arcs;
    std::sort(m.col_arcs[l].begin(), m.col_arcs[l].end());
    for (int a : m.col_arcs[l]) m.row_links[a].push_back(l);
  }
  for (auto& row : m.row_links) std::sort(row.begin(), row.end());
  return m;
}

void FractionalSolution::set(int link, const Rat& value) {
  if (value == 0)
    values_.erase(link);
  else
    values_[link] = value;
}

Rat FractionalSolution::value(int link) const {
  auto it = values_.find(link);
  return it == values_.end() ? Rat(0) : it->second;
}

std::vector<int> FractionalSolution::support() const {
  std::vector<int> s;
  s.reserve(values_.size());
  for (const auto& [l, v] : values_)
    if (v > 0) s.push_back(l);
  return s;
}

Rat FractionalSolution::cost(const RootedInstance& inst) const {
  Rat total = 0;
  for (const auto& [l, v] : values_) total += inst.links[l].cost * v;
  return total;
}

// --- simplex ------------------------------------------------------------------

namespace {

class Tableau {
 public:
  // Builds the standard-form tableau. Variable layout: structural vars,
  // then one slack/surplus per inequality row, then artificials.
  explicit Tableau(const GeneralLp& lp) : lp_(lp) {
    const int m = static_cast<int>(lp.rows.size());
    num_struct_ = lp.num_vars;
    num_slack_ = 0;
    for (const auto& row : lp.rows)
      if (row.sense != GeneralLp::EQ) ++num_slack_;

    std::vector<std::vector<Rat>> rows(m);
    std::vector<Rat> rhs(m);
    int slack_idx = 0;
    for (int i = 0; i < m; ++i) {
      rows[i].assign(num_struct_ + num_slack_, Rat(0));
      for (const auto& [j, coef] : lp.rows[i].coeffs) rows[i][j] += coef;
      rhs[i] = lp.rows[i].rhs;
      if (lp.rows[i].sense == GeneralLp::GE)
        rows[i][num_struct_ + slack_idx++] = Rat(-1);
      else if (lp.rows[i].sense == GeneralLp::LE)
        rows[i][num_struct_ + slack_idx++] = Rat(1);
    }
    for (int i = 0; i < m; ++i) {
      if (rhs[i] < 0) {
        for (auto& v : rows[i]) v = -v;
        rhs[i] = -rhs[i];
      }
    }
    // Natural basic columns (a +1 slack in a single row); artificials fill in.
    basis_.assign(m, -1);
    int width = num_struct_ + num_slack_;
    for (int i = 0; i < m; ++i) {
      int found = -1;
      for (int j = num_struct_; j < width; ++j)
        if (rows[i][j] == 1) { found = j; break; }
      basis_[i] = found;  // may be -1
    }
    num_art_ = 0;
    for (int i = 0; i < m; ++i)
      if (basis_[i] < 0) ++num_art_;
    total_ = width + num_art_;
    tab_.assign(m, std::vector<Rat>(total_ + 1, Rat(0)));
    int art = width;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < width; ++j) tab_[i][j] = rows[i][j];
      tab_[i][total_] = rhs[i];
      if (basis_[i] < 0) {
        tab_[i][art] = 1;
        basis_[i] = art++;
      }
    }
    art_begin_ = width;
  }

  LpStatus run() {
    const int m = static_cast<int>(tab_.size());
    if (num_art_ > 0) {
      // Phase 1: minimize the sum of artificials.
      obj_.assign(total_ + 1, Rat(0));
      for (int j = art_begin_; j < total_; ++j) obj_[j] = 1;
      for (int i = 0; i < m; ++i)
        if (basis_[i] >= art_begin_) sub_row(obj_, tab_[i], Rat(1));
      LpStatus s = iterate(total_);
      if (s == LpStatus::Unbounded) return LpStatus::Unbounded;
      if (-obj_[total_] != 0) return LpStatus::Infeasible;
      // Pivot artificials out of the basis; drop redundant rows.
      for (int i = 0; i < m; ++i) {
        if (basis_[i] < art_begin_) continue;
        int col = -1;
        for (int j = 0; j < art_begin_; ++j)
          if (tab_[i][j] != 0) { col = j; break; }
        if (col >= 0)
          pivot(i, col);
        else
          dead_rows_.push_back(i);  // all-zero row: redundant constraint
      }
    }
    // Phase 2 objective: reduced costs for the real objective.
    obj_.assign(total_ + 1, Rat(0));
    for (int j = 0; j < num_struct_; ++j) obj_[j] = lp_.objective[j];
    for (int i = 0; i < m; ++i) {
      if (is_dead(i)) continue;
      if (basis_[i] < num_struct_ && lp_.objective[basis_[i]] != 0)
        sub_row(obj_, tab_[i], lp_.objective[basis_[i]]);
    }
    return iterate(art_begin_);  // artificials are no longer eligible
  }

  std::vector<Rat> extract() const {
    std::vector<Rat> x(num_struct_, Rat(0));
    for (std::size_t i = 0; i < tab_.size(); ++i)
      if (!is_dead(static_cast<int>(i)) && basis_[i] < num_struct_) x[basis_[i]] = tab_[i][total_];
    return x;
  }

  Rat objective_value() const { return -obj_[total_]; }

 private:
  static void sub_row(std::vector<Rat>& target, const std::vector<Rat>& row, const Rat& factor) {
    for (std::size_t j = 0; j < target.size(); ++j)
      if (row[j] != 0) target[j] -= factor * row[j];
  }

  bool is_dead(int i) const {
    return std::find(dead_rows_.begin(), dead_rows_.end(), i) != dead_rows_.end();
  }

  void pivot(int row, int col) {
    Rat p = tab_[row][col];
    assert(p != 0);
    if (p != 1)
      for (auto& v : tab_[row]) v /= p;
    for (std::size_t i = 0; i < tab_.size(); ++i) {
      if (static_cast<int>(i) == row) continue;
      Rat f = tab_[i][col];
      if (f != 0) sub_row(tab_[i], tab_[row], f);
    }
    Rat f = obj_[col];
    if (f != 0) sub_row(obj_, tab_[row], f);
    basis_[row] = col;
  }

  LpStatus iterate(int eligible_cols) {
    const int m = static_cast<int>(tab_.size());
    int degenerate_run = 0;
    bool bland = false;
    while (true) {
      int col = -1;
      if (bland) {
        for (int j = 0; j < eligible_cols; ++j)
          if (obj_[j] < 0) { col = j; break; }
      } else {
        Rat best = 0;
        for (int j = 0; j < eligible_cols; ++j)
          if (obj_[j] < best) { best = obj_[j]; col = j; }
      }
      if (col < 0) return LpStatus::Optimal;
      int row = -1;
      Rat best_ratio = 0;
      for (int i = 0; i < m; ++i) {
        if (is_dead(i) || tab_[i][col] <= 0) continue;
        Rat ratio = tab_[i][total_] / tab_[i][col];
        if (row < 0 || ratio < best_ratio || (ratio == best_ratio && basis_[i] < basis_[row])) {
          row = i;
          best_ratio = ratio;
        }
      }
      if (row < 0) return LpStatus::Unbounded;
      Rat before = obj_[total_];
      pivot(row, col);
      if (obj_[total_] == before) {
        if (++degenerate_run > 64) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
    }
  }

  const GeneralLp& lp_;
  std::vector<std::vector<Rat>> tab_;
  std::vector<Rat> obj_;
  std::vector<int> basis_;
  std::vector<int> dead_rows_;
  int num_struct_ = 0, num_slack_ = 0, num_art_ = 0, total_ = 0, art_begin_ = 0;
};

}  // namespace

GeneralLpResult solve_general_lp(const GeneralLp& lp) {
  Tableau tab(lp);
  GeneralLpResult result;
  result.status = tab.run();
  if (result.status == LpStatus::Optimal) {
    result.x = tab.extract();
    result.objective = 0;
    for (int j = 0; j < lp.num_vars; ++j) result.objective += lp.objective[j] * result.x[j];
  }
  return result;
}

LpOutcome solve_lp(const RootedInstance& inst, const std::vector<ExtraConstraint>& extra,
                   const std::optional<Rat>& cost_cap) {
  LpOutcome out;
  CoverageMatrix m = build_matrix(inst);
  for (int a = 0; a < m.rows; ++a)
    if (m.row_links[a].empty()) return out;  // uncovered arc: infeasible

  GeneralLp lp;
  lp.num_vars = inst.link_count();
  lp.objective.resize(lp.num_vars);
  for (int l = 0; l < lp.num_vars; ++l) lp.objective[l] = inst.links[l].cost;
  for (int a = 0; a < m.rows; ++a) {
    GeneralLp::Row row;
    for (int l : m.row_links[a]) row.coeffs.push_back({l, Rat(1)});
    row.rhs = 1;
    row.sense = GeneralLp::GE;
    lp.rows.push_back(std::move(row));
  }
  for (const auto& ec : extra) {
    GeneralLp::Row row;
    row.coeffs = ec.coeffs;
    row.rhs = ec.rhs;
    row.sense = GeneralLp::GE;
    lp.rows.push_back(std::move(row));
  }
  if (cost_cap) {
    GeneralLp::Row row;
    for (int l = 0; l < lp.num_vars; ++l) row.coeffs.push_back({l, inst.links[l].cost});
    row.rhs = *cost_cap;
    row.sense = GeneralLp::LE;
    lp.rows.push_back(std::move(row));
  }
  GeneralLpResult res = solve_general_lp(lp);
  out.status = res.status;
  if (res.status == LpStatus::Optimal) {
    for (int l = 0; l < lp.num_vars; ++l) out.solution.set(l, res.x[l]);
    out.objective = res.objective;
  }
  return out;
}

IntegralityResult assert_integral(const FractionalSolution& x) {
  IntegralityResult r;
  for (const auto& [l, v] : x.entries()) {
    if (v == 1) continue;
    if (v == 0) continue;
    r.integral = false;
    r.fractional_link = l;
    r.fractional_value = v;
    return r;
  }
  r.integral = true;
  r.links = x.support();
  return r;
}

}  // namespace dtap
