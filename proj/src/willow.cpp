#include "dtap/willow.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace dtap {

namespace {

// ->cov(l) meets A_v in the given direction class but is not contained in A_v.
// An arc belongs to A_v iff its lower vertex is a strict descendant of v.
bool violates(const RootedInstance& inst, int v, int link, bool up_class) {
  const PathView& pv = inst.link_path(link);
  bool touches = false, escapes = false;
  for (int a : pv.fwd_arcs) {
    int lower = inst.arc_lower_vertex(a);
    bool inside = lower != v && inst.is_ancestor(v, lower);
    if (!inside) escapes = true;
    if (inside && inst.arc_is_up(a) == up_class) touches = true;
  }
  return touches && escapes;
}

}  // namespace

bool is_up_independent(const RootedInstance& inst, int v, const std::vector<int>& link_set) {
  for (int l : link_set)
    if (violates(inst, v, l, /*up_class=*/true)) return false;
  return true;
}

bool is_down_independent(const RootedInstance& inst, int v, const std::vector<int>& link_set) {
  for (int l : link_set)
    if (violates(inst, v, l, /*up_class=*/false)) return false;
  return true;
}

RecognitionResult recognize_willow(const RootedInstance& inst, const std::vector<int>& link_set) {
  RecognitionResult res;
  std::set<int> w0{inst.root};
  std::vector<LinkClass> classes;
  for (int l : link_set) {
    const PathView& pv = inst.link_path(l);
    if (inst.links[l].head == pv.apex)
      classes.push_back(LinkClass::Up);
    else if (inst.links[l].tail == pv.apex)
      classes.push_back(LinkClass::Down);
    else {
      classes.push_back(LinkClass::WCross);
      w0.insert(pv.apex);
    }
  }
  res.cert.link_ids = link_set;
  res.cert.link_class = classes;
  for (int v : w0) {
    bool up = is_up_independent(inst, v, link_set);
    bool down = is_down_independent(inst, v, link_set);
    if (!up && !down) {
      res.violator = v;
      return res;
    }
    res.cert.w.push_back(v);
    res.cert.up_independent.push_back(up);
    res.cert.down_independent.push_back(down);
  }
  res.willow = true;
  return res;
}

RecognitionResult recognize_willow(const RootedInstance& inst) {
  std::vector<int> all(inst.link_count());
  for (int l = 0; l < inst.link_count(); ++l) all[l] = l;
  return recognize_willow(inst, all);
}

GHSigning gh_signing(const RootedInstance& inst, const WillowCertificate& cert,
                     const std::vector<int>& b_arcs) {
  GHSigning gh;
  gh.b_arcs = b_arcs;
  std::vector<bool> in_b(inst.arc_count(), false);
  for (int a : b_arcs) in_b[a] = true;
  std::vector<bool> in_w(inst.n(), false);
  std::vector<int> w_pos(inst.n(), -1);
  for (std::size_t i = 0; i < cert.w.size(); ++i) {
    in_w[cert.w[i]] = true;
    w_pos[cert.w[i]] = static_cast<int>(i);
  }

  // #up-arcs / #down-arcs from B on the path from u up to its ancestor anc.
  auto dist = [&](int u, int anc, bool up_class) {
    int count = 0;
    for (int x = u; x != anc; x = inst.parent(x)) {
      int a = inst.parent_arc(x);
      if (in_b[a] && inst.arc_is_up(a) == up_class) ++count;
    }
    return count;
  };
  auto next_w_ancestor = [&](int u) {
    for (int x = inst.parent(u); ; x = inst.parent(x)) {
      if (in_w[x]) return x;
      if (x == inst.root) return inst.root;
    }
  };

  // Starting signs in order of increasing depth, ties by vertex id.
  std::vector<int> order = cert.w;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (inst.depth(a) != inst.depth(b)) return inst.depth(a) < inst.depth(b);
    return a < b;
  });
  for (int u : order) {
    if (u == inst.root) {
      gh.phi_up[u] = 1;
      gh.phi_down[u] = -1;
      continue;
    }
    int v = next_w_ancestor(u);
    if (cert.up_independent[w_pos[u]]) {
      int pd = gh.phi_down.at(v) * ((dist(u, v, false) % 2 == 0) ? 1 : -1);
      gh.phi_down[u] = pd;
      gh.phi_up[u] = -pd;
    } else {
      int pu = gh.phi_up.at(v) * ((dist(u, v, true) % 2 == 0) ? 1 : -1);
      gh.phi_up[u] = pu;
      gh.phi_down[u] = -pu;
    }
  }

  auto first_w_on_root_path = [&](int u) {
    for (int x = u;; x = inst.parent(x)) {
      if (in_w[x]) return x;
      if (x == inst.root) return inst.root;
    }
  };
  for (int a : b_arcs) {
    int apex = inst.arc_upper_vertex(a);
    int anchor = first_w_on_root_path(apex);
    gh.mu[a] = anchor;
    bool up_class = inst.arc_is_up(a);
    int parity = dist(apex, anchor, up_class) % 2 == 0 ? 1 : -1;
    gh.sigma[a] = (up_class ? gh.phi_up.at(anchor) : gh.phi_down.at(anchor)) * parity;
  }

  // Ghouila-Houri row condition on every classified link.
  for (int l : cert.link_ids) {
    int sum = 0;
    for (int a : inst.link_path(l).fwd_arcs)
      if (in_b[a]) sum += gh.sigma.at(a);
    if (sum < -1 || sum > 1)
      throw InstanceError(0, "gh_signing: signed column sum out of range (internal bug)");
  }
  return gh;
}

WillowSolveResult solve_willow(const RootedInstance& inst) {
  WillowSolveResult res;
  RecognitionResult rec = recognize_willow(inst);
  if (!rec.willow) {
    res.status = WillowSolveStatus::NotWillow;
    res.violator = rec.violator;
    return res;
  }
  LpOutcome lp = solve_lp(inst);
  if (lp.status != LpStatus::Optimal) {
    res.status = WillowSolveStatus::Infeasible;
    return res;
  }
  IntegralityResult integral = assert_integral(lp.solution);
  if (!integral.integral) {
    res.status = WillowSolveStatus::NotIntegral;
    res.violator = integral.fractional_link;
    return res;
  }
  res.status = WillowSolveStatus::Solved;
  res.links = integral.links;
  res.cost = lp.objective;
  return res;
}

bool verify_tu_bruteforce(const CoverageMatrix& m) {
  if (m.rows > 8 || m.cols > 8) throw InstanceError(0, "verify_tu_bruteforce: matrix larger than 8x8");
  // Dense copy; entries are 0/1 so int64 is exact for n <= 8 determinants.
  std::vector<std::vector<long long>> dense(m.rows, std::vector<long long>(m.cols, 0));
  for (int l = 0; l < m.cols; ++l)
    for (int a : m.col_arcs[l]) dense[a][l] = 1;

  int dim = std::min(m.rows, m.cols);
  std::vector<int> rows_sel, cols_sel;
  // Fraction-free Gaussian elimination (Bareiss) on the selected submatrix.
  auto det = [&](const std::vector<int>& rs, const std::vector<int>& cs) -> long long {
    int k = static_cast<int>(rs.size());
    std::vector<std::vector<long long>> a(k, std::vector<long long>(k));
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) a[i][j] = dense[rs[i]][cs[j]];
    long long prev = 1;
    long long sign = 1;
    for (int p = 0; p < k; ++p) {
      if (a[p][p] == 0) {
        int swap_row = -1;
        for (int i = p + 1; i < k; ++i)
          if (a[i][p] != 0) { swap_row = i; break; }
        if (swap_row < 0) return 0;
        std::swap(a[p], a[swap_row]);
        sign = -sign;
      }
      for (int i = p + 1; i < k; ++i)
        for (int j = p + 1; j < k; ++j) a[i][j] = (a[i][j] * a[p][p] - a[i][p] * a[p][j]) / prev;
      prev = a[p][p];
    }
    return sign * a[k - 1][k - 1];
  };

  std::vector<int> rs, cs;
  std::function<bool(int, int, int)> choose_cols = [&](int size, int start, int depth) -> bool {
    if (depth == size) {
      long long d = det(rs, cs);
      return d >= -1 && d <= 1;
    }
    for (int c = start; c < m.cols; ++c) {
      cs.push_back(c);
      bool ok = choose_cols(size, c + 1, depth + 1);
      cs.pop_back();
      if (!ok) return false;
    }
    return true;
  };
  std::function<bool(int, int, int)> choose_rows = [&](int size, int start, int depth) -> bool {
    if (depth == size) {
      cs.clear();
      return choose_cols(size, 0, 0);
    }
    for (int r = start; r < m.rows; ++r) {
      rs.push_back(r);
      bool ok = choose_rows(size, r + 1, depth + 1);
      rs.pop_back();
      if (!ok) return false;
    }
    return true;
  };
  for (int size = 1; size <= dim; ++size) {
    rs.clear();
    if (!choose_rows(size, 0, 0)) return false;
  }
  return true;
}

}  // namespace dtap
