#include "dtap/viwidth.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>

namespace dtap {

namespace {

std::vector<int> all_link_ids(const RootedInstance& inst) {
  std::vector<int> ids(inst.link_count());
  for (int l = 0; l < inst.link_count(); ++l) ids[l] = l;
  return ids;
}

// Maximum ancestor-free subset of `arcs`: the ancestors of an arc form a
// chain, so the minimal elements are a maximum antichain.
int max_ancestor_free(const RootedInstance& inst, const std::vector<int>& arcs) {
  int count = 0;
  for (int a : arcs) {
    bool minimal = true;
    for (int b : arcs) {
      if (a == b) continue;
      if (inst.arc_is_ancestor(a, b)) {  // a above b: a not minimal
        minimal = false;
        break;
      }
    }
    if (minimal) ++count;
  }
  return count;
}

}  // namespace

std::vector<int> visible_arcs(const RootedInstance& inst, int v, const std::vector<int>& link_set) {
  std::set<int> vis;
  for (int l : link_set) {
    PathView bar = generic_shadow_path(inst, inst.links[l]);
    if (bar.vertices.size() < 3) continue;
    bool interior = false;
    for (std::size_t i = 1; i + 1 < bar.vertices.size(); ++i)
      if (bar.vertices[i] == v) { interior = true; break; }
    if (!interior) continue;
    for (int a : inst.link_path(l).fwd_arcs) {
      int lower = inst.arc_lower_vertex(a);
      if (lower != v && inst.is_ancestor(v, lower)) vis.insert(a);
    }
  }
  return {vis.begin(), vis.end()};
}

VisibilityReport viwidth(const RootedInstance& inst, const std::vector<int>& link_set) {
  VisibilityReport rep;
  rep.visible.resize(inst.n());
  rep.up_width.assign(inst.n(), 0);
  rep.down_width.assign(inst.n(), 0);
  rep.width.assign(inst.n(), 0);
  for (int v = 0; v < inst.n(); ++v) {
    rep.visible[v] = visible_arcs(inst, v, link_set);
    std::vector<int> ups, downs;
    for (int a : rep.visible[v]) (inst.arc_is_up(a) ? ups : downs).push_back(a);
    rep.up_width[v] = max_ancestor_free(inst, ups);
    rep.down_width[v] = max_ancestor_free(inst, downs);
    rep.width[v] = std::max(rep.up_width[v], rep.down_width[v]);
    rep.instance_width = std::max(rep.instance_width, rep.width[v]);
  }
  return rep;
}

VisibilityReport viwidth(const RootedInstance& inst) { return viwidth(inst, all_link_ids(inst)); }

int viwidth_fwd(const RootedInstance& inst, const VisibilityReport& rep, int v) {
  int a = inst.parent_arc(v);
  if (a < 0 || inst.arc_is_up(a)) return rep.up_width[v];
  return rep.down_width[v];
}

int viwidth_bwd(const RootedInstance& inst, const VisibilityReport& rep, int v) {
  int a = inst.parent_arc(v);
  if (a < 0 || inst.arc_is_up(a)) return rep.down_width[v];
  return rep.up_width[v];
}

bool is_k_thin(const RootedInstance& inst, const std::vector<int>& link_ids, int k) {
  std::vector<int> interior_count(inst.n(), 0);
  for (int l : link_ids) {
    const PathView& pv = inst.link_path(l);
    for (std::size_t i = 1; i + 1 < pv.vertices.size(); ++i) ++interior_count[pv.vertices[i]];
  }
  for (int c : interior_count)
    if (c > k) return false;
  return true;
}

bool is_shadow_complete(const RootedInstance& inst) {
  std::map<std::pair<int, int>, Rat> cheapest;
  for (const Link& l : inst.links) {
    auto key = std::make_pair(l.tail, l.head);
    auto it = cheapest.find(key);
    if (it == cheapest.end() || l.cost < it->second) cheapest[key] = l.cost;
  }
  for (int l = 0; l < inst.link_count(); ++l) {
    const PathView& pv = inst.link_path(l);
    const auto& vs = pv.vertices;
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (std::size_t j = i + 1; j < vs.size(); ++j) {
        if (path_view(inst, vs[i], vs[j]).fwd_arcs.empty()) continue;
        auto it = cheapest.find({vs[i], vs[j]});
        if (it == cheapest.end() || it->second > inst.links[l].cost) return false;
      }
  }
  return true;
}

// --- dynamic program -----------------------------------------------------------

namespace {

struct DpEntry {
  bool feasible = false;
  Rat cost;
  std::vector<int> witness;  // sorted
};

struct DpContext {
  const RootedInstance& inst;
  int n_thin;
  std::vector<bool> useful;                 // nonempty forward coverage
  std::vector<std::vector<int>> out_links;  // L_v^out (useful only), sorted
  std::vector<std::vector<int>> cross_links;  // L_v^cross (useful only), sorted
  std::vector<std::vector<std::vector<int>>> free_cands;  // per v, per child slot
  std::vector<int> lstar;                   // per vertex: direct cover of a_v
  std::map<std::pair<int, std::vector<int>>, DpEntry> memo;

  explicit DpContext(const RootedInstance& i, int n) : inst(i), n_thin(n) {}
};

std::vector<int> sorted_union(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Enumerates subsets of `cands` of size <= budget in lexicographic order.
void enumerate_subsets(const std::vector<int>& cands, int budget,
                       const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> current;
  std::function<void(std::size_t)> rec = [&](std::size_t idx) {
    fn(current);
    if (static_cast<int>(current.size()) >= budget) return;
    for (std::size_t i = idx; i < cands.size(); ++i) {
      current.push_back(cands[i]);
      rec(i + 1);
      current.pop_back();
    }
  };
  rec(0);
}

const DpEntry& solve_key(DpContext& ctx, int v, const std::vector<int>& y);

// c(v, Y, Z): prefix recursion over the children of v.
DpEntry solve_yz(DpContext& ctx, int v, const std::vector<int>& y, const std::vector<int>& z) {
  const RootedInstance& inst = ctx.inst;
  std::vector<int> yz = sorted_union(y, z);
  DpEntry acc;
  acc.feasible = true;
  acc.cost = 0;

  const auto& kids = inst.children(v);
  for (std::size_t ci = 0; ci < kids.size(); ++ci) {
    int child = kids[ci];
    // Links of Y u Z whose first endpoint among child subtrees appears here.
    for (int l : yz) {
      int t = inst.links[l].tail, h = inst.links[l].head;
      int first_kid = -1;
      for (int k : kids) {
        if (inst.is_ancestor(k, t) || inst.is_ancestor(k, h)) { first_kid = k; break; }
      }
      if (first_kid == child) {
        acc.cost += inst.links[l].cost;
        acc.witness = sorted_union(acc.witness, {l});
      }
    }
    // Fixed part of the child's interface.
    std::vector<int> fixed;
    for (int l : yz)
      if (std::binary_search(ctx.out_links[child].begin(), ctx.out_links[child].end(), l))
        fixed.push_back(l);
    std::sort(fixed.begin(), fixed.end());
    if (static_cast<int>(fixed.size()) > ctx.n_thin) return DpEntry{};

    int arc = inst.parent_arc(child);
    auto covers_arc = [&](const std::vector<int>& set) {
      for (int l : set)
        for (int a : inst.link_path(l).fwd_arcs)
          if (a == arc) return true;
      return false;
    };
    bool covered_by_yz = covers_arc(yz);

    std::optional<Rat> best;
    std::vector<int> best_witness;
    int budget = ctx.n_thin - static_cast<int>(fixed.size());
    enumerate_subsets(ctx.free_cands[v][ci], budget, [&](const std::vector<int>& free) {
      std::vector<int> yprime = sorted_union(fixed, free);
      const DpEntry& sub = solve_key(ctx, child, yprime);
      if (!sub.feasible) return;
      Rat cost = sub.cost;
      for (int l : yprime)
        if (std::binary_search(yz.begin(), yz.end(), l)) cost -= inst.links[l].cost;
      bool covered = covered_by_yz || covers_arc(yprime);
      std::vector<int> extra;
      if (!covered) {
        if (ctx.lstar[child] < 0) return;  // cannot cover a_v at all
        cost += inst.links[ctx.lstar[child]].cost;
        extra.push_back(ctx.lstar[child]);
      }
      if (!best || cost < *best) {
        best = cost;
        best_witness = sorted_union(sub.witness, extra);
      }
    });
    if (!best) return DpEntry{};
    acc.cost += *best;
    acc.witness = sorted_union(acc.witness, best_witness);
  }
  return acc;
}

const DpEntry& solve_key(DpContext& ctx, int v, const std::vector<int>& y) {
  auto key = std::make_pair(v, y);
  auto it = ctx.memo.find(key);
  if (it != ctx.memo.end()) return it->second;

  DpEntry result;
  if (ctx.inst.children(v).empty()) {
    result.feasible = y.empty();
    result.cost = 0;
  } else {
    int budget = ctx.n_thin - static_cast<int>(y.size());
    std::optional<Rat> best;
    std::vector<int> best_witness;
    enumerate_subsets(ctx.cross_links[v], budget, [&](const std::vector<int>& z) {
      DpEntry e = solve_yz(ctx, v, y, z);
      if (!e.feasible) return;
      if (!best || e.cost < *best) {
        best = e.cost;
        best_witness = std::move(e.witness);
      }
    });
    if (best) {
      result.feasible = true;
      result.cost = *best;
      result.witness = std::move(best_witness);
    }
  }
  return ctx.memo.emplace(std::move(key), std::move(result)).first->second;
}

}  // namespace

DpResult solve_n_thin(const RootedInstance& inst, int n_thin) {
  DpResult res;
  if (!is_shadow_complete(inst)) {
    res.status = DpStatus::NotShadowComplete;
    return res;
  }
  if (!is_feasible(inst)) {
    res.status = DpStatus::Infeasible;
    return res;
  }

  DpContext ctx(inst, n_thin);
  ctx.useful.assign(inst.link_count(), false);
  for (int l = 0; l < inst.link_count(); ++l) ctx.useful[l] = !inst.link_path(l).fwd_arcs.empty();
  ctx.out_links.resize(inst.n());
  ctx.cross_links.resize(inst.n());
  ctx.free_cands.resize(inst.n());
  ctx.lstar.assign(inst.n(), -1);

  for (int v = 0; v < inst.n(); ++v) {
    for (int l = 0; l < inst.link_count(); ++l) {
      if (!ctx.useful[l]) continue;
      int t = inst.links[l].tail, h = inst.links[l].head;
      bool t_in = t != v && inst.is_ancestor(v, t);
      bool h_in = h != v && inst.is_ancestor(v, h);
      bool t_out = !inst.is_ancestor(v, t);
      bool h_out = !inst.is_ancestor(v, h);
      if ((t_in && h_out) || (h_in && t_out)) ctx.out_links[v].push_back(l);
      if (t_in && h_in && inst.link_path(l).apex == v) ctx.cross_links[v].push_back(l);
    }
    const auto& kids = inst.children(v);
    ctx.free_cands[v].resize(kids.size());
    for (std::size_t ci = 0; ci < kids.size(); ++ci) {
      int c = kids[ci];
      for (int l = 0; l < inst.link_count(); ++l) {
        if (!ctx.useful[l]) continue;
        int t = inst.links[l].tail, h = inst.links[l].head;
        bool t_deep = t != c && inst.is_ancestor(c, t);
        bool h_deep = h != c && inst.is_ancestor(c, h);
        if ((t == v && h_deep) || (h == v && t_deep)) ctx.free_cands[v][ci].push_back(l);
      }
    }
  }
  for (int v = 0; v < inst.n(); ++v) {
    if (v == inst.root) continue;
    int arc = inst.parent_arc(v);
    for (int l = 0; l < inst.link_count(); ++l) {
      int t = inst.links[l].tail, h = inst.links[l].head;
      if ((t == inst.parent(v) && h == v) || (t == v && h == inst.parent(v))) {
        const auto& fwd = inst.link_path(l).fwd_arcs;
        if (fwd.size() == 1 && fwd[0] == arc &&
            (ctx.lstar[v] < 0 || inst.links[l].cost < inst.links[ctx.lstar[v]].cost))
          ctx.lstar[v] = l;
      }
    }
  }

  const DpEntry& top = solve_key(ctx, inst.root, {});
  if (!top.feasible) {
    res.status = DpStatus::Infeasible;
    return res;
  }
  res.status = DpStatus::Solved;
  res.links = top.witness;
  res.cost = top.cost;

  // Self-consistency: the witness really is a feasible N-thin set of the
  // stored cost.
  Rat check = 0;
  std::vector<bool> covered(inst.arc_count(), false);
  for (int l : res.links) {
    check += inst.links[l].cost;
    for (int a : inst.link_path(l).fwd_arcs) covered[a] = true;
  }
  bool all = std::all_of(covered.begin(), covered.end(), [](bool b) { return b; });
  if (check != res.cost || !all || !is_k_thin(inst, res.links, n_thin))
    throw InstanceError(0, "solve_n_thin: witness inconsistent with memoized value (internal bug)");
  return res;
}

BoundedResult solve_bounded_viwidth(const RootedInstance& inst, int k) {
  BoundedResult res;
  if (!is_shadow_complete(inst)) {
    res.status = BoundedStatus::NotShadowComplete;
    return res;
  }
  VisibilityReport rep = viwidth(inst);
  res.measured_width = rep.instance_width;
  if (rep.instance_width > k) {
    res.status = BoundedStatus::WidthExceeded;
    return res;
  }
  DpResult dp = solve_n_thin(inst, 2 * k);
  if (dp.status != DpStatus::Solved) {
    res.status = BoundedStatus::Infeasible;
    return res;
  }
  res.status = BoundedStatus::Solved;
  res.links = dp.links;
  res.cost = dp.cost;
  return res;
}

std::vector<Link> shadow_minimalize(const RootedInstance& inst, const std::vector<int>& link_ids) {
  std::vector<Link> work;
  for (int l : link_ids) {
    auto s = generic_shadow(inst, inst.links[l]);
    if (s) work.push_back(*s);
  }
  auto feasible_with = [&](const std::vector<Link>& set) {
    std::vector<bool> covered(inst.arc_count(), false);
    for (const Link& l : set)
      for (int a : path_view(inst, l).fwd_arcs) covered[a] = true;
    return std::all_of(covered.begin(), covered.end(), [](bool b) { return b; });
  };
  if (!feasible_with(work)) throw InstanceError(0, "shadow_minimalize: input set is not feasible");

  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::size_t> order(work.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return work[a].cost > work[b].cost; });
    for (std::size_t idx : order) {
      PathView pv = path_view(inst, work[idx]);
      const auto& vs = pv.vertices;
      std::size_t len = vs.size();
      // Proper shadows by increasing path length (most aggressive trim first).
      bool replaced = false;
      for (std::size_t plen = 1; plen + 1 < len && !replaced; ++plen) {
        for (std::size_t start = 0; start + plen < len; ++start) {
          Link cand{vs[start], vs[start + plen], work[idx].cost};
          Link saved = work[idx];
          work[idx] = cand;
          if (feasible_with(work)) {
            replaced = true;
            changed = true;
            break;
          }
          work[idx] = saved;
        }
      }
    }
  }
  return work;
}

}  // namespace dtap
