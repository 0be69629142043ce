#include "dtap/approx.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <set>

#include "dtap/oracle.hpp"
#include "dtap/viwidth.hpp"
#include "dtap/willow.hpp"

namespace dtap {

namespace {

Rat rat_min(const Rat& a, const Rat& b) { return a < b ? a : b; }

long long ceil_to_ll(const Rat& r) {
  Int q = numerator(r) / denominator(r);
  if (Rat(q) < r) q += 1;
  if (q > Int(std::numeric_limits<long long>::max() / 2)) return std::numeric_limits<long long>::max() / 2;
  return static_cast<long long>(q);
}

}  // namespace

ApproxConstants ApproxConstants::derive(const Rat& eps_user, const Rat& delta) {
  ApproxConstants c = from_internal_eps(rat_min(Rat(1), rat_min(Rat(1), eps_user / 10)) / 7, delta);
  c.eps_user = eps_user;
  c.eps_bar = rat_min(Rat(1), eps_user / 10);
  return c;
}

ApproxConstants ApproxConstants::from_internal_eps(const Rat& eps, const Rat& delta) {
  ApproxConstants c;
  if (eps <= 0 || eps >= 1) throw InstanceError(0, "internal epsilon must lie in (0,1)");
  if (delta < 1) throw InstanceError(0, "cost ratio below 1");
  c.eps_user = eps;  // caller may overwrite
  c.eps_bar = eps;
  c.eps = eps;
  c.delta = delta;
  c.gamma = eps / (2 * delta);
  c.zeta1 = Rat(2) / eps;
  c.zeta2 = 6 * c.zeta1 * delta / (eps * (1 - eps));
  c.k_exact = (1 + Rat(1) / c.gamma) * c.zeta2;
  c.k = ceil_to_ll(c.k_exact);
  if (!c.inequalities_hold()) throw InstanceError(0, "constant inequalities violated (internal bug)");
  return c;
}

bool ApproxConstants::inequalities_hold() const {
  return 2 * delta * gamma <= eps && Rat(2) / eps <= zeta1 && zeta1 < eps * zeta2 &&
         3 * zeta1 * delta <= eps * Rat(1, 2) * (1 - eps) * zeta2 && k_exact <= Rat(k);
}

HeavyFlags classify_heavy(const RootedInstance& inst, const FractionalSolution& x, const Rat& alpha) {
  HeavyFlags f;
  std::vector<Rat> fwd_mass(inst.arc_count(), Rat(0)), bwd_mass(inst.arc_count(), Rat(0));
  for (const auto& [l, v] : x.entries()) {
    for (int a : inst.link_path(l).fwd_arcs) fwd_mass[a] += v;
    for (int a : inst.link_path(l).wrong_arcs) bwd_mass[a] += v;
  }
  f.covered.resize(inst.arc_count());
  f.heavy.resize(inst.arc_count());
  for (int a = 0; a < inst.arc_count(); ++a) {
    f.covered[a] = fwd_mass[a] >= alpha;
    f.heavy[a] = bwd_mass[a] >= alpha;
  }
  f.involved.assign(inst.link_count(), false);
  for (int l = 0; l < inst.link_count(); ++l)
    for (int a : inst.link_path(l).wrong_arcs)
      if (f.heavy[a]) { f.involved[l] = true; break; }
  return f;
}

// --- zeta1 cover ---------------------------------------------------------------

Zeta1Cover contract_and_cover_zeta1(const RootedInstance& inst, const FractionalSolution& x,
                                    const ApproxConstants& consts, AssertionLog& log) {
  Zeta1Cover out;
  HeavyFlags flags = classify_heavy(inst, x, consts.zeta1);
  for (int a = 0; a < inst.arc_count(); ++a)
    if (flags.covered[a]) out.zeta1_arcs.push_back(a);
  out.contraction = contract_arcs(inst, out.zeta1_arcs);
  out.cover_cost = 0;
  if (out.zeta1_arcs.empty()) return out;

  // Contract the complement, scale x down by zeta1, split everything at its
  // apex and solve the resulting willow exactly.
  std::vector<int> complement;
  for (int a = 0; a < inst.arc_count(); ++a)
    if (!flags.covered[a]) complement.push_back(a);
  Contraction kc = contract_arcs(inst, complement);
  FractionalSolution scaled;
  for (const auto& [l, v] : x.entries()) {
    int img = kc.link_map[l];
    if (img >= 0) scaled.set(img, scaled.value(img) + v / consts.zeta1);
  }
  // Apex-split directly onto existing pairs (the contracted instance is
  // shadow-closed because the input universe was).
  FractionalSolution split_sol;
  std::map<std::pair<int, int>, int> pair_of;
  for (int l = 0; l < kc.inst.link_count(); ++l)
    pair_of[{kc.inst.links[l].tail, kc.inst.links[l].head}] = l;
  for (const auto& [l, v] : scaled.entries()) {
    const PathView& pv = kc.inst.link_path(l);
    if (pv.apex == kc.inst.links[l].tail || pv.apex == kc.inst.links[l].head) {
      split_sol.set(l, split_sol.value(l) + v);
      continue;
    }
    auto up = pair_of.find({kc.inst.links[l].tail, pv.apex});
    auto down = pair_of.find({pv.apex, kc.inst.links[l].head});
    if (up == pair_of.end() || down == pair_of.end())
      throw InstanceError(0, "zeta1 cover: apex shadow missing (universe not shadow-closed)");
    split_sol.set(up->second, split_sol.value(up->second) + v);
    split_sol.set(down->second, split_sol.value(down->second) + v);
  }

  std::vector<int> supp = split_sol.support();
  RootedInstance sub;
  sub.vertex_names = kc.inst.vertex_names;
  sub.root = kc.inst.root;
  sub.arcs = kc.inst.arcs;
  for (int l : supp) sub.links.push_back(kc.inst.links[l]);
  sub.finalize();
  WillowSolveResult wr = solve_willow(sub);
  log.require(wr.status == WillowSolveStatus::Solved, "zeta1 cover instance solves as a willow");
  for (int j : wr.links) out.cover_links.push_back(kc.link_rep[supp[j]]);
  std::sort(out.cover_links.begin(), out.cover_links.end());
  out.cover_links.erase(std::unique(out.cover_links.begin(), out.cover_links.end()), out.cover_links.end());
  for (int l : out.cover_links) out.cover_cost += inst.links[l].cost;
  log.require(out.cover_cost <= consts.eps * x.cost(inst), "zeta1 cover costs at most eps * c(x)");

  // F'' covers every contracted arc.
  std::set<int> covered;
  for (int l : out.cover_links)
    for (int a : inst.link_path(l).fwd_arcs) covered.insert(a);
  for (int a : out.zeta1_arcs)
    log.require(covered.count(a) > 0, "zeta1 cover covers every zeta1-covered arc");
  return out;
}

// --- phase 1 -------------------------------------------------------------------

namespace {

bool points_into(const RootedInstance& inst, int link, int v) {
  int t = inst.links[link].tail, h = inst.links[link].head;
  return h != v && inst.is_ancestor(v, h) && !inst.is_ancestor(v, t);
}

bool points_out(const RootedInstance& inst, int link, int v) {
  int t = inst.links[link].tail, h = inst.links[link].head;
  return t != v && inst.is_ancestor(v, t) && !inst.is_ancestor(v, h);
}

// mass of x on links whose forward coverage meets `arc_class` arcs of A_v
// visible in `vis`, excluding the pointing set
Rat charge_mass(const RootedInstance& inst, const FractionalSolution& x, const std::vector<int>& vis,
                bool up_class, int v, bool into) {
  std::vector<bool> visible(inst.arc_count(), false);
  for (int a : vis)
    if (inst.arc_is_up(a) == up_class) visible[a] = true;
  Rat total = 0;
  for (const auto& [l, xv] : x.entries()) {
    if (into ? points_into(inst, l, v) : points_out(inst, l, v)) continue;
    for (int a : inst.link_path(l).fwd_arcs)
      if (visible[a]) { total += xv; break; }
  }
  return total;
}

bool charge_set_member(const RootedInstance& inst, int link, const std::vector<int>& vis,
                       bool up_class, int v, bool into) {
  if (into ? points_into(inst, link, v) : points_out(inst, link, v)) return false;
  for (int a : inst.link_path(link).fwd_arcs) {
    if (inst.arc_is_up(a) != up_class) continue;
    if (std::find(vis.begin(), vis.end(), a) != vis.end()) return true;
  }
  return false;
}

}  // namespace

Phase1Result phase1_light_splitting(const Workspace& ws, const FractionalSolution& x,
                                    const ApproxConstants& consts, AssertionLog& log) {
  const RootedInstance& inst = ws.inst();
  Phase1Result res;
  res.x_star = x;
  res.supp_snapshot.resize(inst.n());

  std::vector<int> order;
  for (int v = 0; v < inst.n(); ++v)
    if (v != inst.root) order.push_back(v);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (inst.depth(a) != inst.depth(b)) return inst.depth(a) > inst.depth(b);
    return a < b;
  });

  for (int v : order) {
    res.supp_snapshot[v] = res.x_star.support();
    // up-light: x(L_v_down) <= gamma * x(visible up-charge set)
    Rat lhs_up = 0;
    for (const auto& [l, xv] : x.entries())
      if (points_into(inst, l, v)) lhs_up += xv;
    std::vector<int> vis = visible_arcs(inst, v, res.supp_snapshot[v]);
    if (lhs_up <= consts.gamma * charge_mass(inst, x, vis, true, v, true)) {
      std::vector<int> targets;
      for (int l : res.x_star.support())
        if (points_into(inst, l, v)) targets.push_back(l);
      Splitting sv = split_at_vertex(ws, v, targets);
      res.sigma_star = compose(sv, res.sigma_star);
      res.x_star = apply_splitting(ws, res.x_star, sv);
      res.w_up.push_back(v);
    }
    // down-light, with visibility w.r.t. the current (possibly split) support
    Rat lhs_down = 0;
    for (const auto& [l, xv] : x.entries())
      if (points_out(inst, l, v)) lhs_down += xv;
    std::vector<int> vis2 = visible_arcs(inst, v, res.x_star.support());
    if (lhs_down <= consts.gamma * charge_mass(inst, x, vis2, false, v, false)) {
      std::vector<int> targets;
      for (int l : res.x_star.support())
        if (points_out(inst, l, v)) targets.push_back(l);
      Splitting sv = split_at_vertex(ws, v, targets);
      res.sigma_star = compose(sv, res.sigma_star);
      res.x_star = apply_splitting(ws, res.x_star, sv);
      res.w_down.push_back(v);
    }
  }
  std::sort(res.w_up.begin(), res.w_up.end());
  std::sort(res.w_down.begin(), res.w_down.end());
  std::set<int> wstar(res.w_up.begin(), res.w_up.end());
  wstar.insert(res.w_down.begin(), res.w_down.end());
  wstar.insert(inst.root);
  res.w_star.assign(wstar.begin(), wstar.end());

  // (i) cost bound
  log.require(res.x_star.cost(inst) <= (1 + consts.eps) * x.cost(inst),
              "phase 1: c(x*) <= (1+eps) c(x)");
  // (ii) independence
  std::vector<int> supp = res.x_star.support();
  for (int v : res.w_up)
    log.require(is_up_independent(inst, v, supp), "phase 1: W_up vertices are up-independent");
  for (int v : res.w_down)
    log.require(is_down_independent(inst, v, supp), "phase 1: W_down vertices are down-independent");
  for (int v : res.w_star)
    log.require(is_up_independent(inst, v, supp) || is_down_independent(inst, v, supp),
                "phase 1: W* vertices are up- or down-independent");
  // charging: each link pays for at most one W_up and one W_down vertex
  for (int l = 0; l < inst.link_count(); ++l) {
    int up_hits = 0, down_hits = 0;
    for (int v : res.w_up) {
      std::vector<int> vis = visible_arcs(inst, v, res.supp_snapshot[v]);
      if (charge_set_member(inst, l, vis, true, v, true)) ++up_hits;
    }
    for (int v : res.w_down) {
      std::vector<int> vis = visible_arcs(inst, v, res.supp_snapshot[v]);
      if (charge_set_member(inst, l, vis, false, v, false)) ++down_hits;
    }
    log.require(up_hits <= 1, "phase 1: at most one W_up vertex charges a link");
    log.require(down_hits <= 1, "phase 1: at most one W_down vertex charges a link");
  }
  // (iii) width after splitting W*-cross-links at their apices
  std::vector<int> wcross;
  for (int l : supp) {
    const PathView& pv = inst.link_path(l);
    if (pv.apex == inst.links[l].tail || pv.apex == inst.links[l].head) continue;
    if (wstar.count(pv.apex)) wcross.push_back(l);
  }
  FractionalSolution xq = apply_splitting(ws, res.x_star, split_at_apex(ws, wcross));
  VisibilityReport rep = viwidth(inst, xq.support());
  HeavyFlags heavy = classify_heavy(inst, res.x_star, consts.zeta2);
  for (int v = 0; v < inst.n(); ++v) {
    log.require(viwidth_fwd(inst, rep, v) <= consts.k, "phase 1: forward visible width within k");
    int av = inst.parent_arc(v);
    if (av < 0 || !heavy.heavy[av])
      log.require(viwidth_bwd(inst, rep, v) <= consts.k,
                  "phase 1: backward visible width within k off heavy arcs");
  }
  return res;
}

// --- cores ---------------------------------------------------------------------

CoreStructure build_core_structure(const Workspace& ws, const FractionalSolution& x_star,
                                   const ApproxConstants& consts, AssertionLog& log) {
  const RootedInstance& inst = ws.inst();
  CoreStructure cs;
  cs.core_of_arc.assign(inst.arc_count(), -1);
  cs.up_core_of_vertex.assign(inst.n(), -1);
  cs.down_core_of_vertex.assign(inst.n(), -1);

  HeavyFlags flags = classify_heavy(inst, x_star, consts.zeta2);

  for (bool up : {true, false}) {
    // components of (V, A_up) resp. (V, A_down)
    std::vector<int> uf(inst.n());
    for (int v = 0; v < inst.n(); ++v) uf[v] = v;
    std::function<int(int)> find = [&](int v) {
      while (uf[v] != v) { uf[v] = uf[uf[v]]; v = uf[v]; }
      return v;
    };
    for (int a = 0; a < inst.arc_count(); ++a) {
      if (inst.arc_is_up(a) != up) continue;
      int x1 = find(inst.arcs[a].tail), y1 = find(inst.arcs[a].head);
      if (x1 != y1) uf[std::max(x1, y1)] = std::min(x1, y1);
    }
    std::map<int, std::vector<int>> heavy_by_comp;
    for (int a = 0; a < inst.arc_count(); ++a)
      if (inst.arc_is_up(a) == up && flags.heavy[a])
        heavy_by_comp[find(inst.arc_lower_vertex(a))].push_back(a);

    for (auto& [comp, heavy_arcs] : heavy_by_comp) {
      CoreStructure::Core core;
      core.up = up;
      // r_C: component vertex closest to the root
      core.root = -1;
      for (int v = 0; v < inst.n(); ++v)
        if (find(v) == comp && (core.root < 0 || inst.depth(v) < inst.depth(core.root)))
          core.root = v;
      // base arcs: heavy arcs with no heavy component arc below them
      for (int a : heavy_arcs) {
        bool base = true;
        for (int b : heavy_arcs)
          if (b != a && inst.arc_is_ancestor(a, b)) { base = false; break; }
        if (base) core.base_arcs.push_back(a);
      }
      std::sort(core.base_arcs.begin(), core.base_arcs.end(), [&](int a, int b) {
        int va = inst.arc_lower_vertex(a), vb = inst.arc_lower_vertex(b);
        if (inst.depth(va) != inst.depth(vb)) return inst.depth(va) < inst.depth(vb);
        return va < vb;
      });
      for (std::size_t i = 0; i < core.base_arcs.size(); ++i)
        for (std::size_t j = i + 1; j < core.base_arcs.size(); ++j)
          log.require(!inst.arc_is_ancestor(core.base_arcs[i], core.base_arcs[j]) &&
                          !inst.arc_is_ancestor(core.base_arcs[j], core.base_arcs[i]),
                      "cores: base arcs are ancestor-free");

      // core arcs/vertices and the trunk decomposition
      std::set<int> core_arcs, core_vertices{core.root};
      for (int b : core.base_arcs) {
        CoreStructure::Core::Trunk trunk;
        int v = inst.arc_lower_vertex(b);
        core_vertices.insert(v);
        while (v != core.root) {
          int arc = inst.parent_arc(v);
          trunk.arcs.push_back(arc);
          v = inst.parent(v);
          if (core_vertices.count(v)) break;  // first vertex of an earlier trunk (or r_C)
        }
        trunk.top_vertex = v;
        trunk.top_arc = trunk.arcs.back();
        for (int a : trunk.arcs) {
          core_arcs.insert(a);
          core_vertices.insert(inst.arc_lower_vertex(a));
          core_vertices.insert(inst.arc_upper_vertex(a));
        }
        core.trunks.push_back(std::move(trunk));
      }
      // sibling arc: in the parent trunk (the one containing a_{v_i}),
      // the arc reaching v_i from below
      for (auto& trunk : core.trunks) {
        if (trunk.top_vertex == core.root) continue;
        int above = inst.parent_arc(trunk.top_vertex);
        for (const auto& other : core.trunks) {
          if (&other == &trunk) continue;
          if (std::find(other.arcs.begin(), other.arcs.end(), above) == other.arcs.end()) continue;
          for (int a : other.arcs)
            if (inst.arc_upper_vertex(a) == trunk.top_vertex) trunk.sibling_arc = a;
          break;
        }
        log.require(trunk.sibling_arc >= 0, "cores: every non-root trunk has a sibling arc");
      }
      // trunks are arc-disjoint and union to the core
      std::set<int> union_check;
      for (const auto& t : core.trunks)
        for (int a : t.arcs)
          log.require(union_check.insert(a).second, "cores: trunks are arc-disjoint");
      log.require(union_check == core_arcs, "cores: trunk union equals the core");

      core.arcs.assign(core_arcs.begin(), core_arcs.end());
      core.vertices.assign(core_vertices.begin(), core_vertices.end());
      int id = static_cast<int>(cs.cores.size());
      for (int a : core.arcs) cs.core_of_arc[a] = id;
      for (int v : core.vertices)
        (up ? cs.up_core_of_vertex : cs.down_core_of_vertex)[v] = id;
      cs.cores.push_back(std::move(core));
    }
  }
  // every zeta2-heavy arc lies in its component's core
  for (int a = 0; a < inst.arc_count(); ++a)
    if (flags.heavy[a])
      log.require(cs.core_of_arc[a] >= 0, "cores: every heavy arc lies in a core");

  std::set<int> xs;
  for (const auto& c : cs.cores) xs.insert(c.vertices.begin(), c.vertices.end());
  cs.x_vertices.assign(xs.begin(), xs.end());
  return cs;
}

// --- phase 2 -------------------------------------------------------------------

Phase2Result phase2_core_splitting(const Workspace& ws, const FractionalSolution& x_star,
                                   const CoreStructure& cores, const ApproxConstants& consts,
                                   const FractionalSolution& x_base, AssertionLog& log) {
  const RootedInstance& inst = ws.inst();
  Phase2Result res;
  res.x_2star = x_star;

  auto split_cover_at = [&](int arc, int vertex) {
    std::vector<int> targets;
    for (int l : res.x_2star.support()) {
      const PathView& pv = inst.link_path(l);
      if (std::find(pv.fwd_arcs.begin(), pv.fwd_arcs.end(), arc) != pv.fwd_arcs.end())
        targets.push_back(l);
    }
    Splitting sv = split_at_vertex(ws, vertex, targets);
    res.sigma_2star = compose(sv, res.sigma_2star);
    res.x_2star = apply_splitting(ws, res.x_2star, sv);
  };

  for (const auto& core : cores.cores) {
    if (core.root != inst.root) split_cover_at(inst.parent_arc(core.root), core.root);
    for (const auto& trunk : core.trunks) {
      split_cover_at(trunk.top_arc, trunk.top_vertex);
      if (trunk.top_vertex != core.root) split_cover_at(trunk.sibling_arc, trunk.top_vertex);
    }
  }

  // (7.1)
  log.require(res.x_2star.cost(inst) <= (1 + consts.eps) * (1 + consts.eps) * x_base.cost(inst),
              "phase 2: c(x**) <= (1+eps)^2 c(x)");

  std::vector<int> supp = res.x_2star.support();
  auto in_core = [&](const CoreStructure::Core& c, int a) {
    return std::binary_search(c.arcs.begin(), c.arcs.end(), a);
  };
  for (const auto& core : cores.cores) {
    // (7.2)
    for (int l : supp) {
      const PathView& pv = inst.link_path(l);
      bool fwd = std::any_of(pv.fwd_arcs.begin(), pv.fwd_arcs.end(),
                             [&](int a) { return in_core(core, a); });
      bool bwd = std::any_of(pv.wrong_arcs.begin(), pv.wrong_arcs.end(),
                             [&](int a) { return in_core(core, a); });
      log.require(!(fwd && bwd), "phase 2: no support link covers a core in both directions");
    }
    // (7.3)
    for (int l : supp) {
      const PathView& pv = inst.link_path(l);
      bool enters = points_into(inst, l, core.root);
      bool leaves = points_out(inst, l, core.root);
      bool touches_core = std::any_of(pv.arcs.begin(), pv.arcs.end(),
                                      [&](int a) { return in_core(core, a); });
      if (core.up) {
        log.require(!leaves, "phase 2: no support link leaves an up-core root");
        if (enters) log.require(!touches_core, "phase 2: links entering r_C avoid the core");
      } else {
        log.require(!enters, "phase 2: no support link enters a down-core root");
        if (leaves) log.require(!touches_core, "phase 2: links leaving r_C avoid the core");
      }
    }
    // (7.4)
    for (int l : supp) {
      const PathView& pv = inst.link_path(l);
      for (int a : pv.fwd_arcs) {
        if (!in_core(core, a)) continue;
        if (inst.arc_upper_vertex(a) == core.root)
          log.require(inst.links[l].tail == core.root || inst.links[l].head == core.root,
                      "phase 2: covering a core arc at r_C forces r_C as an endpoint");
      }
    }
    // per-core mass lower bound (w.r.t. x*)
    Rat apex_mass = 0;
    for (const auto& [l, v] : x_star.entries())
      if (std::binary_search(core.vertices.begin(), core.vertices.end(), inst.link_path(l).apex))
        apex_mass += v;
    log.require(apex_mass >= (1 - consts.eps) * consts.zeta2 * Rat(static_cast<int>(core.base_arcs.size())),
                "phase 2: per-core apex mass lower bound");
  }
  return res;
}

// --- partition -----------------------------------------------------------------

LinkPartition partition_links(const Workspace& ws, const FractionalSolution& x_2star,
                              const std::vector<int>& w_star, const CoreStructure& cores,
                              AssertionLog& log) {
  const RootedInstance& inst = ws.inst();
  LinkPartition part;
  std::set<int> wx(w_star.begin(), w_star.end());
  wx.insert(cores.x_vertices.begin(), cores.x_vertices.end());

  auto fwd_core = [&](const PathView& pv) {
    for (int a : pv.fwd_arcs)
      if (cores.core_of_arc[a] >= 0) return cores.core_of_arc[a];
    return -1;
  };
  auto bwd_core = [&](const PathView& pv) {
    for (int a : pv.wrong_arcs)
      if (cores.core_of_arc[a] >= 0) return cores.core_of_arc[a];
    return -1;
  };

  for (int l : x_2star.support()) {
    const PathView& pv = inst.link_path(l);
    int fc = fwd_core(pv), bc = bwd_core(pv);
    log.require(!(fc >= 0 && bc >= 0), "partition: no support link is in both ->L and <-L");
    if (fc >= 0) {
      // the covered core is unique
      std::set<int> seen;
      for (int a : pv.fwd_arcs)
        if (cores.core_of_arc[a] >= 0) seen.insert(cores.core_of_arc[a]);
      log.require(seen.size() == 1, "partition: unique core per ->L link");
      part.fwd.push_back(l);
      part.core_of_fwd_link.push_back(fc);
      continue;
    }
    if (bc >= 0) {
      part.bwd.push_back(l);
      continue;
    }
    bool updown = pv.apex == inst.links[l].tail || pv.apex == inst.links[l].head;
    if (!updown && wx.count(pv.apex))
      part.cross.push_back(l);
    else
      part.rest.push_back(l);
  }

  // No shadow of a support link covers a core both ways.
  for (int l : x_2star.support()) {
    const PathView& pv = inst.link_path(l);
    for (std::size_t i = 0; i < pv.vertices.size(); ++i)
      for (std::size_t j = i + 1; j < pv.vertices.size(); ++j) {
        PathView sub = path_view(inst, pv.vertices[i], pv.vertices[j]);
        log.require(!(fwd_core(sub) >= 0 && bwd_core(sub) >= 0),
                    "partition: no shadow of a support link covers right and wrong");
      }
  }
  return part;
}

// --- best of three --------------------------------------------------------------

namespace {

struct SubInstance {
  RootedInstance inst;
  std::vector<int> to_ws;  // sub link id -> workspace link id
};

SubInstance make_sub(const Workspace& ws, std::vector<int> link_ids) {
  std::sort(link_ids.begin(), link_ids.end());
  SubInstance sub;
  sub.inst.vertex_names = ws.inst().vertex_names;
  sub.inst.root = ws.inst().root;
  sub.inst.arcs = ws.inst().arcs;
  for (int l : link_ids) sub.inst.links.push_back(ws.inst().links[l]);
  sub.to_ws = std::move(link_ids);
  sub.inst.finalize();
  return sub;
}

struct DpUniverse {
  RootedInstance inst;          // shadow-completed
  std::vector<int> rep_to_ws;   // completed link -> workspace link realizing its cost
};

DpUniverse completed_universe(const Workspace& ws, const std::vector<int>& link_ids) {
  SubInstance sub = make_sub(ws, link_ids);
  DpUniverse u;
  u.inst = shadow_complete(sub.inst);
  u.rep_to_ws.assign(u.inst.link_count(), -1);
  for (int j = 0; j < u.inst.link_count(); ++j) {
    const Link& lk = u.inst.links[j];
    for (std::size_t s = 0; s < sub.to_ws.size(); ++s) {
      const PathView& pv = sub.inst.link_path(static_cast<int>(s));
      if (sub.inst.links[s].cost != lk.cost) continue;
      int pt = -1, ph = -1;
      for (std::size_t i = 0; i < pv.vertices.size(); ++i) {
        if (pv.vertices[i] == lk.tail) pt = static_cast<int>(i);
        if (pv.vertices[i] == lk.head) ph = static_cast<int>(i);
      }
      if (pt >= 0 && ph > pt) { u.rep_to_ws[j] = sub.to_ws[s]; break; }
    }
    if (u.rep_to_ws[j] < 0) throw InstanceError(0, "DP universe: missing provenance (internal bug)");
  }
  return u;
}

}  // namespace

// --- oracle --------------------------------------------------------------------

OracleResult partial_separation_oracle(const RootedInstance& inst, const FractionalSolution& x,
                                       const Rat& eps_bar, long long k_request, AssertionLog& log) {
  // Rescale once so costs lie in [1, Delta]; everything below is scale-free.
  Rat cmin;
  bool first = true;
  for (const Link& l : inst.links) {
    if (first || l.cost < cmin) cmin = l.cost;
    first = false;
  }
  if (first) throw InstanceError(0, "oracle: instance has no links");
  RootedInstance scaled = inst;
  for (Link& l : scaled.links) l.cost /= cmin;
  scaled.finalize();
  ApproxConstants consts = ApproxConstants::from_internal_eps(
      rat_min(Rat(1), eps_bar) / 7, cost_ratio(scaled));
  consts.eps_bar = eps_bar;

  Workspace ws1(scaled);
  FractionalSolution xc;
  for (const auto& [l, v] : x.entries()) {
    int id = ws1.from_input(l);
    xc.set(id, xc.value(id) + v);
  }

  Zeta1Cover zc = contract_and_cover_zeta1(ws1.inst(), xc, consts, log);
  Workspace ws2(zc.contraction.inst);
  FractionalSolution x0;
  for (const auto& [l, v] : xc.entries()) {
    int img = zc.contraction.link_map[l];
    if (img < 0) continue;
    int id = ws2.from_input(img);
    x0.set(id, x0.value(id) + v);
  }
  {
    HeavyFlags check = classify_heavy(ws2.inst(), x0, consts.zeta1);
    for (int a = 0; a < ws2.inst().arc_count(); ++a)
      log.require(!check.covered[a], "oracle: no zeta1-covered arcs after contraction");
  }

  // lifting chains back to the input instance
  auto ws2_to_input = [&](int l2) {
    int completed = ws2.origin(l2);               // ws2 universe -> contracted instance link
    int ws1_link = zc.contraction.link_rep[completed];
    return ws1.origin(ws1_link);
  };

  Phase1Result p1 = phase1_light_splitting(ws2, x0, consts, log);
  CoreStructure cores = build_core_structure(ws2, p1.x_star, consts, log);
  Phase2Result p2 = phase2_core_splitting(ws2, p1.x_star, cores, consts, x0, log);
  LinkPartition part = partition_links(ws2, p2.x_2star, p1.w_star, cores, log);

  const RootedInstance& w2i = ws2.inst();

  // x1: split everything outside L_rest at its apex, then solve bounded-width DP
  std::vector<int> not_rest;
  not_rest.insert(not_rest.end(), part.cross.begin(), part.cross.end());
  not_rest.insert(not_rest.end(), part.fwd.begin(), part.fwd.end());
  not_rest.insert(not_rest.end(), part.bwd.begin(), part.bwd.end());
  Splitting sig_a = split_at_apex(ws2, not_rest);
  FractionalSolution x1 = apply_splitting(ws2, p2.x_2star, sig_a);
  Splitting sigma1 = compose(sig_a, compose(p2.sigma_2star, p1.sigma_star));
  Rat c_x1 = x1.cost(w2i);

  DpUniverse dpu = completed_universe(ws2, x1.support());
  VisibilityReport dpw = viwidth(dpu.inst);
  log.require(dpw.instance_width <= consts.k, "best-of-three: DP universe width within k");
  int n_dp = 2 * dpw.instance_width;
  DpResult dp = solve_n_thin(dpu.inst, n_dp);
  if (dp.status != DpStatus::Solved)
    throw InstanceError(0, "best-of-three: DP on the x1 universe failed (internal bug)");

  if (dp.cost > c_x1) {
    // violated visibly k-wide modification inequality
    OracleResult out;
    out.kind = OracleResult::Kind::Cut;
    ModificationInequality& cut = out.cut;
    cut.rhs = dp.cost * cmin;
    long long width_cert = std::max<long long>(dpw.instance_width, k_request);
    cut.k_wide = static_cast<int>(std::min<long long>(width_cert, std::numeric_limits<int>::max()));
    for (int a : zc.zeta1_arcs)
      cut.contracted_arcs.push_back({ws1.inst().arcs[a].tail, ws1.inst().arcs[a].head});
    cut.coeffs.assign(inst.link_count(), Rat(0));
    for (int l = 0; l < inst.link_count(); ++l) {
      int c1 = ws1.from_input(l);
      int img = zc.contraction.link_map[c1];
      if (img < 0) continue;  // fully contracted: cannot help cover surviving arcs
      int l2 = ws2.from_input(img);
      if (x0.in_support(l2)) {
        Rat w = 0;
        for (int p : sigma1.image(l2)) w += w2i.links[p].cost;
        cut.coeffs[l] = w * cmin;
      } else {
        cut.coeffs[l] = std::max(inst.links[l].cost, cut.rhs);
      }
    }
    for (const auto& [l2, pieces] : sigma1.entries()) {
      if (!x0.in_support(l2)) continue;
      std::vector<Link> to;
      for (int p : pieces) {
        Link piece = w2i.links[p];
        piece.cost *= cmin;
        to.push_back(piece);
      }
      Link from = w2i.links[l2];
      from.cost *= cmin;
      cut.sigma_dump.push_back({from, std::move(to)});
    }
    return out;
  }

  std::vector<int> s1;
  for (int j : dp.links) s1.push_back(dpu.rep_to_ws[j]);
  std::sort(s1.begin(), s1.end());
  s1.erase(std::unique(s1.begin(), s1.end()), s1.end());
  Rat c_s1 = 0;
  for (int l : s1) c_s1 += w2i.links[l].cost;
  log.require(c_s1 <= c_x1, "best-of-three: c(S1) <= c(x1)");

  // x2: split <-L and L_rest at apices; the support is a willow
  std::vector<int> bwd_rest;
  bwd_rest.insert(bwd_rest.end(), part.bwd.begin(), part.bwd.end());
  bwd_rest.insert(bwd_rest.end(), part.rest.begin(), part.rest.end());
  Splitting sig_b = split_at_apex(ws2, bwd_rest);
  FractionalSolution x2 = apply_splitting(ws2, p2.x_2star, sig_b);
  Rat c_x2 = x2.cost(w2i);
  SubInstance si2 = make_sub(ws2, x2.support());
  RecognitionResult rec2 = recognize_willow(si2.inst);
  log.require(rec2.willow, "best-of-three: the x2 support is a willow");
  WillowSolveResult w2 = solve_willow(si2.inst);
  log.require(w2.status == WillowSolveStatus::Solved, "best-of-three: willow solve of x2 support");
  std::vector<int> s2;
  for (int j : w2.links) s2.push_back(si2.to_ws[j]);
  log.require(w2.cost <= c_x2, "best-of-three: c(S2) <= c(x2)");

  // x3: three-way splits of ->L, apex splits of L_cross and L_rest
  Splitting sig_c;
  for (std::size_t i = 0; i < part.fwd.size(); ++i) {
    int l = part.fwd[i];
    const CoreStructure::Core& core = cores.cores[part.core_of_fwd_link[i]];
    const PathView& pv = w2i.link_path(l);
    auto in_core_v = [&](int v) {
      return std::binary_search(core.vertices.begin(), core.vertices.end(), v);
    };
    // walk from the apex toward the covered side; w is the lowest core vertex
    std::size_t apex_pos = 0;
    for (std::size_t i2 = 0; i2 < pv.vertices.size(); ++i2)
      if (pv.vertices[i2] == pv.apex) apex_pos = i2;
    log.require(in_core_v(pv.apex), "best-of-three: ->L apices lie in their core");
    int w = pv.apex;
    if (core.up) {
      for (std::size_t i2 = apex_pos; i2 < pv.vertices.size() && in_core_v(pv.vertices[i2]); ++i2)
        w = pv.vertices[i2];
    } else {
      for (std::size_t i2 = apex_pos + 1; i2-- > 0;) {
        if (!in_core_v(pv.vertices[i2])) break;
        w = pv.vertices[i2];
      }
    }
    sig_c.set_image(l, split_link_at(ws2, l, {pv.apex, w}));
  }
  for (int l : part.cross) {
    const PathView& pv = w2i.link_path(l);
    if (pv.apex != w2i.links[l].tail && pv.apex != w2i.links[l].head)
      sig_c.set_image(l, split_link_at(ws2, l, {pv.apex}));
  }
  for (int l : part.rest) {
    const PathView& pv = w2i.link_path(l);
    if (pv.apex != w2i.links[l].tail && pv.apex != w2i.links[l].head)
      sig_c.set_image(l, split_link_at(ws2, l, {pv.apex}));
  }
  FractionalSolution x3 = apply_splitting(ws2, p2.x_2star, sig_c);
  Rat c_x3 = x3.cost(w2i);

  // block structure: core columns are pure up-/down-link columns confined to
  // their core's rows, and non-core columns avoid core rows
  for (int l : x3.support()) {
    const PathView& pv = w2i.link_path(l);
    int core_id = -1;
    bool mixed = false;
    for (int a : pv.fwd_arcs) {
      int c = cores.core_of_arc[a];
      if (c >= 0 && core_id >= 0 && c != core_id) mixed = true;
      if (c >= 0) core_id = c;
    }
    log.require(!mixed, "best-of-three: x3 columns touch at most one core");
    if (core_id >= 0) {
      bool updown = pv.apex == w2i.links[l].tail || pv.apex == w2i.links[l].head;
      log.require(updown, "best-of-three: core columns of x3 are up- or down-links");
      for (int a : pv.fwd_arcs)
        log.require(cores.core_of_arc[a] == core_id,
                    "best-of-three: core columns stay inside their block");
    }
  }
  SubInstance si3 = make_sub(ws2, x3.support());
  LpOutcome lp3 = solve_lp(si3.inst);
  log.require(lp3.status == LpStatus::Optimal, "best-of-three: x3 LP solvable");
  IntegralityResult ir3 = assert_integral(lp3.solution);
  log.require(ir3.integral, "best-of-three: x3 LP vertex is integral (TU)");
  std::vector<int> s3;
  for (int j : ir3.links) s3.push_back(si3.to_ws[j]);
  log.require(lp3.objective <= c_x3, "best-of-three: c(S3) <= c(x3)");

  Rat c_s2 = w2.cost, c_s3 = lp3.objective;
  Rat best = c_s1;
  const std::vector<int>* chosen = &s1;
  if (c_s2 < best) { best = c_s2; chosen = &s2; }
  if (c_s3 < best) { best = c_s3; chosen = &s3; }
  Rat combo = Rat(1, 4) * c_x1 + Rat(1, 2) * c_x2 + Rat(1, 4) * c_x3;
  log.require(best <= combo, "best-of-three: c(S*) <= the 1/4,1/2,1/4 combination");
  log.require(combo <= Rat(7, 4) * p2.x_2star.cost(w2i),
              "best-of-three: combination <= 7/4 c(x**)");

  // assemble S = S* lifted + F''
  std::set<int> final_links;
  for (int l : *chosen) final_links.insert(ws2_to_input(l));
  for (int l : zc.cover_links) final_links.insert(ws1.origin(l));

  OracleResult out;
  out.kind = OracleResult::Kind::Solution;
  out.links.assign(final_links.begin(), final_links.end());
  out.cost = 0;
  for (int l : out.links) out.cost += inst.links[l].cost;
  // feasibility of S on the input instance
  std::vector<bool> covered(inst.arc_count(), false);
  for (int l : out.links)
    for (int a : inst.link_path(l).fwd_arcs) covered[a] = true;
  log.require(std::all_of(covered.begin(), covered.end(), [](bool b) { return b; }),
              "oracle: assembled solution is feasible");
  Rat budget = (Rat(7, 4) + eps_bar) * x.cost(inst);
  log.require(out.cost <= budget, "oracle: c(S) <= (1.75 + eps_bar) c(x)");
  return out;
}

// --- drivers -------------------------------------------------------------------

Approx2Result approx_2(const RootedInstance& inst) {
  Approx2Result res;
  if (!is_feasible(inst)) return res;
  std::set<int> chosen;
  for (bool contract_up : {true, false}) {
    std::vector<int> arcs;
    for (int a = 0; a < inst.arc_count(); ++a)
      if (inst.arc_is_up(a) == contract_up) arcs.push_back(a);
    Contraction c = contract_arcs(inst, arcs);
    if (c.inst.arc_count() == 0) continue;
    WillowSolveResult w = solve_willow(c.inst);
    if (w.status != WillowSolveStatus::Solved) {
      if (w.status == WillowSolveStatus::Infeasible) return res;
      throw InstanceError(0, "approx_2: arborescence side did not solve integrally (internal bug)");
    }
    for (int l : w.links) chosen.insert(c.link_rep[l]);
  }
  res.feasible = true;
  res.links.assign(chosen.begin(), chosen.end());
  res.cost = 0;
  for (int l : res.links) res.cost += inst.links[l].cost;
  return res;
}

namespace {

std::vector<ExtraConstraint> cuts_to_constraints(const std::vector<ModificationInequality>& cuts) {
  std::vector<ExtraConstraint> extra;
  for (const auto& cut : cuts) {
    ExtraConstraint ec;
    for (std::size_t l = 0; l < cut.coeffs.size(); ++l)
      if (cut.coeffs[l] != 0) ec.coeffs.push_back({static_cast<int>(l), cut.coeffs[l]});
    ec.rhs = cut.rhs;
    extra.push_back(std::move(ec));
  }
  return extra;
}

}  // namespace

ApproxOutcome approx_175(const RootedInstance& inst, const Rat& eps_user, const std::string& mode,
                         long long k_override, int max_cuts) {
  ApproxOutcome out;
  out.mode = mode;
  if (!is_feasible(inst)) return out;
  AssertionLog log;
  Rat eps_bar = rat_min(Rat(1), eps_user / 10);
  std::vector<ModificationInequality> cuts;

  auto finish_with = [&](const std::vector<int>& links, const Rat& lower) {
    out.feasible = true;
    out.links = links;
    out.cost = 0;
    for (int l : out.links) out.cost += inst.links[l].cost;
    out.lp_lower_bound = lower;
    out.cuts_emitted = static_cast<int>(cuts.size());
    out.cuts = cuts;
    out.assertions_checked = log.checked;
  };

  if (mode == "engineering") {
    Rat lower = 0;
    for (int round = 0; round <= max_cuts; ++round) {
      LpOutcome lp = solve_lp(inst, cuts_to_constraints(cuts));
      if (lp.status != LpStatus::Optimal)
        throw InstanceError(0, "approx_175: master LP infeasible despite valid cuts (internal bug)");
      lower = lp.objective;
      OracleResult res = partial_separation_oracle(inst, lp.solution, eps_bar, k_override, log);
      if (res.kind == OracleResult::Kind::Solution) {
        finish_with(res.links, lower);
        return out;
      }
      cuts.push_back(std::move(res.cut));
    }
    Approx2Result fb = approx_2(inst);
    if (!fb.feasible) return out;
    finish_with(fb.links, lower);
    out.fallback_2approx = true;
    return out;
  }

  // theoretical mode: binary search over (1+eps_bar)^e with cost caps
  Rat delta = cost_ratio(inst);
  Rat cmin;
  bool first = true;
  for (const Link& l : inst.links) {
    if (first || l.cost < cmin) cmin = l.cost;
    first = false;
  }
  Rat base = 1 + eps_bar;
  Rat upper = Rat(inst.n()) * Rat(inst.n()) * delta;  // scaled OPT <= n^2 Delta
  int m_exp = 0;
  Rat pw = 1;
  while (pw < upper) { pw *= base; ++m_exp; }

  ApproxConstants consts = ApproxConstants::derive(eps_user, delta);

  enum class Probe { Solution, TooLow, Budget };
  std::vector<int> probe_links;
  auto probe = [&](int exponent) {
    Rat cap_scaled = 1;
    for (int i = 0; i < exponent; ++i) cap_scaled *= base;
    Rat cap = cap_scaled * (1 + eps_bar) * cmin;  // back to instance scale
    for (int round = 0; round <= max_cuts; ++round) {
      LpOutcome lp = solve_lp(inst, cuts_to_constraints(cuts), cap);
      if (lp.status != LpStatus::Optimal) return Probe::TooLow;
      OracleResult res = partial_separation_oracle(inst, lp.solution, eps_bar, consts.k, log);
      if (res.kind == OracleResult::Kind::Solution) {
        probe_links = res.links;
        return Probe::Solution;
      }
      cuts.push_back(std::move(res.cut));
    }
    return Probe::Budget;
  };

  std::optional<std::vector<int>> best_links;
  Rat best_cost;
  auto consider = [&]() {
    Rat cost = 0;
    for (int l : probe_links) cost += inst.links[l].cost;
    if (!best_links || cost < best_cost) {
      best_links = probe_links;
      best_cost = cost;
    }
  };

  int lo = 0, hi = m_exp;
  Probe top = probe(hi);
  if (top == Probe::Budget) {
    Approx2Result fb = approx_2(inst);
    if (!fb.feasible) return out;
    finish_with(fb.links, cmin);
    out.fallback_2approx = true;
    return out;
  }
  if (top == Probe::Solution) consider();
  while (lo < hi) {
    int mid = (lo + hi) / 2;
    Probe r = probe(mid);
    if (r == Probe::Solution) {
      consider();
      hi = mid;
    } else if (r == Probe::TooLow) {
      lo = mid + 1;
    } else {
      break;  // budget: keep the best solution found so far
    }
  }
  if (!best_links) {
    Approx2Result fb = approx_2(inst);
    if (!fb.feasible) return out;
    finish_with(fb.links, cmin);
    out.fallback_2approx = true;
    return out;
  }
  // The final lower bound certificate: (1+eps_bar)^lo * cmin <= OPT.
  Rat lower = cmin;
  for (int i = 0; i < lo; ++i) lower *= base;
  finish_with(*best_links, lower);
  return out;
}

}  // namespace dtap
