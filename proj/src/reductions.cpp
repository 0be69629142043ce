#include "dtap/reductions.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "dtap/lp.hpp"

namespace dtap {

void Multi2TapInstance::validate() const {
  if (n() == 0) throw InstanceError(0, "empty multi 2-TAP instance");
  if (static_cast<int>(edges.size()) != n() - 1) throw InstanceError(0, "non-tree edge count");
  std::vector<std::vector<int>> adj(n());
  for (const Edge& e : edges) {
    if (e.u < 0 || e.u >= n() || e.v < 0 || e.v >= n() || e.u == e.v)
      throw InstanceError(0, "bad edge");
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<bool> seen(n(), false);
  std::queue<int> bfs;
  bfs.push(0);
  seen[0] = true;
  int count = 1;
  while (!bfs.empty()) {
    int x = bfs.front();
    bfs.pop();
    for (int y : adj[x])
      if (!seen[y]) { seen[y] = true; ++count; bfs.push(y); }
  }
  if (count != n()) throw InstanceError(0, "edge set is not a tree");
}

BiDirectedCoverInstance m2tap_to_bidirected(const Multi2TapInstance& inst) {
  inst.validate();
  BiDirectedCoverInstance out;
  out.vertex_names = inst.vertex_names;
  out.edges = inst.edges;
  for (const auto& l : inst.links) {
    out.links.push_back({l.u, l.v, l.cost});
    out.links.push_back({l.v, l.u, l.cost});
  }
  return out;
}

WdtapFromBidirected bidirected_to_wdtap(const BiDirectedCoverInstance& inst) {
  WdtapFromBidirected out;
  // The free tier sits below the resolution of the input cost grid:
  // 1 / (2 * (#links + 1) * lcm of the positive-cost denominators).
  Int lcm = 1;
  for (const auto& l : inst.links)
    if (l.cost > 0) lcm = boost::multiprecision::lcm(lcm, denominator(l.cost));
  out.free_tier_cost = Rat(1, 2 * Int(static_cast<int>(inst.links.size()) + 1) * lcm);

  InstanceBuilder b;
  std::set<std::string> taken(inst.vertex_names.begin(), inst.vertex_names.end());
  auto mid_name = [&](std::size_t i) {
    std::string name = "m" + std::to_string(i);
    while (taken.count(name)) name += "_";
    taken.insert(name);
    return name;
  };
  b.set_root(inst.vertex_names.empty() ? "r" : inst.vertex_names[0]);
  for (std::size_t i = 0; i < inst.edges.size(); ++i) {
    std::string mid = mid_name(i);
    // Both halves point into the midpoint: covering (u,mid) needs a link
    // entering u's shore, covering (v,mid) one leaving it.
    b.add_arc(inst.vertex_names[inst.edges[i].u], mid);
    b.add_arc(inst.vertex_names[inst.edges[i].v], mid);
  }
  for (std::size_t i = 0; i < inst.links.size(); ++i) {
    const auto& l = inst.links[i];
    Rat cost = l.cost > 0 ? l.cost : out.free_tier_cost;
    b.add_link(inst.vertex_names[l.tail], inst.vertex_names[l.head], cost);
  }
  std::vector<std::string> warnings;
  out.inst = b.build(&warnings);
  // Normalization keeps one link per ordered pair; map each input link to it.
  out.link_origin.assign(out.inst.link_count(), -1);
  out.free_tier.assign(out.inst.link_count(), false);
  for (int j = 0; j < out.inst.link_count(); ++j) {
    const Link& lk = out.inst.links[j];
    for (std::size_t i = 0; i < inst.links.size(); ++i) {
      const auto& l = inst.links[i];
      Rat cost = l.cost > 0 ? l.cost : out.free_tier_cost;
      if (out.inst.name(lk.tail) == inst.vertex_names[l.tail] &&
          out.inst.name(lk.head) == inst.vertex_names[l.head] && lk.cost == cost) {
        out.link_origin[j] = static_cast<int>(i);
        out.free_tier[j] = !(l.cost > 0);
        break;
      }
    }
  }
  return out;
}

BidirectedFromWdtap wdtap_to_bidirected(const RootedInstance& inst) {
  BidirectedFromWdtap out;
  out.inst.vertex_names = inst.vertex_names;
  for (const auto& a : inst.arcs) out.inst.edges.push_back({a.tail, a.head});
  for (const Link& l : inst.links) out.inst.links.push_back({l.tail, l.head, l.cost});
  for (const auto& a : inst.arcs) {
    out.inst.links.push_back({a.tail, a.head, Rat(0)});
    ++out.zero_cost_links;
  }
  return out;
}

namespace {

// For each edge: the vertex set of the component of T - e containing edge.u.
std::vector<std::vector<bool>> edge_shores(const Multi2TapInstance& inst) {
  std::vector<std::vector<int>> adj(inst.n());
  for (std::size_t i = 0; i < inst.edges.size(); ++i) {
    adj[inst.edges[i].u].push_back(static_cast<int>(i));
    adj[inst.edges[i].v].push_back(static_cast<int>(i));
  }
  std::vector<std::vector<bool>> shores;
  for (std::size_t e = 0; e < inst.edges.size(); ++e) {
    std::vector<bool> side(inst.n(), false);
    std::queue<int> bfs;
    bfs.push(inst.edges[e].u);
    side[inst.edges[e].u] = true;
    while (!bfs.empty()) {
      int x = bfs.front();
      bfs.pop();
      for (int ei : adj[x]) {
        if (ei == static_cast<int>(e)) continue;
        const auto& ed = inst.edges[ei];
        int y = ed.u == x ? ed.v : ed.u;
        if (!side[y]) { side[y] = true; bfs.push(y); }
      }
    }
    shores.push_back(std::move(side));
  }
  return shores;
}

}  // namespace

std::optional<std::vector<BiDirectedCoverInstance::DLink>> orient_2cover(
    const Multi2TapInstance& inst, const std::vector<int>& cover_multiset) {
  inst.validate();
  auto shores = edge_shores(inst);
  // Precondition: F covers every cut at least twice.
  for (std::size_t e = 0; e < inst.edges.size(); ++e) {
    int crossings = 0;
    for (int li : cover_multiset) {
      const auto& l = inst.links[li];
      if (shores[e][l.u] != shores[e][l.v]) ++crossings;
    }
    if (crossings < 2) return std::nullopt;
  }

  const int m = static_cast<int>(cover_multiset.size());
  // Initial orientation H: link copy i points u -> v. Variable x_i flips it.
  GeneralLp lp;
  lp.num_vars = m;
  lp.objective.assign(m, Rat(1));
  for (std::size_t e = 0; e < inst.edges.size(); ++e) {
    // out-degree and in-degree of the shore under H, corrected by flips
    GeneralLp::Row out_row, in_row;
    int out_const = 0, in_const = 0;
    for (int i = 0; i < m; ++i) {
      const auto& l = inst.links[cover_multiset[i]];
      bool u_in = shores[e][l.u], v_in = shores[e][l.v];
      if (u_in == v_in) continue;
      if (u_in) {  // leaves the shore under H
        ++out_const;
        out_row.coeffs.push_back({i, Rat(-1)});
        in_row.coeffs.push_back({i, Rat(1)});
      } else {  // enters the shore under H
        ++in_const;
        in_row.coeffs.push_back({i, Rat(-1)});
        out_row.coeffs.push_back({i, Rat(1)});
      }
    }
    out_row.rhs = Rat(1 - out_const);
    out_row.sense = GeneralLp::GE;
    in_row.rhs = Rat(1 - in_const);
    in_row.sense = GeneralLp::GE;
    lp.rows.push_back(std::move(out_row));
    lp.rows.push_back(std::move(in_row));
  }
  for (int i = 0; i < m; ++i) {
    GeneralLp::Row box;
    box.coeffs.push_back({i, Rat(1)});
    box.rhs = 1;
    box.sense = GeneralLp::LE;
    lp.rows.push_back(std::move(box));
  }

  std::vector<bool> flip(m, false);
  GeneralLpResult res = solve_general_lp(lp);
  bool have = false;
  if (res.status == LpStatus::Optimal) {
    have = true;
    for (int i = 0; i < m; ++i) {
      if (res.x[i] == 1)
        flip[i] = true;
      else if (res.x[i] != 0)
        have = false;  // non-integral vertex: fall back below
    }
  }
  if (!have) {
    // Exhaustive fallback; never observed, kept as a safety net.
    for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
      for (int i = 0; i < m; ++i) flip[i] = (mask >> i) & 1;
      bool ok = true;
      for (std::size_t e = 0; e < inst.edges.size() && ok; ++e) {
        int outd = 0, ind = 0;
        for (int i = 0; i < m; ++i) {
          const auto& l = inst.links[cover_multiset[i]];
          bool u_in = shores[e][l.u], v_in = shores[e][l.v];
          if (u_in == v_in) continue;
          bool leaves = flip[i] ? !u_in : u_in;
          (leaves ? outd : ind) += 1;
        }
        ok = outd >= 1 && ind >= 1;
      }
      if (ok) { have = true; break; }
    }
    if (!have) return std::nullopt;
  }

  std::vector<BiDirectedCoverInstance::DLink> oriented;
  for (int i = 0; i < m; ++i) {
    const auto& l = inst.links[cover_multiset[i]];
    if (flip[i])
      oriented.push_back({l.v, l.u, l.cost});
    else
      oriented.push_back({l.u, l.v, l.cost});
  }
  // Certify shore by shore.
  for (std::size_t e = 0; e < inst.edges.size(); ++e) {
    int outd = 0, ind = 0;
    for (const auto& l : oriented) {
      bool t_in = shores[e][l.tail], h_in = shores[e][l.head];
      if (t_in && !h_in) ++outd;
      if (!t_in && h_in) ++ind;
    }
    if (outd < 1 || ind < 1)
      throw InstanceError(0, "orient_2cover: certification failed (internal bug)");
  }
  return oriented;
}

ThreeDmInstance gen_3dm_instance(const std::vector<std::array<int, 3>>& triples, int q) {
  ThreeDmInstance out;
  out.p = static_cast<int>(triples.size());
  out.q = q;
  out.target = out.p + out.q;
  for (const auto& t : triples)
    if (t[0] < 1 || t[0] > q || t[1] < 1 || t[1] > q || t[2] < 1 || t[2] > q)
      throw InstanceError(0, "gen_3dm_instance: triple index out of range");
  InstanceBuilder b;
  b.set_root("r");
  auto w = [](int i) { return "w" + std::to_string(i); };
  auto xx = [](int i) { return "x" + std::to_string(i); };
  auto y = [](int i) { return "y" + std::to_string(i); };
  auto ga = [](const std::array<int, 3>& t) {
    return "a" + std::to_string(t[0]) + "_" + std::to_string(t[1]) + "_" + std::to_string(t[2]);
  };
  auto gap = [&](const std::array<int, 3>& t) { return ga(t) + "p"; };
  for (int i = 1; i <= q; ++i) {
    b.add_arc("r", xx(i));
    b.add_arc("r", w(i));
    b.add_arc(y(i), "r");
  }
  for (const auto& t : triples) {
    b.add_arc(ga(t), w(t[0]));
    b.add_arc(w(t[0]), gap(t));
  }
  for (const auto& t : triples) {
    b.add_link(xx(t[1]), ga(t), Rat(1));
    b.add_link(gap(t), ga(t), Rat(1));
    b.add_link(gap(t), y(t[2]), Rat(1));
  }
  out.inst = b.build();
  return out;
}

RootedInstance integrality_gap_instance() {
  InstanceBuilder b;
  b.set_root("a");
  b.add_arc("b", "a");
  b.add_arc("c", "b");
  b.add_arc("b", "e");
  b.add_arc("e", "d");
  b.add_arc("f", "e");
  b.add_link("a", "c", Rat(1));
  b.add_link("d", "b", Rat(1));
  b.add_link("e", "c", Rat(1));
  b.add_link("a", "f", Rat(1));
  b.add_link("d", "f", Rat(1));
  return b.build();
}

}  // namespace dtap
