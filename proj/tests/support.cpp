#include "support.hpp"

#include <algorithm>
#include <queue>
#include <random>

namespace dtap::test {

std::vector<int> bfs_path(const RootedInstance& inst, int u, int v) {
  std::vector<std::vector<int>> adj(inst.n());
  for (const auto& a : inst.arcs) {
    adj[a.tail].push_back(a.head);
    adj[a.head].push_back(a.tail);
  }
  std::vector<int> prev(inst.n(), -2);
  std::queue<int> q;
  q.push(u);
  prev[u] = -1;
  while (!q.empty()) {
    int x = q.front();
    q.pop();
    for (int y : adj[x])
      if (prev[y] == -2) {
        prev[y] = x;
        q.push(y);
      }
  }
  std::vector<int> path;
  for (int x = v; x != -1; x = prev[x]) path.push_back(x);
  std::reverse(path.begin(), path.end());
  return path;
}

bool covers_all_arcs(const RootedInstance& inst, const std::vector<int>& links) {
  std::vector<bool> covered(inst.arc_count(), false);
  for (int l : links)
    for (int a : inst.link_path(l).fwd_arcs) covered[a] = true;
  return std::all_of(covered.begin(), covered.end(), [](bool b) { return b; });
}

ExhaustiveResult exhaustive_opt(const RootedInstance& inst) {
  ExhaustiveResult res;
  int m = inst.link_count();
  if (m > 24) throw InstanceError(0, "exhaustive_opt: too many links");
  for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
    std::vector<int> set;
    Rat cost = 0;
    for (int l = 0; l < m; ++l)
      if ((mask >> l) & 1) {
        set.push_back(l);
        cost += inst.links[l].cost;
      }
    if (res.feasible && cost >= res.cost) continue;
    if (!covers_all_arcs(inst, set)) continue;
    res.feasible = true;
    res.cost = cost;
    res.links = set;
  }
  return res;
}

bool visible_by_definition(const RootedInstance& inst, int v, int arc, const std::vector<int>& link_set) {
  // a in A_v?
  int lower = inst.arc_lower_vertex(arc);
  if (lower == v || !inst.is_ancestor(v, lower)) return false;
  for (int l : link_set) {
    const PathView& pv = inst.link_path(l);
    if (std::find(pv.fwd_arcs.begin(), pv.fwd_arcs.end(), arc) == pv.fwd_arcs.end()) continue;
    PathView bar = generic_shadow_path(inst, inst.links[l]);
    for (std::size_t i = 1; i + 1 < bar.vertices.size(); ++i)
      if (bar.vertices[i] == v) return true;
  }
  return false;
}

int max_ancestor_free_bruteforce(const RootedInstance& inst, const std::vector<int>& arcs) {
  int m = static_cast<int>(arcs.size());
  int best = 0;
  for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
    std::vector<int> set;
    for (int i = 0; i < m; ++i)
      if ((mask >> i) & 1) set.push_back(arcs[i]);
    bool free = true;
    for (int a : set)
      for (int b : set)
        if (a != b && inst.arc_is_ancestor(a, b)) free = false;
    if (free) best = std::max(best, static_cast<int>(set.size()));
  }
  return best;
}

namespace {

std::vector<std::vector<bool>> m2tap_shores(const Multi2TapInstance& inst) {
  std::vector<std::vector<int>> adj(inst.n());
  for (std::size_t i = 0; i < inst.edges.size(); ++i) {
    adj[inst.edges[i].u].push_back(static_cast<int>(i));
    adj[inst.edges[i].v].push_back(static_cast<int>(i));
  }
  std::vector<std::vector<bool>> shores;
  for (std::size_t e = 0; e < inst.edges.size(); ++e) {
    std::vector<bool> side(inst.n(), false);
    std::queue<int> q;
    q.push(inst.edges[e].u);
    side[inst.edges[e].u] = true;
    while (!q.empty()) {
      int x = q.front();
      q.pop();
      for (int ei : adj[x]) {
        if (ei == static_cast<int>(e)) continue;
        int y = inst.edges[ei].u == x ? inst.edges[ei].v : inst.edges[ei].u;
        if (!side[y]) {
          side[y] = true;
          q.push(y);
        }
      }
    }
    shores.push_back(std::move(side));
  }
  return shores;
}

}  // namespace

TwoCoverResult brute_force_2cover(const Multi2TapInstance& inst) {
  TwoCoverResult res;
  auto shores = m2tap_shores(inst);
  int m = static_cast<int>(inst.links.size());
  // multiplicity in {0,1,2} per link, encoded base 3
  std::uint64_t states = 1;
  for (int i = 0; i < m; ++i) states *= 3;
  for (std::uint64_t code = 0; code < states; ++code) {
    std::uint64_t c = code;
    std::vector<int> mult(m);
    Rat cost = 0;
    for (int i = 0; i < m; ++i) {
      mult[i] = static_cast<int>(c % 3);
      c /= 3;
      cost += inst.links[i].cost * mult[i];
    }
    if (res.feasible && cost >= res.cost) continue;
    bool ok = true;
    for (std::size_t e = 0; e < inst.edges.size() && ok; ++e) {
      int crossings = 0;
      for (int i = 0; i < m; ++i)
        if (shores[e][inst.links[i].u] != shores[e][inst.links[i].v]) crossings += mult[i];
      ok = crossings >= 2;
    }
    if (!ok) continue;
    res.feasible = true;
    res.cost = cost;
    res.multiset.clear();
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < mult[i]; ++k) res.multiset.push_back(i);
  }
  return res;
}

BiCoverResult brute_force_bidirected(const BiDirectedCoverInstance& inst) {
  BiCoverResult res;
  Multi2TapInstance shell;
  shell.vertex_names = inst.vertex_names;
  shell.edges = inst.edges;
  auto shores = m2tap_shores(shell);
  int m = static_cast<int>(inst.links.size());
  if (m > 22) throw InstanceError(0, "brute_force_bidirected: too many links");
  for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
    Rat cost = 0;
    for (int i = 0; i < m; ++i)
      if ((mask >> i) & 1) cost += inst.links[i].cost;
    if (res.feasible && cost >= res.cost) continue;
    bool ok = true;
    for (std::size_t e = 0; e < inst.edges.size() && ok; ++e) {
      int outd = 0, ind = 0;
      for (int i = 0; i < m; ++i) {
        if (!((mask >> i) & 1)) continue;
        bool t_in = shores[e][inst.links[i].tail], h_in = shores[e][inst.links[i].head];
        if (t_in && !h_in) ++outd;
        if (!t_in && h_in) ++ind;
      }
      ok = outd >= 1 && ind >= 1;
    }
    if (!ok) continue;
    res.feasible = true;
    res.cost = cost;
    res.links.clear();
    for (int i = 0; i < m; ++i)
      if ((mask >> i) & 1) res.links.push_back(i);
  }
  return res;
}

Multi2TapInstance random_m2tap(int n, int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Multi2TapInstance inst;
  for (int v = 0; v < n; ++v) inst.vertex_names.push_back("u" + std::to_string(v));
  for (int v = 1; v < n; ++v)
    inst.edges.push_back({static_cast<int>(rng() % v), v});
  // two parallel copies per edge keep every cut 2-coverable
  for (const auto& e : inst.edges) {
    Rat c = Rat(1) + Rat(static_cast<int>(rng() % 12), 4);
    inst.links.push_back({e.u, e.v, c});
  }
  for (int i = 0; i < m; ++i) {
    int u = static_cast<int>(rng() % n);
    int v = static_cast<int>(rng() % n);
    if (u == v) continue;
    Rat c = Rat(1) + Rat(static_cast<int>(rng() % 12), 4);
    inst.links.push_back({u, v, c});
  }
  // ensure 2-coverability: a second copy of every tree edge link
  for (const auto& e : inst.edges) {
    Rat c = Rat(1) + Rat(static_cast<int>(rng() % 12), 4);
    inst.links.push_back({e.u, e.v, c});
  }
  return inst;
}

}  // namespace dtap::test
