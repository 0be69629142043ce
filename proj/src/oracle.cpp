#include "dtap/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace dtap {

namespace {

std::uint64_t rnd_below(std::mt19937_64& rng, std::uint64_t bound) {
  return bound == 0 ? 0 : rng() % bound;  // deterministic across platforms
}

int rnd_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rnd_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

bool rnd_prob(std::mt19937_64& rng, double p) {
  return static_cast<double>(rng() >> 11) / 9007199254740992.0 < p;  // 2^53
}

Rat rnd_cost(std::mt19937_64& rng, const Rat& hi) {
  // 25-point rational grid in [1, hi]
  int k = rnd_int(rng, 0, 24);
  return Rat(1) + (hi - 1) * Rat(k, 24);
}

}  // namespace

BruteResult brute_force_opt(const RootedInstance& inst, std::uint64_t budget) {
  BruteResult result;
  const int na = inst.arc_count();
  CoverageMatrix m = build_matrix(inst);
  for (int a = 0; a < na; ++a)
    if (m.row_links[a].empty()) return result;  // Infeasible

  // Candidates: links with nonempty coverage, branch order by density.
  std::vector<int> useful;
  for (int l = 0; l < inst.link_count(); ++l)
    if (!m.col_arcs[l].empty()) useful.push_back(l);
  std::vector<Rat> density(inst.link_count());
  for (int l : useful) density[l] = inst.links[l].cost / Rat(static_cast<int>(m.col_arcs[l].size()));
  std::vector<std::vector<int>> covers(na);
  for (int a = 0; a < na; ++a) {
    covers[a] = m.row_links[a];
    std::sort(covers[a].begin(), covers[a].end(), [&](int x, int y) {
      if (density[x] != density[y]) return density[x] < density[y];
      return x < y;
    });
  }
  std::vector<Rat> arc_bound(na);  // per-arc density lower bound
  for (int a = 0; a < na; ++a) {
    arc_bound[a] = density[covers[a][0]];
    for (int l : covers[a]) arc_bound[a] = std::min(arc_bound[a], density[l]);
  }

  LpOutcome lp = solve_lp(inst);
  Rat lp_bound = lp.status == LpStatus::Optimal ? lp.objective : Rat(0);

  std::vector<bool> covered(na, false);
  std::vector<int> chosen;
  std::optional<Rat> incumbent;
  std::vector<int> best;
  std::uint64_t nodes = 0;
  bool exceeded = false;

  auto lower_bound = [&]() {
    Rat lb = 0;
    for (int a = 0; a < na; ++a)
      if (!covered[a]) lb += arc_bound[a];
    return lb;
  };

  std::function<void(const Rat&)> rec = [&](const Rat& cost_so_far) {
    if (exceeded) return;
    if (++nodes > budget) {
      exceeded = true;
      return;
    }
    if (incumbent && *incumbent <= lp_bound) return;  // incumbent optimal
    int arc = -1;
    for (int a = 0; a < na; ++a)
      if (!covered[a]) { arc = a; break; }
    if (arc < 0) {
      if (!incumbent || cost_so_far < *incumbent) {
        incumbent = cost_so_far;
        best = chosen;
      }
      return;
    }
    if (incumbent && cost_so_far + lower_bound() >= *incumbent) return;
    for (int l : covers[arc]) {
      std::vector<int> newly;
      for (int a : m.col_arcs[l])
        if (!covered[a]) { covered[a] = true; newly.push_back(a); }
      chosen.push_back(l);
      rec(cost_so_far + inst.links[l].cost);
      chosen.pop_back();
      for (int a : newly) covered[a] = false;
      if (exceeded) return;
    }
  };
  rec(Rat(0));

  if (exceeded && !incumbent) {
    result.status = BruteStatus::BudgetExceeded;
    result.nodes = nodes;
    return result;
  }
  if (exceeded) {
    result.status = BruteStatus::BudgetExceeded;
    result.nodes = nodes;
    result.links = best;
    result.cost = *incumbent;
    std::sort(result.links.begin(), result.links.end());
    return result;
  }
  result.status = BruteStatus::Optimal;
  result.links = best;
  result.cost = *incumbent;
  result.nodes = nodes;
  std::sort(result.links.begin(), result.links.end());
  return result;
}

RootedInstance random_instance(const GeneratorConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  InstanceBuilder b;
  auto vname = [](int v) { return "v" + std::to_string(v); };
  b.set_root(vname(0));
  std::vector<std::pair<int, int>> arcs;  // (tail, head)
  for (int v = 1; v < cfg.n; ++v) {
    int p = rnd_int(rng, 0, v - 1);
    if (rnd_prob(rng, cfg.bias))
      arcs.push_back({v, p});  // up-arc: child -> parent
    else
      arcs.push_back({p, v});
    b.add_arc(vname(arcs.back().first), vname(arcs.back().second));
  }
  if (cfg.ensure_feasible) {
    for (auto [t, h] : arcs) b.add_link(vname(h), vname(t), rnd_cost(rng, cfg.cost_max));
  }
  int extra = cfg.m - (cfg.ensure_feasible ? static_cast<int>(arcs.size()) : 0);
  for (int i = 0; i < extra; ++i) {
    int u = rnd_int(rng, 0, cfg.n - 1);
    int v = rnd_int(rng, 0, cfg.n - 1);
    if (u == v) continue;
    b.add_link(vname(u), vname(v), rnd_cost(rng, cfg.cost_max));
  }
  return b.build();
}

RootedInstance random_willow_instance(const GeneratorConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  // Tree first, as in random_instance.
  std::vector<std::pair<int, int>> arcs;
  for (int v = 1; v < cfg.n; ++v) {
    int p = rnd_int(rng, 0, v - 1);
    if (rnd_prob(rng, cfg.bias))
      arcs.push_back({v, p});
    else
      arcs.push_back({p, v});
  }
  auto vname = [](int v) { return "v" + std::to_string(v); };
  InstanceBuilder tb;
  tb.set_root(vname(0));
  for (auto [t, h] : arcs) tb.add_arc(vname(t), vname(h));
  RootedInstance tree = tb.build();  // no links yet

  // Witness set W with per-vertex independence direction (true = up).
  std::vector<int> wset{tree.root};
  std::vector<bool> wdir{true};
  int extra_w = rnd_int(rng, 0, std::max(1, cfg.n / 3));
  for (int i = 0; i < extra_w; ++i) {
    int v = rnd_int(rng, 0, cfg.n - 1);
    if (std::find(wset.begin(), wset.end(), v) == wset.end()) {
      wset.push_back(v);
      wdir.push_back(rnd_prob(rng, 0.5));
    }
  }

  std::vector<SubtreeView> sub;
  for (int v = 0; v < cfg.n; ++v) sub.push_back(subtree_view(tree, v));
  auto safe = [&](const Link& cand) {
    PathView pv = path_view(tree, cand);
    for (std::size_t i = 0; i < wset.size(); ++i) {
      int w = wset[i];
      if (w == tree.root) continue;
      bool want_up = wdir[i];
      bool inside = true;
      for (int a : pv.fwd_arcs)
        if (!std::binary_search(sub[w].arcs.begin(), sub[w].arcs.end(), a)) inside = false;
      if (inside) continue;
      for (int a : pv.fwd_arcs) {
        if (!std::binary_search(sub[w].arcs.begin(), sub[w].arcs.end(), a)) continue;
        if (tree.arc_is_up(a) == want_up) return false;  // straddles the boundary
      }
    }
    return true;
  };

  InstanceBuilder b;
  b.set_root(vname(0));
  for (auto [t, h] : arcs) b.add_arc(vname(t), vname(h));
  if (cfg.ensure_feasible)
    for (auto [t, h] : arcs) b.add_link(vname(h), vname(t), rnd_cost(rng, cfg.cost_max));
  int extra = cfg.m - static_cast<int>(arcs.size());
  int attempts = 0;
  for (int placed = 0; placed < extra && attempts < 40 * (extra + 1); ++attempts) {
    int u = rnd_int(rng, 0, cfg.n - 1);
    int v = rnd_int(rng, 0, cfg.n - 1);
    if (u == v) continue;
    Link cand{u, v, rnd_cost(rng, cfg.cost_max)};
    PathView pv = path_view(tree, cand);
    bool updown = (pv.apex == u || pv.apex == v);
    if (!updown && std::find(wset.begin(), wset.end(), pv.apex) == wset.end()) continue;
    if (pv.fwd_arcs.empty()) continue;
    if (!safe(cand)) continue;
    b.add_link(vname(u), vname(v), cand.cost);
    ++placed;
  }
  return b.build();
}

// --- harness -------------------------------------------------------------------

Rat HarnessReport::min_ratio(const std::string& solver) const {
  Rat best = 0;
  bool seen = false;
  for (const auto& r : rows)
    if (r.solver == solver && (!seen || r.ratio < best)) { best = r.ratio; seen = true; }
  return best;
}

Rat HarnessReport::max_ratio(const std::string& solver) const {
  Rat best = 0;
  for (const auto& r : rows)
    if (r.solver == solver) best = std::max(best, r.ratio);
  return best;
}

Rat HarnessReport::mean_ratio(const std::string& solver) const {
  Rat total = 0;
  int count = 0;
  for (const auto& r : rows)
    if (r.solver == solver) { total += r.ratio; ++count; }
  return count == 0 ? Rat(0) : total / count;
}

std::string HarnessReport::to_csv() const {
  std::ostringstream os;
  os << "seed,n,m,delta,opt,lp,solver,cost,ratio\n";
  for (const auto& r : rows)
    os << r.seed << "," << r.n << "," << r.m << "," << rat_to_string(r.delta) << ","
       << rat_to_string(r.opt) << "," << rat_to_string(r.lp) << "," << r.solver << ","
       << rat_to_string(r.cost) << "," << rat_to_string(r.ratio) << "\n";
  return os.str();
}

std::string HarnessReport::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows)
    j.push_back({{"seed", r.seed},
                 {"n", r.n},
                 {"m", r.m},
                 {"delta", rat_to_string(r.delta)},
                 {"opt", rat_to_string(r.opt)},
                 {"lp", rat_to_string(r.lp)},
                 {"solver", r.solver},
                 {"cost", rat_to_string(r.cost)},
                 {"ratio", rat_to_string(r.ratio)}});
  return j.dump();
}

HarnessReport ratio_harness(const std::vector<SolverEntry>& solvers, const std::string& family,
                            int trials, const GeneratorConfig& base_cfg, int threads) {
  std::vector<std::vector<HarnessRow>> slots(trials);
  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      int t = next.fetch_add(1);
      if (t >= trials) return;
      GeneratorConfig cfg = base_cfg;
      cfg.seed = base_cfg.seed + static_cast<std::uint64_t>(t);
      RootedInstance inst =
          family == "willow" ? random_willow_instance(cfg) : random_instance(cfg);
      BruteResult opt = brute_force_opt(inst);
      LpOutcome lp = solve_lp(inst);
      for (const auto& s : solvers) {
        auto [cost, links] = s.run(inst);
        HarnessRow row;
        row.seed = cfg.seed;
        row.n = inst.n();
        row.m = inst.link_count();
        row.delta = cost_ratio(inst);
        row.opt = opt.status == BruteStatus::Optimal ? opt.cost : Rat(-1);
        row.lp = lp.status == LpStatus::Optimal ? lp.objective : Rat(-1);
        row.solver = s.name;
        row.cost = cost;
        row.ratio = (row.opt > 0) ? cost / row.opt : Rat(0);
        slots[t].push_back(std::move(row));
      }
    }
  };
  std::vector<std::thread> pool;
  int nthreads = std::max(1, std::min(threads, trials));
  for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  HarnessReport report;
  for (auto& rows : slots)
    for (auto& r : rows) report.rows.push_back(std::move(r));
  return report;
}

}  // namespace dtap
