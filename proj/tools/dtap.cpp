#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dtap/approx.hpp"
#include "dtap/instance.hpp"
#include "dtap/lp.hpp"
#include "dtap/oracle.hpp"
#include "dtap/reductions.hpp"
#include "dtap/viwidth.hpp"
#include "dtap/willow.hpp"

namespace {

using nlohmann::json;
using namespace dtap;

constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitBudget = 4;
constexpr int kExitAssertion = 5;

struct Output {
  std::string command;
  std::string instance_hash;
  json result = json::object();
  double seconds = 0;
  std::string format = "json";
  int decimals = -1;
};

std::string render_rat(const Rat& r, int decimals) {
  return decimals >= 0 ? rat_to_decimal(r, decimals) : rat_to_string(r);
}

void emit(const Output& out) {
  if (out.format == "text") {
    std::cout << out.command << " (" << out.instance_hash << ")\n";
    std::cout << out.result.dump(2) << "\n";
    return;
  }
  json envelope;
  envelope["command"] = out.command;
  envelope["instance_hash"] = out.instance_hash;
  envelope["result"] = out.result;
  envelope["timings"] = {{"seconds", out.seconds}};
  std::cout << envelope.dump() << "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InstanceError(0, "cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json links_to_json(const RootedInstance& inst, const std::vector<int>& links, int decimals) {
  json arr = json::array();
  for (int l : links)
    arr.push_back({{"tail", inst.name(inst.links[l].tail)},
                   {"head", inst.name(inst.links[l].head)},
                   {"cost", render_rat(inst.links[l].cost, decimals)}});
  return arr;
}

json solution_to_json(const RootedInstance& inst, const FractionalSolution& x, int decimals) {
  json arr = json::array();
  for (const auto& [l, v] : x.entries())
    arr.push_back({{"tail", inst.name(inst.links[l].tail)},
                   {"head", inst.name(inst.links[l].head)},
                   {"cost", render_rat(inst.links[l].cost, decimals)},
                   {"x", render_rat(v, decimals)}});
  return {{"links", arr}, {"cost", render_rat(x.cost(inst), decimals)}};
}

std::uint64_t seed_with_env(std::uint64_t seed) {
  if (const char* env = std::getenv("DTAP_SEED")) {
    char* end = nullptr;
    std::uint64_t v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return v;
  }
  return seed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"WDTAP solver toolkit"};
  app.require_subcommand(1);
  std::string format = "json";
  int decimals = -1;
  app.add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--approx-decimals", decimals, "render rationals with this many decimals");

  // solve
  auto* solve = app.add_subcommand("solve", "exact solve (branch and bound)");
  std::string solve_file;
  bool solve_exact = false, solve_lp_only = false, solve_willow_mode = false;
  std::uint64_t solve_budget = 50'000'000;
  solve->add_option("--file", solve_file, "instance file")->required();
  solve->add_flag("--exact", solve_exact, "exact optimum (default)");
  solve->add_flag("--lp", solve_lp_only, "LP relaxation only");
  solve->add_flag("--willow", solve_willow_mode, "require a willow; solve via the integral LP");
  solve->add_option("--budget", solve_budget, "branch-and-bound node budget");

  // approx2 / approx175
  auto* a2 = app.add_subcommand("approx2", "2-approximation baseline");
  std::string a2_file;
  a2->add_option("--file", a2_file, "instance file")->required();

  auto* a175 = app.add_subcommand("approx175", "(1.75+eps)-approximation pipeline");
  std::string a175_file, a175_mode = "engineering";
  std::string a175_eps = "1/2";
  long long a175_k = 3;
  int a175_max_cuts = 50;
  a175->add_option("--file", a175_file, "instance file")->required();
  a175->add_option("--epsilon", a175_eps, "epsilon (rational)");
  a175->add_option("--mode", a175_mode, "theoretical or engineering")
      ->check(CLI::IsMember({"theoretical", "engineering"}));
  a175->add_option("--k", a175_k, "width override for the DP (engineering mode)");
  a175->add_option("--max-cuts", a175_max_cuts, "cutting-plane iteration budget");

  // dp
  auto* dp = app.add_subcommand("dp", "bounded-width / N-thin dynamic program");
  std::string dp_file;
  int dp_n = -1, dp_k = -1;
  dp->add_option("--file", dp_file, "instance file")->required();
  dp->add_option("--n", dp_n, "solve for the cheapest N-thin solution");
  dp->add_option("--k", dp_k, "solve assuming visible width at most k (N = 2k)");

  // check-willow
  auto* cw = app.add_subcommand("check-willow", "willow recognition");
  std::string cw_file;
  cw->add_option("--file", cw_file, "instance file")->required();

  // viwidth
  auto* vw = app.add_subcommand("viwidth", "per-vertex visible widths");
  std::string vw_file;
  vw->add_option("--file", vw_file, "instance file")->required();

  // gen
  auto* gen = app.add_subcommand("gen", "instance generators");
  std::string gen_family = "random", gen_out;
  int gen_q = 2, gen_n = 8, gen_m = 12;
  double gen_bias = 0.5;
  std::string gen_delta = "4";
  std::uint64_t gen_seed = 1;
  gen->add_option("--family", gen_family, "gap | 3dm | random | willow")
      ->check(CLI::IsMember({"gap", "3dm", "random", "willow"}));
  gen->add_option("--q", gen_q, "3DM ground-set size");
  gen->add_option("--n", gen_n, "vertex count");
  gen->add_option("--m", gen_m, "link count");
  gen->add_option("--bias", gen_bias, "up-arc probability");
  gen->add_option("--delta", gen_delta, "cost ratio bound");
  gen->add_option("--seed", gen_seed, "seed (DTAP_SEED overrides)");
  gen->add_option("--out", gen_out, "write to file instead of stdout");

  // reduce
  auto* red = app.add_subcommand("reduce", "reductions to WDTAP");
  std::string red_from = "m2tap", red_file;
  red->add_option("--from", red_from, "m2tap")->check(CLI::IsMember({"m2tap"}));
  red->add_option("--file", red_file, "multi 2-TAP instance file")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "ratio harness");
  std::string bench_family = "random", bench_out, bench_solvers = "approx2,approx175";
  int bench_trials = 20, bench_n = 8, bench_m = 12;
  std::string bench_delta = "4";
  std::uint64_t bench_seed = 1;
  bench->add_option("--family", bench_family, "random | willow")
      ->check(CLI::IsMember({"random", "willow"}));
  bench->add_option("--trials", bench_trials, "number of seeded trials");
  bench->add_option("--solvers", bench_solvers, "comma list: brute,approx2,approx175");
  bench->add_option("--n", bench_n, "vertex count");
  bench->add_option("--m", bench_m, "link count");
  bench->add_option("--delta", bench_delta, "cost ratio bound");
  bench->add_option("--seed", bench_seed, "base seed");
  bench->add_option("--out", bench_out, "CSV output path");

  CLI11_PARSE(app, argc, argv);

  Output out;
  out.format = format;
  out.decimals = decimals;
  auto started = std::chrono::steady_clock::now();
  auto finish = [&](int code) {
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    emit(out);
    return code;
  };

  try {
    if (*solve) {
      out.command = "solve";
      RootedInstance inst = parse_instance_auto(read_file(solve_file));
      out.instance_hash = instance_hash(inst);
      if (solve_lp_only) {
        LpOutcome lp = solve_lp(inst);
        if (lp.status != LpStatus::Optimal) {
          out.result["status"] = "infeasible";
          return finish(kExitInfeasible);
        }
        out.result = solution_to_json(inst, lp.solution, decimals);
        out.result["status"] = "optimal";
        return finish(0);
      }
      if (solve_willow_mode) {
        WillowSolveResult w = solve_willow(inst);
        if (w.status == WillowSolveStatus::NotWillow) {
          out.result["status"] = "not-a-willow";
          out.result["violator"] = inst.name(w.violator);
          return finish(kExitUsage);
        }
        if (w.status == WillowSolveStatus::Infeasible) {
          out.result["status"] = "infeasible";
          return finish(kExitInfeasible);
        }
        if (w.status == WillowSolveStatus::NotIntegral) {
          out.result["status"] = "not-integral";
          return finish(kExitAssertion);
        }
        out.result["status"] = "optimal";
        out.result["cost"] = render_rat(w.cost, decimals);
        out.result["solution"] = links_to_json(inst, w.links, decimals);
        return finish(0);
      }
      BruteResult r = brute_force_opt(inst, solve_budget);
      if (r.status == BruteStatus::Infeasible) {
        out.result["status"] = "infeasible";
        return finish(kExitInfeasible);
      }
      if (r.status == BruteStatus::BudgetExceeded) {
        out.result["status"] = "budget-exceeded";
        out.result["nodes"] = r.nodes;
        return finish(kExitBudget);
      }
      out.result["status"] = "optimal";
      out.result["cost"] = render_rat(r.cost, decimals);
      out.result["solution"] = links_to_json(inst, r.links, decimals);
      out.result["nodes"] = r.nodes;
      return finish(0);
    }

    if (*a2) {
      out.command = "approx2";
      RootedInstance inst = parse_instance_auto(read_file(a2_file));
      out.instance_hash = instance_hash(inst);
      Approx2Result r = approx_2(inst);
      if (!r.feasible) {
        out.result["status"] = "infeasible";
        return finish(kExitInfeasible);
      }
      LpOutcome lp = solve_lp(inst);
      out.result["status"] = "ok";
      out.result["solution"] = links_to_json(inst, r.links, decimals);
      out.result["cost"] = render_rat(r.cost, decimals);
      out.result["lp_lower_bound"] = render_rat(lp.objective, decimals);
      out.result["cuts_emitted"] = 0;
      out.result["mode"] = "exact-halves";
      out.result["assertions_checked"] = 0;
      return finish(0);
    }

    if (*a175) {
      out.command = "approx175";
      RootedInstance inst = parse_instance_auto(read_file(a175_file));
      out.instance_hash = instance_hash(inst);
      auto eps = parse_rational(a175_eps);
      if (!eps || *eps <= 0) {
        std::cerr << "invalid --epsilon\n";
        return kExitUsage;
      }
      ApproxOutcome r = approx_175(inst, *eps, a175_mode, a175_k, a175_max_cuts);
      if (!r.feasible) {
        out.result["status"] = "infeasible";
        return finish(kExitInfeasible);
      }
      out.result["status"] = r.fallback_2approx ? "budget-fallback" : "ok";
      out.result["solution"] = links_to_json(inst, r.links, decimals);
      out.result["cost"] = render_rat(r.cost, decimals);
      out.result["lp_lower_bound"] = render_rat(r.lp_lower_bound, decimals);
      out.result["cuts_emitted"] = r.cuts_emitted;
      out.result["mode"] = r.mode;
      out.result["assertions_checked"] = r.assertions_checked;
      return finish(r.fallback_2approx ? kExitBudget : 0);
    }

    if (*dp) {
      out.command = "dp";
      RootedInstance raw = parse_instance_auto(read_file(dp_file));
      out.instance_hash = instance_hash(raw);
      RootedInstance inst = shadow_complete(raw);
      if (dp_k >= 0) {
        BoundedResult r = solve_bounded_viwidth(inst, dp_k);
        if (r.status == BoundedStatus::WidthExceeded) {
          out.result["status"] = "width-exceeded";
          out.result["measured_width"] = r.measured_width;
          return finish(kExitUsage);
        }
        if (r.status != BoundedStatus::Solved) {
          out.result["status"] = "infeasible";
          return finish(kExitInfeasible);
        }
        out.result["status"] = "optimal";
        out.result["cost"] = render_rat(r.cost, decimals);
        out.result["solution"] = links_to_json(inst, r.links, decimals);
        return finish(0);
      }
      int n = dp_n >= 0 ? dp_n : 2 * inst.link_count();
      DpResult r = solve_n_thin(inst, n);
      if (r.status != DpStatus::Solved) {
        out.result["status"] = "infeasible";
        return finish(kExitInfeasible);
      }
      out.result["status"] = "optimal";
      out.result["n_thin"] = n;
      out.result["cost"] = render_rat(r.cost, decimals);
      out.result["solution"] = links_to_json(inst, r.links, decimals);
      return finish(0);
    }

    if (*cw) {
      out.command = "check-willow";
      RootedInstance inst = parse_instance_auto(read_file(cw_file));
      out.instance_hash = instance_hash(inst);
      RecognitionResult r = recognize_willow(inst);
      out.result["willow"] = r.willow;
      json w = json::array();
      for (int v : r.cert.w) w.push_back(inst.name(v));
      out.result["W"] = w;
      if (!r.willow) out.result["violator"] = inst.name(r.violator);
      return finish(0);
    }

    if (*vw) {
      out.command = "viwidth";
      RootedInstance inst = parse_instance_auto(read_file(vw_file));
      out.instance_hash = instance_hash(inst);
      VisibilityReport rep = viwidth(inst);
      json per = json::object();
      for (int v = 0; v < inst.n(); ++v)
        per[inst.name(v)] = {{"up", rep.up_width[v]},
                             {"down", rep.down_width[v]},
                             {"width", rep.width[v]}};
      out.result["vertices"] = per;
      out.result["instance_width"] = rep.instance_width;
      return finish(0);
    }

    if (*gen) {
      out.command = "gen";
      std::uint64_t seed = seed_with_env(gen_seed);
      RootedInstance inst;
      if (gen_family == "gap") {
        inst = integrality_gap_instance();
      } else if (gen_family == "3dm") {
        std::mt19937_64 rng(seed);
        std::vector<std::array<int, 3>> triples;
        for (int i = 1; i <= gen_q; ++i) triples.push_back({i, i, i});  // planted matching
        for (int extra = 0; extra < gen_q; ++extra)
          triples.push_back({static_cast<int>(rng() % gen_q) + 1,
                             static_cast<int>(rng() % gen_q) + 1,
                             static_cast<int>(rng() % gen_q) + 1});
        std::sort(triples.begin(), triples.end());
        triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
        ThreeDmInstance t = gen_3dm_instance(triples, gen_q);
        inst = t.inst;
        out.result["p"] = t.p;
        out.result["q"] = t.q;
        out.result["target"] = t.target;
      } else {
        GeneratorConfig cfg;
        cfg.n = gen_n;
        cfg.m = gen_m;
        cfg.bias = gen_bias;
        auto d = parse_rational(gen_delta);
        cfg.cost_max = d ? *d : Rat(4);
        cfg.seed = seed;
        inst = gen_family == "willow" ? random_willow_instance(cfg) : random_instance(cfg);
      }
      std::string text = instance_to_text(inst);
      if (!gen_out.empty()) {
        std::ofstream f(gen_out, std::ios::binary);
        f << text;
        out.result["written"] = gen_out;
      } else {
        out.result["instance"] = text;
      }
      out.instance_hash = instance_hash(inst);
      return finish(0);
    }

    if (*red) {
      out.command = "reduce";
      // Multi 2-TAP text format: edge lines instead of arcs.
      //   root <v> / edge <u> <v> / link <u> <v> <cost>
      Multi2TapInstance m2;
      std::map<std::string, int> ids;
      auto intern = [&](const std::string& s) {
        auto it = ids.find(s);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(m2.vertex_names.size());
        m2.vertex_names.push_back(s);
        ids.emplace(s, id);
        return id;
      };
      std::istringstream is(read_file(red_file));
      std::string line;
      int lineno = 0;
      while (std::getline(is, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok) || tok[0] == '#') continue;
        if (tok == "root") {
          std::string v;
          ls >> v;
          intern(v);
        } else if (tok == "edge") {
          std::string u, v;
          if (!(ls >> u >> v)) throw InstanceError(lineno, "malformed edge line");
          m2.edges.push_back({intern(u), intern(v)});
        } else if (tok == "link") {
          std::string u, v, c;
          if (!(ls >> u >> v >> c)) throw InstanceError(lineno, "malformed link line");
          auto cost = parse_rational(c);
          if (!cost || *cost <= 0) throw InstanceError(lineno, "bad link cost");
          m2.links.push_back({intern(u), intern(v), *cost});
        } else {
          throw InstanceError(lineno, "unknown directive '" + tok + "'");
        }
      }
      BiDirectedCoverInstance bi = m2tap_to_bidirected(m2);
      WdtapFromBidirected w = bidirected_to_wdtap(bi);
      out.instance_hash = instance_hash(w.inst);
      out.result["instance"] = instance_to_text(w.inst);
      json prov = json::array();
      for (int j = 0; j < w.inst.link_count(); ++j) {
        int bi_idx = w.link_origin[j];
        prov.push_back({{"link", j},
                        {"bidirected_link", bi_idx},
                        {"m2tap_link", bi_idx >= 0 ? bi_idx / 2 : -1}});
      }
      out.result["provenance"] = prov;
      return finish(0);
    }

    if (*bench) {
      out.command = "bench";
      out.instance_hash = "";
      GeneratorConfig cfg;
      cfg.n = bench_n;
      cfg.m = bench_m;
      auto d = parse_rational(bench_delta);
      cfg.cost_max = d ? *d : Rat(4);
      cfg.seed = seed_with_env(bench_seed);
      std::vector<SolverEntry> solvers;
      std::istringstream ss(bench_solvers);
      std::string name;
      while (std::getline(ss, name, ',')) {
        if (name == "brute") {
          solvers.push_back({"brute", [](const RootedInstance& i) {
                               BruteResult r = brute_force_opt(i);
                               return std::make_pair(r.cost, r.links);
                             }});
        } else if (name == "approx2") {
          solvers.push_back({"approx2", [](const RootedInstance& i) {
                               Approx2Result r = approx_2(i);
                               return std::make_pair(r.cost, r.links);
                             }});
        } else if (name == "approx175") {
          solvers.push_back({"approx175", [](const RootedInstance& i) {
                               ApproxOutcome r = approx_175(i, Rat(1, 2), "engineering", 3, 50);
                               return std::make_pair(r.cost, r.links);
                             }});
        } else {
          std::cerr << "unknown solver '" << name << "'\n";
          return kExitUsage;
        }
      }
      HarnessReport report = ratio_harness(solvers, bench_family, bench_trials, cfg);
      if (!bench_out.empty()) {
        std::ofstream f(bench_out, std::ios::binary);
        f << report.to_csv();
        out.result["written"] = bench_out;
      }
      json summary = json::object();
      for (const auto& s : solvers)
        summary[s.name] = {{"min_ratio", rat_to_string(report.min_ratio(s.name))},
                           {"mean_ratio", rat_to_string(report.mean_ratio(s.name))},
                           {"max_ratio", rat_to_string(report.max_ratio(s.name))}};
      out.result["summary"] = summary;
      out.result["trials"] = bench_trials;
      return finish(0);
    }
  } catch (const InstanceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::string msg = e.what();
    if (msg.find("paper property violated") != std::string::npos ||
        msg.find("internal bug") != std::string::npos)
      return kExitAssertion;
    return kExitUsage;
  } catch (const SplitError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitAssertion;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
