#include "dtap/instance.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <sstream>

#include "json.hpp"

namespace dtap {

int RootedInstance::vertex_id(const std::string& name) const {
  auto it = name_to_id_.find(name);
  return it == name_to_id_.end() ? -1 : it->second;
}

int RootedInstance::lca(int u, int v) const {
  while (u != v) {
    if (depth_[u] < depth_[v])
      v = parent_[v];
    else
      u = parent_[u];
  }
  return u;
}

bool RootedInstance::arc_is_ancestor(int a2, int a1) const {
  // a2 appears on the apex(a1)-r path, i.e. a2's lower vertex is a strict
  // ancestor of a1's lower vertex... apex(a1) is the upper endpoint, so walk
  // from there.
  int start = arc_upper_vertex(a1);
  return is_ancestor(arc_lower_vertex(a2), start);
}

void RootedInstance::finalize() {
  const int nv = n();
  if (nv == 0) throw InstanceError(0, "instance has no vertices");
  if (root < 0 || root >= nv) throw InstanceError(0, "root is not a vertex");
  if (arc_count() != nv - 1) throw InstanceError(0, "non-tree: expected " + std::to_string(nv - 1) + " arcs, got " + std::to_string(arc_count()));

  name_to_id_.clear();
  for (int v = 0; v < nv; ++v) {
    if (!name_to_id_.emplace(vertex_names[v], v).second)
      throw InstanceError(0, "duplicate vertex name '" + vertex_names[v] + "'");
  }

  std::vector<std::vector<std::pair<int, int>>> adj(nv);  // (neighbor, arc id)
  for (int a = 0; a < arc_count(); ++a) {
    const Arc& arc = arcs[a];
    if (arc.tail < 0 || arc.tail >= nv || arc.head < 0 || arc.head >= nv)
      throw InstanceError(0, "arc endpoint out of range");
    if (arc.tail == arc.head) throw InstanceError(0, "non-tree: self-loop arc");
    adj[arc.tail].push_back({arc.head, a});
    adj[arc.head].push_back({arc.tail, a});
  }

  parent_.assign(nv, -1);
  parent_arc_.assign(nv, -1);
  depth_.assign(nv, -1);
  children_.assign(nv, {});
  arc_is_up_.assign(arc_count(), false);
  arc_lower_.assign(arc_count(), -1);

  std::queue<int> bfs;
  bfs.push(root);
  depth_[root] = 0;
  int seen = 1;
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop();
    for (auto [w, a] : adj[v]) {
      if (depth_[w] >= 0) continue;
      depth_[w] = depth_[v] + 1;
      parent_[w] = v;
      parent_arc_[w] = a;
      arc_lower_[a] = w;
      arc_is_up_[a] = (arcs[a].head == v);  // pointing toward the root
      ++seen;
      bfs.push(w);
    }
  }
  if (seen != nv) throw InstanceError(0, "non-tree: arc set is disconnected or has a cycle");
  for (int a = 0; a < arc_count(); ++a)
    if (arc_lower_[a] < 0) throw InstanceError(0, "non-tree: parallel arcs");

  for (int v = 0; v < nv; ++v)
    if (v != root) children_[parent_[v]].push_back(v);
  for (auto& c : children_) std::sort(c.begin(), c.end());

  // Euler intervals for O(1) subtree tests.
  tin_.assign(nv, 0);
  tout_.assign(nv, 0);
  int timer = 0;
  std::vector<std::pair<int, int>> stack{{root, 0}};
  while (!stack.empty()) {
    auto& [v, idx] = stack.back();
    if (idx == 0) tin_[v] = timer++;
    if (idx < static_cast<int>(children_[v].size())) {
      int c = children_[v][idx++];
      stack.push_back({c, 0});
    } else {
      tout_[v] = timer++;
      stack.pop_back();
    }
  }

  for (const Link& l : links)
    if (l.tail < 0 || l.tail >= nv || l.head < 0 || l.head >= nv)
      throw InstanceError(0, "link endpoint out of range");

  link_paths_.clear();
  link_paths_.reserve(links.size());
  for (const Link& l : links) link_paths_.push_back(path_view(*this, l));
}

PathView path_view(const RootedInstance& inst, int tail, int head) {
  PathView pv;
  pv.apex = inst.lca(tail, head);
  std::vector<int> up_part;  // tail .. apex (exclusive of apex)
  for (int v = tail; v != pv.apex; v = inst.parent(v)) up_part.push_back(v);
  std::vector<int> down_part;  // head .. apex (exclusive)
  for (int v = head; v != pv.apex; v = inst.parent(v)) down_part.push_back(v);

  for (int v : up_part) pv.vertices.push_back(v);
  pv.vertices.push_back(pv.apex);
  for (auto it = down_part.rbegin(); it != down_part.rend(); ++it) pv.vertices.push_back(*it);

  // Traversal tail -> apex ascends; an arc is forward-covered iff traversal
  // opposes its direction.
  for (int v : up_part) {
    int a = inst.parent_arc(v);
    pv.arcs.push_back(a);
    if (inst.arc_is_up(a))
      pv.wrong_arcs.push_back(a);  // ascending along an up-arc
    else
      pv.fwd_arcs.push_back(a);
  }
  for (auto it = down_part.rbegin(); it != down_part.rend(); ++it) {
    int a = inst.parent_arc(*it);
    pv.arcs.push_back(a);
    if (inst.arc_is_up(a))
      pv.fwd_arcs.push_back(a);  // descending along an up-arc
    else
      pv.wrong_arcs.push_back(a);
  }
  return pv;
}

PathView path_view(const RootedInstance& inst, const Link& link) {
  return path_view(inst, link.tail, link.head);
}

SubtreeView subtree_view(const RootedInstance& inst, int v) {
  SubtreeView view;
  view.vertex = v;
  view.parent_arc = inst.parent_arc(v);
  std::vector<int> stack{v};
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    view.descendants.push_back(x);
    for (int c : inst.children(x)) {
      view.arcs.push_back(inst.parent_arc(c));
      stack.push_back(c);
    }
  }
  std::sort(view.descendants.begin(), view.descendants.end());
  std::sort(view.arcs.begin(), view.arcs.end());
  bool root_like = view.parent_arc < 0;
  bool fwd_is_up = root_like ? true : inst.arc_is_up(view.parent_arc);
  for (int a : view.arcs) {
    (inst.arc_is_up(a) ? view.up_arcs : view.down_arcs).push_back(a);
    (inst.arc_is_up(a) == fwd_is_up ? view.fwd_arcs : view.bwd_arcs).push_back(a);
  }
  return view;
}

std::optional<Link> generic_shadow(const RootedInstance& inst, const Link& link) {
  PathView pv = path_view(inst, link);
  if (pv.fwd_arcs.empty()) return std::nullopt;
  // Trim both ends of the path until the boundary arcs are forward-covered.
  std::vector<bool> fwd(inst.arc_count(), false);
  for (int a : pv.fwd_arcs) fwd[a] = true;
  std::size_t lo = 0, hi = pv.arcs.size();  // arc window [lo, hi)
  while (lo < hi && !fwd[pv.arcs[lo]]) ++lo;
  while (hi > lo && !fwd[pv.arcs[hi - 1]]) --hi;
  Link s;
  s.tail = pv.vertices[lo];
  s.head = pv.vertices[hi];
  s.cost = link.cost;
  return s;
}

PathView generic_shadow_path(const RootedInstance& inst, const Link& link) {
  auto s = generic_shadow(inst, link);
  if (!s) return PathView{};
  return path_view(inst, *s);
}

RootedInstance shadow_complete(const RootedInstance& inst) {
  std::map<std::pair<int, int>, Rat> best;
  for (const Link& l : inst.links) {
    PathView pv = path_view(inst, l);
    const auto& vs = pv.vertices;
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (std::size_t j = i + 1; j < vs.size(); ++j) {
        auto key = std::make_pair(vs[i], vs[j]);
        auto it = best.find(key);
        if (it == best.end() || l.cost < it->second) best[key] = l.cost;
      }
  }
  RootedInstance out;
  out.vertex_names = inst.vertex_names;
  out.root = inst.root;
  out.arcs = inst.arcs;
  for (const auto& [key, cost] : best) out.links.push_back(Link{key.first, key.second, cost});
  out.finalize();
  return out;
}

Contraction contract_arcs(const RootedInstance& inst, const std::vector<int>& arc_set) {
  const int nv = inst.n();
  std::vector<int> comp(nv);
  for (int v = 0; v < nv; ++v) comp[v] = v;
  // Union-find, path halving.
  std::vector<int> uf(nv);
  for (int v = 0; v < nv; ++v) uf[v] = v;
  auto find = [&](int v) {
    while (uf[v] != v) {
      uf[v] = uf[uf[v]];
      v = uf[v];
    }
    return v;
  };
  std::vector<bool> contracted(inst.arc_count(), false);
  for (int a : arc_set) {
    if (a < 0 || a >= inst.arc_count()) throw InstanceError(0, "contract_arcs: arc id out of range");
    contracted[a] = true;
    int x = find(inst.arcs[a].tail), y = find(inst.arcs[a].head);
    if (x != y) uf[std::max(x, y)] = std::min(x, y);
  }
  // New ids in order of the smallest old vertex in each class.
  std::vector<int> new_id(nv, -1);
  Contraction result;
  result.vertex_map.assign(nv, -1);
  int next = 0;
  for (int v = 0; v < nv; ++v) {
    int r = find(v);
    if (new_id[r] < 0) {
      new_id[r] = next++;
      result.inst.vertex_names.push_back(inst.vertex_names[r]);
    }
    result.vertex_map[v] = new_id[r];
  }
  result.inst.root = result.vertex_map[inst.root];
  for (int a = 0; a < inst.arc_count(); ++a) {
    if (contracted[a]) continue;
    result.inst.arcs.push_back({result.vertex_map[inst.arcs[a].tail], result.vertex_map[inst.arcs[a].head]});
  }
  result.link_map.assign(inst.link_count(), -1);
  std::map<std::pair<int, int>, int> pair_to_new;
  for (int i = 0; i < inst.link_count(); ++i) {
    int t = result.vertex_map[inst.links[i].tail];
    int h = result.vertex_map[inst.links[i].head];
    if (t == h) continue;  // image path empty
    auto key = std::make_pair(t, h);
    auto it = pair_to_new.find(key);
    if (it == pair_to_new.end()) {
      int id = static_cast<int>(result.inst.links.size());
      pair_to_new.emplace(key, id);
      result.inst.links.push_back(Link{t, h, inst.links[i].cost});
      result.link_rep.push_back(i);
      result.link_map[i] = id;
    } else {
      int id = it->second;
      if (inst.links[i].cost < result.inst.links[id].cost) {
        result.inst.links[id].cost = inst.links[i].cost;
        result.link_rep[id] = i;
      }
      result.link_map[i] = id;
    }
  }
  result.inst.finalize();
  return result;
}

bool is_feasible(const RootedInstance& inst) {
  std::vector<bool> covered(inst.arc_count(), false);
  for (int i = 0; i < inst.link_count(); ++i)
    for (int a : inst.link_path(i).fwd_arcs) covered[a] = true;
  for (bool c : covered)
    if (!c) return false;
  return true;
}

Rat cost_ratio(const RootedInstance& inst) {
  if (inst.links.empty()) return Rat(1);
  Rat lo = inst.links[0].cost, hi = inst.links[0].cost;
  for (const Link& l : inst.links) {
    lo = std::min(lo, l.cost);
    hi = std::max(hi, l.cost);
  }
  return hi / lo;
}

// --- builder -----------------------------------------------------------------

int InstanceBuilder::intern(const std::string& name) {
  auto it = ids_.find(name);
  if (it != ids_.end()) return it->second;
  int id = static_cast<int>(names_.size());
  names_.push_back(name);
  ids_.emplace(name, id);
  return id;
}

std::optional<int> InstanceBuilder::lookup(const std::string& name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

void InstanceBuilder::set_root(const std::string& name, int line) {
  if (root_) throw InstanceError(line, "duplicate root declaration");
  root_ = intern(name);
  root_line_ = line;
}

void InstanceBuilder::add_arc(const std::string& tail, const std::string& head, int line) {
  arcs_.push_back({intern(tail), intern(head), line});
}

void InstanceBuilder::add_link(const std::string& tail, const std::string& head, const Rat& cost, int line) {
  if (cost <= 0) throw InstanceError(line, "non-positive link cost");
  // Endpoints are resolved at build time so that links may precede arcs.
  links_.push_back({tail, head, line, cost});
}

RootedInstance InstanceBuilder::build(std::vector<std::string>* warnings) const {
  if (!root_) throw InstanceError(0, "missing root declaration");
  RootedInstance inst;
  inst.vertex_names = names_;
  inst.root = *root_;
  for (const RawArc& a : arcs_) inst.arcs.push_back({a.tail, a.head});
  // Resolve link endpoints against declared vertices only.
  std::vector<Link> raw;
  for (const RawLink& rl : links_) {
    auto t = lookup(rl.tail);
    auto h = lookup(rl.head);
    if (!t || !h)
      throw InstanceError(rl.line, "unknown vertex '" + (!t ? rl.tail : rl.head) + "' in link");
    raw.push_back(Link{*t, *h, rl.cost});
  }
  inst.links.clear();
  inst.finalize();  // validates tree before link normalization

  std::map<std::pair<int, int>, std::size_t> seen;
  for (const Link& l : raw) {
    if (l.tail == l.head) {
      if (warnings) warnings->push_back("dropped self-loop link at vertex '" + inst.name(l.tail) + "'");
      continue;
    }
    if (path_view(inst, l).fwd_arcs.empty()) {
      if (warnings)
        warnings->push_back("dropped link (" + inst.name(l.tail) + "," + inst.name(l.head) + ") with empty forward coverage");
      continue;
    }
    auto key = std::make_pair(l.tail, l.head);
    auto it = seen.find(key);
    if (it == seen.end()) {
      seen.emplace(key, inst.links.size());
      inst.links.push_back(l);
    } else if (l.cost < inst.links[it->second].cost) {
      if (warnings)
        warnings->push_back("collapsed parallel link (" + inst.name(l.tail) + "," + inst.name(l.head) + ") to cheaper copy");
      inst.links[it->second].cost = l.cost;
    } else if (warnings) {
      warnings->push_back("collapsed parallel link (" + inst.name(l.tail) + "," + inst.name(l.head) + ") to cheaper copy");
    }
  }
  inst.finalize();
  return inst;
}

// --- parsing / serialization --------------------------------------------------

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) {
    if (!tok.empty() && tok[0] == '#') break;
    out.push_back(tok);
  }
  return out;
}

}  // namespace

RootedInstance parse_instance(const std::string& text, std::vector<std::string>* warnings) {
  InstanceBuilder b;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks[0] == "root") {
      if (toks.size() != 2) throw InstanceError(lineno, "malformed root line");
      b.set_root(toks[1], lineno);
    } else if (toks[0] == "arc") {
      if (toks.size() != 3) throw InstanceError(lineno, "malformed arc line");
      b.add_arc(toks[1], toks[2], lineno);
    } else if (toks[0] == "link") {
      if (toks.size() != 4) throw InstanceError(lineno, "malformed link line");
      auto cost = parse_rational(toks[3]);
      if (!cost) throw InstanceError(lineno, "malformed cost '" + toks[3] + "'");
      if (*cost <= 0) throw InstanceError(lineno, "non-positive link cost");
      b.add_link(toks[1], toks[2], *cost, lineno);
    } else {
      throw InstanceError(lineno, "malformed line: unknown directive '" + toks[0] + "'");
    }
  }
  return b.build(warnings);
}

RootedInstance parse_instance_json(const std::string& text, std::vector<std::string>* warnings) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InstanceError(0, std::string("malformed JSON: ") + e.what());
  }
  InstanceBuilder b;
  if (!j.contains("root") || !j["root"].is_string()) throw InstanceError(0, "JSON instance missing root");
  b.set_root(j["root"].get<std::string>());
  for (const auto& a : j.value("arcs", nlohmann::json::array())) {
    if (!a.is_array() || a.size() != 2) throw InstanceError(0, "malformed arc entry");
    b.add_arc(a[0].get<std::string>(), a[1].get<std::string>());
  }
  for (const auto& l : j.value("links", nlohmann::json::array())) {
    std::string cost_text = l["cost"].is_string() ? l["cost"].get<std::string>() : l["cost"].dump();
    auto cost = parse_rational(cost_text);
    if (!cost) throw InstanceError(0, "malformed cost '" + cost_text + "'");
    if (*cost <= 0) throw InstanceError(0, "non-positive link cost");
    b.add_link(l["tail"].get<std::string>(), l["head"].get<std::string>(), *cost);
  }
  return b.build(warnings);
}

RootedInstance parse_instance_auto(const std::string& text, std::vector<std::string>* warnings) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (c == '{') return parse_instance_json(text, warnings);
    break;
  }
  return parse_instance(text, warnings);
}

std::string instance_to_text(const RootedInstance& inst) {
  std::ostringstream os;
  os << "root " << inst.name(inst.root) << "\n";
  for (const auto& a : inst.arcs) os << "arc " << inst.name(a.tail) << " " << inst.name(a.head) << "\n";
  for (const Link& l : inst.links)
    os << "link " << inst.name(l.tail) << " " << inst.name(l.head) << " " << rat_to_string(l.cost) << "\n";
  return os.str();
}

std::string instance_to_json(const RootedInstance& inst) {
  nlohmann::json j;
  j["root"] = inst.name(inst.root);
  j["arcs"] = nlohmann::json::array();
  for (const auto& a : inst.arcs) j["arcs"].push_back({inst.name(a.tail), inst.name(a.head)});
  j["links"] = nlohmann::json::array();
  for (const Link& l : inst.links)
    j["links"].push_back({{"tail", inst.name(l.tail)}, {"head", inst.name(l.head)}, {"cost", rat_to_string(l.cost)}});
  return j.dump();
}

std::string instance_hash(const RootedInstance& inst) {
  std::string canon = instance_to_text(inst);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

}  // namespace dtap
