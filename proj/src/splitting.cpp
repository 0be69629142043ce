#include "dtap/splitting.hpp"

#include <algorithm>
#include <set>

namespace dtap {

Workspace::Workspace(const RootedInstance& input) : input_(input) {
  std::map<std::pair<int, int>, std::pair<Rat, int>> best;  // pair -> (cost, input link)
  for (int l = 0; l < input.link_count(); ++l) {
    const PathView& pv = input.link_path(l);
    const auto& vs = pv.vertices;
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (std::size_t j = i + 1; j < vs.size(); ++j) {
        auto key = std::make_pair(vs[i], vs[j]);
        auto it = best.find(key);
        if (it == best.end() || input.links[l].cost < it->second.first)
          best[key] = {input.links[l].cost, l};
      }
  }
  inst_.vertex_names = input.vertex_names;
  inst_.root = input.root;
  inst_.arcs = input.arcs;
  for (const auto& [key, val] : best) {
    pair_index_.emplace(key, static_cast<int>(inst_.links.size()));
    inst_.links.push_back(Link{key.first, key.second, val.first});
    origin_.push_back(val.second);
  }
  inst_.finalize();
  from_input_.assign(input.link_count(), -1);
  for (int l = 0; l < input.link_count(); ++l)
    from_input_[l] = find_pair(input.links[l].tail, input.links[l].head);
}

int Workspace::find_pair(int tail, int head) const {
  auto it = pair_index_.find({tail, head});
  return it == pair_index_.end() ? -1 : it->second;
}

std::vector<int> Splitting::image(int link) const {
  auto it = parts_.find(link);
  if (it != parts_.end()) return it->second;
  return {link};
}

void Splitting::set_image(int link, std::vector<int> pieces) {
  if (pieces.size() == 1 && pieces[0] == link) {
    parts_.erase(link);
    return;
  }
  parts_[link] = std::move(pieces);
}

std::vector<int> Splitting::support(int universe_size) const {
  std::set<int> supp;
  for (int l = 0; l < universe_size; ++l)
    if (!parts_.count(l)) supp.insert(l);
  for (const auto& [l, pieces] : parts_) supp.insert(pieces.begin(), pieces.end());
  return {supp.begin(), supp.end()};
}

void validate_splitting(const Workspace& ws, const Splitting& s) {
  const RootedInstance& inst = ws.inst();
  for (const auto& [l, pieces] : s.entries()) {
    const PathView& pv = inst.link_path(l);
    std::map<int, int> pos;
    for (std::size_t i = 0; i < pv.vertices.size(); ++i) pos[pv.vertices[i]] = static_cast<int>(i);
    std::vector<bool> used(pv.arcs.size(), false);
    for (int p : pieces) {
      if (p < 0 || p >= inst.link_count()) throw SplitError("splitting image out of range");
      auto it_t = pos.find(inst.links[p].tail);
      auto it_h = pos.find(inst.links[p].head);
      if (it_t == pos.end() || it_h == pos.end() || it_t->second >= it_h->second)
        throw SplitError("splitting image is not an in-order shadow");
      for (int i = it_t->second; i < it_h->second; ++i) {
        if (used[i]) throw SplitError("splitting images overlap");
        used[i] = true;
      }
    }
    if (!std::all_of(used.begin(), used.end(), [](bool b) { return b; }))
      throw SplitError("splitting images do not partition the path");
  }
}

FractionalSolution apply_splitting(const Workspace& ws, const FractionalSolution& x, const Splitting& s) {
  validate_splitting(ws, s);
  FractionalSolution out;
  for (const auto& [l, v] : x.entries()) {
    if (v == 0) continue;
    for (int piece : s.image(l)) out.set(piece, out.value(piece) + v);
  }
  return out;
}

std::vector<int> split_link_at(const Workspace& ws, int link, const std::vector<int>& cuts) {
  const RootedInstance& inst = ws.inst();
  const PathView& pv = inst.link_path(link);
  std::map<int, int> pos;
  for (std::size_t i = 0; i < pv.vertices.size(); ++i) pos[pv.vertices[i]] = static_cast<int>(i);
  std::set<int> cut_pos{0, static_cast<int>(pv.vertices.size()) - 1};
  for (int c : cuts) {
    auto it = pos.find(c);
    if (it == pos.end()) throw SplitError("cut vertex not on the link path");
    cut_pos.insert(it->second);
  }
  std::vector<int> pieces;
  auto it = cut_pos.begin();
  for (auto next = std::next(it); next != cut_pos.end(); ++it, ++next) {
    int id = ws.find_pair(pv.vertices[*it], pv.vertices[*next]);
    if (id < 0) throw SplitError("split piece missing from the workspace universe");
    pieces.push_back(id);
  }
  return pieces;
}

Splitting split_at_vertex(const Workspace& ws, int v, const std::vector<int>& link_set) {
  Splitting s;
  const RootedInstance& inst = ws.inst();
  for (int l : link_set) {
    const PathView& pv = inst.link_path(l);
    bool interior = false;
    for (std::size_t i = 1; i + 1 < pv.vertices.size(); ++i)
      if (pv.vertices[i] == v) { interior = true; break; }
    if (!interior) continue;
    s.set_image(l, split_link_at(ws, l, {v}));
  }
  return s;
}

Splitting split_at_apex(const Workspace& ws, const std::vector<int>& link_set) {
  Splitting s;
  const RootedInstance& inst = ws.inst();
  for (int l : link_set) {
    const PathView& pv = inst.link_path(l);
    if (pv.apex == inst.links[l].tail || pv.apex == inst.links[l].head) continue;
    s.set_image(l, split_link_at(ws, l, {pv.apex}));
  }
  return s;
}

Splitting compose(const Splitting& later, const Splitting& earlier) {
  Splitting out;
  std::set<int> domain;
  for (const auto& [l, _] : earlier.entries()) domain.insert(l);
  for (const auto& [l, _] : later.entries()) domain.insert(l);
  for (int l : domain) {
    std::vector<int> image;
    for (int p : earlier.image(l)) {
      auto sub = later.image(p);
      image.insert(image.end(), sub.begin(), sub.end());
    }
    out.set_image(l, std::move(image));
  }
  return out;
}

Rat cost_increase_bound(const Workspace& ws, const FractionalSolution& x, const Splitting& s) {
  const RootedInstance& inst = ws.inst();
  Rat bound = x.cost(inst);
  for (const auto& [l, v] : x.entries()) {
    int parts = static_cast<int>(s.image(l).size());
    if (parts > 1) bound += Rat(parts - 1) * inst.links[l].cost * v;
  }
  Rat actual = apply_splitting(ws, x, s).cost(inst);
  if (actual > bound) throw SplitError("cost_increase_bound violated (internal bug)");
  return bound;
}

}  // namespace dtap
