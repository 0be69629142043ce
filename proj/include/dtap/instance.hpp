#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "dtap/rational.hpp"

namespace dtap {

struct Link {
  int tail = -1;  // u
  int head = -1;  // v
  Rat cost;
};

// Thrown on malformed input or invariant violations while building an
// instance. `line` is 0 when the error is not tied to an input line.
struct InstanceError : std::runtime_error {
  InstanceError(int line_, const std::string& msg)
      : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
        line(line_) {}
  int line = 0;
};

// The unique tree path of a link, with its coverage split by direction.
struct PathView {
  std::vector<int> vertices;   // u = front, v = back, in traversal order
  std::vector<int> arcs;       // cov(l): arc ids in path order
  std::vector<int> fwd_arcs;   // ->cov(l): arcs traversed against their direction
  std::vector<int> wrong_arcs; // <-cov(l)
  int apex = -1;               // lca(u, v)
};

struct SubtreeView {
  int vertex = -1;
  std::vector<int> descendants;  // U_v, includes v
  std::vector<int> arcs;         // A_v
  int parent_arc = -1;           // a_v, -1 at the root
  std::vector<int> up_arcs;      // A_v with arc pointing toward the root
  std::vector<int> down_arcs;
  // Directional views relative to a_v's orientation: fwd = same class as a_v.
  std::vector<int> fwd_arcs;
  std::vector<int> bwd_arcs;
};

class RootedInstance {
 public:
  struct Arc {
    int tail = -1;
    int head = -1;
  };

  std::vector<std::string> vertex_names;
  int root = 0;
  std::vector<Arc> arcs;
  std::vector<Link> links;

  int n() const { return static_cast<int>(vertex_names.size()); }
  int arc_count() const { return static_cast<int>(arcs.size()); }
  int link_count() const { return static_cast<int>(links.size()); }

  int vertex_id(const std::string& name) const;
  const std::string& name(int v) const { return vertex_names[v]; }

  // Derived tree tables, valid after finalize().
  int parent(int v) const { return parent_[v]; }
  int parent_arc(int v) const { return parent_arc_[v]; }
  int depth(int v) const { return depth_[v]; }
  const std::vector<int>& children(int v) const { return children_[v]; }
  bool arc_is_up(int a) const { return arc_is_up_[a]; }
  // Endpoint of `a` farther from the root; a_v == a for this vertex.
  int arc_lower_vertex(int a) const { return arc_lower_[a]; }
  int arc_upper_vertex(int a) const { return arc_lower_[a] == arcs[a].tail ? arcs[a].head : arcs[a].tail; }

  bool is_ancestor(int anc, int v) const {  // anc on the v-r path (reflexive)
    return tin_[anc] <= tin_[v] && tout_[v] <= tout_[anc];
  }
  bool in_subtree(int v, int x) const { return is_ancestor(v, x); }
  int lca(int u, int v) const;
  // arc ancestor: a2 lies on the apex(a1)-r path (strict; a1 != a2 implied)
  bool arc_is_ancestor(int a2, int a1) const;

  const PathView& link_path(int link_id) const { return link_paths_[link_id]; }

  // Rebuilds every derived table; throws InstanceError if (vertices, arcs) is
  // not a tree or the root/link endpoints are out of range.
  void finalize();

 private:
  std::vector<int> parent_, parent_arc_, depth_;
  std::vector<std::vector<int>> children_;
  std::vector<bool> arc_is_up_;
  std::vector<int> arc_lower_;
  std::vector<int> tin_, tout_;
  std::unordered_map<std::string, int> name_to_id_;
  std::vector<PathView> link_paths_;
};

// --- construction -----------------------------------------------------------

class InstanceBuilder {
 public:
  void set_root(const std::string& name, int line = 0);
  void add_arc(const std::string& tail, const std::string& head, int line = 0);
  void add_link(const std::string& tail, const std::string& head, const Rat& cost, int line = 0);

  // Validates, normalizes (drops self-loops and empty-coverage links with a
  // warning, collapses parallel links to the cheapest) and finalizes.
  RootedInstance build(std::vector<std::string>* warnings = nullptr) const;

 private:
  int intern(const std::string& name);
  std::optional<int> lookup(const std::string& name) const;

  std::vector<std::string> names_;
  std::unordered_map<std::string, int> ids_;
  std::optional<int> root_;
  int root_line_ = 0;
  struct RawArc { int tail, head, line; };
  struct RawLink { std::string tail, head; int line; Rat cost; };
  std::vector<RawArc> arcs_;
  std::vector<RawLink> links_;
};

// Text format: '#' comments; lines `root <v>`, `arc <tail> <head>`,
// `link <tail> <head> <cost>`; costs decimal or p/q.
RootedInstance parse_instance(const std::string& text, std::vector<std::string>* warnings = nullptr);
// JSON mirror {root, arcs:[[t,h],...], links:[{tail,head,cost},...]}.
RootedInstance parse_instance_json(const std::string& text, std::vector<std::string>* warnings = nullptr);
// Dispatches on a leading '{'.
RootedInstance parse_instance_auto(const std::string& text, std::vector<std::string>* warnings = nullptr);

std::string instance_to_text(const RootedInstance& inst);
std::string instance_to_json(const RootedInstance& inst);

// FNV-1a over the canonical text serialization.
std::string instance_hash(const RootedInstance& inst);

// --- queries and operations --------------------------------------------------

PathView path_view(const RootedInstance& inst, const Link& link);
PathView path_view(const RootedInstance& inst, int tail, int head);

SubtreeView subtree_view(const RootedInstance& inst, int v);

// Minimal shadow s(l) with ->cov(s(l)) == ->cov(l); nullopt when ->cov is
// empty. Cost is inherited from `link`.
std::optional<Link> generic_shadow(const RootedInstance& inst, const Link& link);

// Path of the generic shadow (used for visibility); empty vertices when
// ->cov(l) is empty.
PathView generic_shadow_path(const RootedInstance& inst, const Link& link);

// Adds every in-order subpair of every link path (including pairs with empty
// forward coverage), deduplicated per ordered pair at minimum cost. Output
// links are sorted by (tail, head).
RootedInstance shadow_complete(const RootedInstance& inst);

struct Contraction {
  RootedInstance inst;
  std::vector<int> vertex_map;  // old vertex -> new vertex
  std::vector<int> link_map;    // old link -> new link id, -1 if dropped
  std::vector<int> link_rep;    // new link -> old link id realizing its cost
};

// Contracts the arcs in `arc_set` (indices into inst.arcs). Links are mapped
// endpoint-wise; links inside one super-vertex are dropped; parallel images
// collapse to the cheapest preimage.
Contraction contract_arcs(const RootedInstance& inst, const std::vector<int>& arc_set);

// True iff every arc is forward-covered by some stored link.
bool is_feasible(const RootedInstance& inst);

// max cost / min cost over links; 1 on empty link sets.
Rat cost_ratio(const RootedInstance& inst);

}  // namespace dtap
