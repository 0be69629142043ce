#pragma once

#include <map>
#include <vector>

#include "dtap/instance.hpp"
#include "dtap/lp.hpp"

namespace dtap {

// A link universe closed under shadows: the shadow-completion of an input
// instance, with provenance back to the input links. Split pieces are always
// existing universe links, so supp(sigma) stays well-defined and piece costs
// are the shadow-inherited minima.
class Workspace {
 public:
  explicit Workspace(const RootedInstance& input);

  const RootedInstance& inst() const { return inst_; }
  const RootedInstance& input() const { return input_; }

  // universe link id for an ordered pair; -1 if the pair is not a shadow of
  // any input link
  int find_pair(int tail, int head) const;
  // input link whose cost the universe link inherited
  int origin(int link) const { return origin_[link]; }
  // universe id of an input link (its own pair)
  int from_input(int input_link) const { return from_input_[input_link]; }

 private:
  RootedInstance input_;
  RootedInstance inst_;
  std::map<std::pair<int, int>, int> pair_index_;
  std::vector<int> origin_;
  std::vector<int> from_input_;
};

struct SplitError : std::runtime_error {
  explicit SplitError(const std::string& msg) : std::runtime_error(msg) {}
};

// sigma: link -> set of shadows whose paths partition the link's path.
// Stored sparsely; absent entries are the identity.
class Splitting {
 public:
  static Splitting identity() { return Splitting{}; }

  bool is_identity_on(int link) const { return !parts_.count(link); }
  std::vector<int> image(int link) const;
  void set_image(int link, std::vector<int> pieces);
  const std::map<int, std::vector<int>>& entries() const { return parts_; }

  // supp(sigma) over a universe of `universe_size` links.
  std::vector<int> support(int universe_size) const;

 private:
  std::map<int, std::vector<int>> parts_;
};

// Checks the shadow-partition property of every non-identity entry.
void validate_splitting(const Workspace& ws, const Splitting& s);

// x'_{l'} = sum over l with l' in sigma(l) of x_l. Validates sigma.
FractionalSolution apply_splitting(const Workspace& ws, const FractionalSolution& x, const Splitting& s);

// sigma_{v,L'}: splits every l in `link_set` with v strictly inside P_l into
// the two shadows meeting at v.
Splitting split_at_vertex(const Workspace& ws, int v, const std::vector<int>& link_set);

// sigma_{L'}: splits every link in `link_set` that is neither an up- nor a
// down-link at its apex.
Splitting split_at_apex(const Workspace& ws, const std::vector<int>& link_set);

// Splits `link` at the given cut vertices (which must lie on its path);
// degenerate pieces are dropped. Helper for the three-way core splits.
std::vector<int> split_link_at(const Workspace& ws, int link, const std::vector<int>& cuts);

// (later o earlier)(l) = union over p in earlier(l) of later(p).
Splitting compose(const Splitting& later, const Splitting& earlier);

// c(x) + sum_l (|sigma(l)|-1) * c(l) * x_l; also asserts that the actual cost
// of split(x, sigma) respects the bound.
Rat cost_increase_bound(const Workspace& ws, const FractionalSolution& x, const Splitting& s);

}  // namespace dtap
