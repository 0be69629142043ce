#pragma once

#include <map>
#include <vector>

#include "dtap/instance.hpp"
#include "dtap/lp.hpp"

namespace dtap {

// Def 5.1-style independence of a vertex with respect to a link set.
bool is_up_independent(const RootedInstance& inst, int v, const std::vector<int>& link_set);
bool is_down_independent(const RootedInstance& inst, int v, const std::vector<int>& link_set);

enum class LinkClass { Up, Down, WCross };

struct WillowCertificate {
  std::vector<int> w;                // witness vertices, sorted; always contains r
  std::vector<bool> up_independent;  // parallel to w
  std::vector<bool> down_independent;
  std::vector<int> link_ids;         // the classified link set
  std::vector<LinkClass> link_class; // parallel to link_ids
};

struct RecognitionResult {
  bool willow = false;
  WillowCertificate cert;
  int violator = -1;  // an apex that is neither up- nor down-independent
};

// W is canonicalized to the minimal admissible set: apices of links that are
// neither up- nor down-links, plus the root.
RecognitionResult recognize_willow(const RootedInstance& inst, const std::vector<int>& link_set);
RecognitionResult recognize_willow(const RootedInstance& inst);  // all links

struct GHSigning {
  std::vector<int> b_arcs;          // the signed row subset B
  std::map<int, int> sigma;         // arc -> +1/-1, domain B
  std::map<int, int> phi_up;        // W vertex -> +1/-1
  std::map<int, int> phi_down;
  std::map<int, int> mu;            // arc -> anchor W vertex
};

// Constructive Ghouila-Houri signing for a certified willow. Verifies the
// per-link condition on every classified link and throws on violation (which
// would indicate a recognition bug).
GHSigning gh_signing(const RootedInstance& inst, const WillowCertificate& cert,
                     const std::vector<int>& b_arcs);

enum class WillowSolveStatus { Solved, NotWillow, Infeasible, NotIntegral };

struct WillowSolveResult {
  WillowSolveStatus status = WillowSolveStatus::NotWillow;
  std::vector<int> links;
  Rat cost;
  int violator = -1;
};

// recognize + exact LP + integrality extraction.
WillowSolveResult solve_willow(const RootedInstance& inst);

// True iff every square submatrix determinant lies in {-1,0,1}. Throws
// InstanceError when the matrix exceeds 8x8.
bool verify_tu_bruteforce(const CoverageMatrix& m);

}  // namespace dtap
