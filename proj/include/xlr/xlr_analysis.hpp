// XLR(k, t) certification: fork points, join safety and fork degree on the canonical NFA.
#ifndef XLR_XLR_ANALYSIS_HPP
#define XLR_XLR_ANALYSIS_HPP

#include <string>
#include <vector>

#include "xlr/automata.hpp"

namespace xlr {

struct ForkPoint {
  int vertex = -1;
  int degree = 0;
  std::vector<std::vector<int>> classes;  // per conflicting action: epsilon targets of v
  bool on_cycle = false;                  // v can be revisited on a path to the conflict
};

/// Vertices of the conflict per distinct action (in the order of Conflict::actions).
std::vector<std::vector<int>> conflict_sites(const Nfa& nfa, const Dfa& dfa, const Conflict& c);

/// Vertices that every path to the conflicting items passes through and whose epsilon
/// edges split those paths by action.
std::vector<ForkPoint> find_fork_points(const Nfa& nfa, const Dfa& dfa, const Conflict& c);

struct JoinCheck {
  enum Result { Safe, Unsafe, Unknown };
  Result result = Unknown;
  std::vector<int> tail_a, tail_b;  // join tails of the offending pair
  std::vector<int> z, z2;           // witness: tail_a =>* z and tail_b =>* z z2 (or swapped)
  bool witness_complete = true;     // z2 may be a truncated prefix
  std::string detail;
};
const char* join_result_name(JoinCheck::Result r);

/// Prefix-freeness of the join tails of epsilon edges in different classes, decided by
/// comparing First_j sets for j up to depth_bound.
JoinCheck check_join_safe(const Cfg& g, const Nfa& nfa, const ForkPoint& f, int depth_bound);

/// Languages of two symbol strings: is neither a prefix of the other? (the pairwise core)
JoinCheck prefix_free(const Cfg& g, const std::vector<int>& a, const std::vector<int>& b,
                      int depth_bound);

constexpr long long kInfiniteDegree = -1;

/// Minimum over assignments of conflicts to candidate fork points of the maximum, over NFA
/// paths from the start, of the product of vertex degrees. kInfiniteDegree when every
/// assignment uses a fork point on a cycle. choice receives the chosen index per conflict.
long long fork_degree(const Nfa& nfa, const std::vector<std::vector<ForkPoint>>& candidates,
                      std::vector<int>* choice = nullptr);

struct XlrCertificate {
  bool certified = false;
  int k = 1;
  long long t = kInfiniteDegree;
  std::vector<Conflict> conflicts;
  std::vector<ForkPoint> forks;      // chosen, per conflict
  std::vector<JoinCheck> evidence;   // per conflict
  std::string reason;                // when not certified

  std::string str(const Cfg& g, const Nfa& nfa) const;
};

/// Runs the analysis on the canonical LR(k) automaton of g.
XlrCertificate certify_xlr(const Cfg& g, int k, int depth_bound = 16);
/// Same, on an already built canonical automaton.
XlrCertificate certify_xlr(const Cfg& g, const Nfa& nfa, const Dfa& dfa, int depth_bound = 16);

}  // namespace xlr

#endif
