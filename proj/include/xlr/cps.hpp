// CPS transformation of a flattened grammar.
#ifndef XLR_CPS_HPP
#define XLR_CPS_HPP

#include <set>
#include <utility>
#include <vector>

#include "xlr/cfg.hpp"

namespace xlr {

enum class CpsMode { Off, AllEligible, ConflictDriven };

/// A tail context: symbols of the CPS grammar with their unfoldable marks.
using Tail = std::vector<std::pair<int, char>>;

struct CpsMap {
  struct Entry {
    int orig = 0;  // production id in the input grammar
    int r = 0;     // original rhs length
    int m = 0;     // CPS rhs length
  };
  std::vector<Entry> prods;                   // per CPS production
  std::vector<std::vector<int>> tail_symbol;  // per input symbol: tau_X as CPS symbols
  std::vector<std::vector<std::vector<int>>> tail_item;  // per input production and dot
  std::vector<int> hat;                       // input symbol -> CPS symbol
  std::vector<int> invocations;               // CPSSym calls per input symbol
};

/// Eligible symbols occurring exactly once outside their own trailing repeat position.
std::set<int> cps_candidates(const Cfg& g);

/// All candidates, or only those whose reductions conflict in the SLR(1) automaton.
std::set<int> select_cps_triggering(const Cfg& g, CpsMode mode);

/// Returns the CPS grammar. Input symbol ids are kept; a triggering symbol's id holds its
/// hat. Throws if a triggering symbol would need two tail contexts.
Cfg cps_transform(const Cfg& g, const std::set<int>& triggering, CpsMap* map = nullptr);

}  // namespace xlr

#endif
