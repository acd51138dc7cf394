// Forward/backward k-follow set partition optimization.
#ifndef XLR_PARTITION_HPP
#define XLR_PARTITION_HPP

#include <vector>

#include "xlr/automata.hpp"
#include "xlr/follow.hpp"

namespace xlr {

/// Potentially-conflicting lookaheads per item.
using ConflictLookaheads = std::vector<KSet>;

/// Lookaheads on which two items co-resident in a reachable LR(0) DFA state have
/// conflicting canonical actions for some of their reachable follow strings.
ConflictLookaheads potentially_conflicting(const Cfg& g, const FirstK& first,
                                           const ReachableFollows& rf, const Nfa& lr0_nfa,
                                           const Dfa& lr0_dfa);

/// lambda and lambda' share a block iff they agree on compatibility with every
/// potentially-conflicting lookahead of the item.
FollowPartition initial_backward_partition(const Cfg& g, const FirstK& first,
                                           const ReachableFollows& rf,
                                           const ConflictLookaheads& cl);

/// Refines by edge preimages until stable.
FollowPartition backward_refine(const Cfg& g, const FirstK& first, const FollowPartition& L0);

/// Groups the blocks of L0 (kept whole) and refines by edge images until stable,
/// starting from one class per item.
FollowPartition forward_refine(const Cfg& g, const FirstK& first, const FollowPartition& L0);

struct OptimizeStats {
  size_t canonical_blocks = 0;
  size_t backward_blocks = 0;
  size_t optimized_blocks = 0;
};

/// Full pipeline: reachable follows, LR(0) automaton, conflicting lookaheads, one backward
/// pass and one forward pass.
FollowPartition optimize(const Cfg& g, const FirstK& first, OptimizeStats* stats = nullptr);

}  // namespace xlr

#endif
