// k-follow universes and partitions per dotted production.
#ifndef XLR_FOLLOW_HPP
#define XLR_FOLLOW_HPP

#include <string>
#include <vector>

#include "xlr/first.hpp"

namespace xlr {

/// Forward-reachable k-follow strings per production.
using ReachableFollows = std::vector<KSet>;

/// Least fixed point: the sentinel string at the start productions, and
/// First_k(beta lambda) at every production of Y for each occurrence X -> alpha Y beta.
ReachableFollows forward_reachable(const Cfg& g, const FirstK& first);

/// Universe and partition of k-follow strings for every dotted production.
struct FollowPartition {
  int k = 1;
  ItemIndex items;
  std::vector<KSet> universe;             // per item: U of its production
  std::vector<std::vector<KSet>> blocks;  // per item, sorted by smallest member

  int block_of(int item, KStr s) const;  // -1 if absent
  size_t total_blocks() const;
  void canonicalize();  // sort blocks for a stable order
  /// Blocks are disjoint and cover the universe.
  bool valid() const;
  std::string str(const Cfg& g) const;
};

/// One singleton block per follow string (canonical LR(k)).
FollowPartition canonical_partition(const Cfg& g, const FirstK& first);
/// One block holding the whole universe (SLR(k)).
FollowPartition coarsest_partition(const Cfg& g, const FirstK& first);

}  // namespace xlr

#endif
