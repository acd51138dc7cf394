#include "xlr/follow.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace xlr {

ReachableFollows forward_reachable(const Cfg& g, const FirstK& first) {
  int np = static_cast<int>(g.prods.size());
  ReachableFollows rf(np);
  std::deque<int> work;
  std::vector<char> queued(np, 0);
  for (int p : g.by_lhs[g.start]) {
    rf[p] = {kstr::ends(first.k())};
    work.push_back(p);
    queued[p] = 1;
  }
  while (!work.empty()) {
    int p = work.front();
    work.pop_front();
    queued[p] = 0;
    const auto& rhs = g.prods[p].rhs;
    for (size_t d = 0; d < rhs.size(); ++d) {
      int y = rhs[d];
      if (g.is_terminal(y)) continue;
      KSet add = first.compat_set(p, static_cast<int>(d) + 1, rf[p]);
      for (int q : g.by_lhs[y]) {
        KSet u = set_union(rf[q], add);
        if (u.size() == rf[q].size()) continue;
        rf[q] = std::move(u);
        if (!queued[q]) {
          queued[q] = 1;
          work.push_back(q);
        }
      }
    }
  }
  return rf;
}

int FollowPartition::block_of(int item, KStr s) const {
  const auto& bs = blocks[item];
  for (size_t b = 0; b < bs.size(); ++b)
    if (contains(bs[b], s)) return static_cast<int>(b);
  return -1;
}

size_t FollowPartition::total_blocks() const {
  size_t n = 0;
  for (auto& b : blocks) n += b.size();
  return n;
}

void FollowPartition::canonicalize() {
  for (auto& bs : blocks) {
    for (auto& b : bs) normalize(b);
    bs.erase(std::remove_if(bs.begin(), bs.end(), [](const KSet& b) { return b.empty(); }),
             bs.end());
    std::sort(bs.begin(), bs.end(), [](const KSet& a, const KSet& b) { return a[0] < b[0]; });
  }
}

bool FollowPartition::valid() const {
  for (size_t i = 0; i < blocks.size(); ++i) {
    KSet all;
    size_t n = 0;
    for (auto& b : blocks[i]) {
      if (b.empty()) return false;
      n += b.size();
      all = set_union(all, b);
    }
    if (all.size() != n || all != universe[i]) return false;
  }
  return true;
}

std::string FollowPartition::str(const Cfg& g) const {
  std::ostringstream os;
  for (int it = 0; it < items.count; ++it) {
    os << g.item_str(items.prod_of[it], items.dot(it)) << " :";
    for (auto& b : blocks[it]) os << " " << set_str(g, b);
    os << "\n";
  }
  return os.str();
}

namespace {

FollowPartition base(const Cfg& g, const FirstK& first) {
  FollowPartition fp;
  fp.k = first.k();
  fp.items = ItemIndex(g);
  auto rf = forward_reachable(g, first);
  fp.universe.resize(fp.items.count);
  fp.blocks.resize(fp.items.count);
  for (int it = 0; it < fp.items.count; ++it) fp.universe[it] = rf[fp.items.prod_of[it]];
  return fp;
}

}  // namespace

FollowPartition canonical_partition(const Cfg& g, const FirstK& first) {
  FollowPartition fp = base(g, first);
  for (int it = 0; it < fp.items.count; ++it)
    for (KStr s : fp.universe[it]) fp.blocks[it].push_back({s});
  return fp;
}

FollowPartition coarsest_partition(const Cfg& g, const FirstK& first) {
  FollowPartition fp = base(g, first);
  for (int it = 0; it < fp.items.count; ++it)
    if (!fp.universe[it].empty()) fp.blocks[it].push_back(fp.universe[it]);
  return fp;
}

}  // namespace xlr
