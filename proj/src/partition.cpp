#include "xlr/partition.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace xlr {

namespace {

// Partition of each item's universe held as one class id per universe index.
struct Classes {
  std::vector<std::vector<int>> cls;
  std::vector<int> count;

  bool refine(int item, const std::vector<char>& in) {
    std::map<std::pair<int, int>, int> ids;
    std::vector<int> next(cls[item].size());
    for (size_t j = 0; j < next.size(); ++j) {
      auto key = std::make_pair(cls[item][j], static_cast<int>(in[j]));
      auto it = ids.emplace(key, static_cast<int>(ids.size())).first;
      next[j] = it->second;
    }
    bool changed = static_cast<int>(ids.size()) != count[item];
    cls[item] = std::move(next);
    count[item] = static_cast<int>(ids.size());
    return changed;
  }

  std::vector<KSet> blocks(int item, const KSet& universe) const {
    std::vector<KSet> out(count[item]);
    for (size_t j = 0; j < universe.size(); ++j) out[cls[item][j]].push_back(universe[j]);
    return out;
  }
};

Classes from_partition(const FollowPartition& L) {
  Classes c;
  c.cls.resize(L.items.count);
  c.count.assign(L.items.count, 0);
  for (int it = 0; it < L.items.count; ++it) {
    c.cls[it].assign(L.universe[it].size(), 0);
    for (size_t b = 0; b < L.blocks[it].size(); ++b)
      for (KStr s : L.blocks[it][b]) {
        auto pos = std::lower_bound(L.universe[it].begin(), L.universe[it].end(), s);
        c.cls[it][pos - L.universe[it].begin()] = static_cast<int>(b);
      }
    c.count[it] = static_cast<int>(L.blocks[it].size());
  }
  return c;
}

FollowPartition to_partition(const FollowPartition& shape, const Classes& c) {
  FollowPartition out = shape;
  for (int it = 0; it < out.items.count; ++it) out.blocks[it] = c.blocks(it, out.universe[it]);
  out.canonicalize();
  return out;
}

// Occurrences (prod, dot) of each nonterminal.
std::vector<std::vector<std::pair<int, int>>> occurrences(const Cfg& g) {
  std::vector<std::vector<std::pair<int, int>>> occ(g.num_symbols());
  for (auto& p : g.prods)
    for (size_t d = 0; d < p.rhs.size(); ++d)
      if (!g.is_terminal(p.rhs[d])) occ[p.rhs[d]].push_back({p.id, static_cast<int>(d)});
  return occ;
}

}  // namespace

ConflictLookaheads potentially_conflicting(const Cfg& g, const FirstK& first,
                                           const ReachableFollows& rf, const Nfa& lr0_nfa,
                                           const Dfa& lr0_dfa) {
  ItemIndex items(g);
  ConflictLookaheads cl(items.count);
  std::vector<KSet> shift_la(items.count);
  std::vector<char> has_shift(items.count, 0);
  for (auto& p : g.prods)
    for (size_t d = 0; d < p.rhs.size(); ++d)
      if (g.is_terminal(p.rhs[d])) {
        int it = items.id(p.id, static_cast<int>(d));
        shift_la[it] = first.compat_set(p.id, static_cast<int>(d), rf[p.id]);
        has_shift[it] = 1;
      }
  auto mark = [&](int it, const KSet& s) {
    if (!s.empty()) cl[it] = set_union(cl[it], s);
  };
  for (auto& st : lr0_dfa.states) {
    std::vector<int> reduces, shifts;
    for (int v : st.nfa) {
      const NfaVertex& x = lr0_nfa.vertices[v];
      if (x.is_hash()) continue;
      int it = items.id(x.prod, x.dot);
      if (x.dot == static_cast<int>(g.prods[x.prod].rhs.size())) reduces.push_back(it);
      else if (has_shift[it]) shifts.push_back(it);
    }
    for (size_t a = 0; a < reduces.size(); ++a) {
      int ra = reduces[a], pa = items.prod_of[ra];
      Action act_a = Action::reduce(g.prods[pa], g.label[g.prods[pa].lhs]);
      for (size_t b = a + 1; b < reduces.size(); ++b) {
        int rb = reduces[b], pb = items.prod_of[rb];
        if (act_a == Action::reduce(g.prods[pb], g.label[g.prods[pb].lhs])) continue;
        KSet both = set_intersect(rf[pa], rf[pb]);
        mark(ra, both);
        mark(rb, both);
      }
      for (int s : shifts) {
        KSet both = set_intersect(rf[pa], shift_la[s]);
        mark(ra, both);
        mark(s, both);
      }
    }
  }
  return cl;
}

FollowPartition initial_backward_partition(const Cfg& g, const FirstK& first,
                                           const ReachableFollows& rf,
                                           const ConflictLookaheads& cl) {
  FollowPartition fp;
  fp.k = first.k();
  fp.items = ItemIndex(g);
  fp.universe.resize(fp.items.count);
  fp.blocks.resize(fp.items.count);
  for (int it = 0; it < fp.items.count; ++it) {
    int p = fp.items.prod_of[it], d = fp.items.dot(it);
    fp.universe[it] = rf[p];
    std::map<std::vector<char>, KSet> groups;
    for (KStr lam : rf[p]) {
      const KSet& c = first.compat(p, d, lam);
      std::vector<char> sig;
      for (KStr mu : cl[it]) sig.push_back(contains(c, mu) ? 1 : 0);
      groups[sig].push_back(lam);
    }
    for (auto& [sig, b] : groups) fp.blocks[it].push_back(std::move(b));
  }
  fp.canonicalize();
  return fp;
}

FollowPartition backward_refine(const Cfg& g, const FirstK& first, const FollowPartition& L0) {
  Classes c = from_partition(L0);
  auto occ = occurrences(g);
  const ItemIndex& items = L0.items;
  std::deque<int> work;
  std::vector<char> queued(items.count, 1);
  for (int it = 0; it < items.count; ++it) work.push_back(it);
  auto push = [&](int it) {
    if (!queued[it]) {
      queued[it] = 1;
      work.push_back(it);
    }
  };
  while (!work.empty()) {
    int it = work.front();
    work.pop_front();
    queued[it] = 0;
    int p = items.prod_of[it], d = items.dot(it);
    auto blocks = c.blocks(it, L0.universe[it]);
    if (d > 0) {
      int pred = items.id(p, d - 1);
      const KSet& u = L0.universe[pred];
      for (auto& z : blocks) {
        std::vector<char> in(u.size());
        for (size_t j = 0; j < u.size(); ++j) in[j] = contains(z, u[j]);
        if (c.refine(pred, in)) push(pred);
      }
    } else {
      for (auto [q, e] : occ[g.prods[p].lhs]) {
        int pred = items.id(q, e);
        const KSet& u = L0.universe[pred];
        for (auto& z : blocks) {
          std::vector<char> in(u.size());
          for (size_t j = 0; j < u.size(); ++j) in[j] = intersects(first.compat(q, e + 1, u[j]), z);
          if (c.refine(pred, in)) push(pred);
        }
      }
    }
  }
  return to_partition(L0, c);
}

FollowPartition forward_refine(const Cfg& g, const FirstK& first, const FollowPartition& L0) {
  const ItemIndex& items = L0.items;
  int n = items.count;
  // atoms are the blocks of L0; images are sets of atom indices
  std::vector<std::vector<int>> fcls(n);
  std::vector<int> fcount(n, 1);
  for (int it = 0; it < n; ++it) fcls[it].assign(L0.blocks[it].size(), 0);

  // successor item -> per source atom, the target atoms
  struct Succ {
    int item;
    std::vector<std::vector<int>> img;
  };
  std::vector<std::vector<Succ>> succ(n);
  for (int it = 0; it < n; ++it) {
    int p = items.prod_of[it], d = items.dot(it);
    const auto& rhs = g.prods[p].rhs;
    if (d == static_cast<int>(rhs.size())) continue;
    const auto& atoms = L0.blocks[it];
    auto image_into = [&](int target, auto&& look_of) {
      Succ s{target, {}};
      for (auto& a : atoms) {
        KSet look = look_of(a);
        std::vector<int> img;
        for (size_t b = 0; b < L0.blocks[target].size(); ++b)
          if (intersects(L0.blocks[target][b], look)) img.push_back(static_cast<int>(b));
        s.img.push_back(std::move(img));
      }
      succ[it].push_back(std::move(s));
    };
    image_into(items.id(p, d + 1), [](const KSet& a) { return a; });
    if (!g.is_terminal(rhs[d]))
      for (int q : g.by_lhs[rhs[d]])
        image_into(items.id(q, 0), [&](const KSet& a) { return first.compat_set(p, d + 1, a); });
  }

  std::deque<int> work;
  std::vector<char> queued(n, 1);
  for (int it = 0; it < n; ++it) work.push_back(it);
  while (!work.empty()) {
    int it = work.front();
    work.pop_front();
    queued[it] = 0;
    for (auto& s : succ[it]) {
      for (int cls = 0; cls < fcount[it]; ++cls) {
        std::vector<char> in(L0.blocks[s.item].size(), 0);
        bool any = false;
        for (size_t a = 0; a < fcls[it].size(); ++a)
          if (fcls[it][a] == cls)
            for (int b : s.img[a]) in[b] = any = true;
        if (!any) continue;
        std::map<std::pair<int, int>, int> ids;
        std::vector<int> next(in.size());
        for (size_t b = 0; b < in.size(); ++b)
          next[b] = ids.emplace(std::make_pair(fcls[s.item][b], static_cast<int>(in[b])),
                                static_cast<int>(ids.size()))
                        .first->second;
        if (static_cast<int>(ids.size()) != fcount[s.item]) {
          fcls[s.item] = std::move(next);
          fcount[s.item] = static_cast<int>(ids.size());
          if (!queued[s.item]) {
            queued[s.item] = 1;
            work.push_back(s.item);
          }
        }
      }
    }
  }

  FollowPartition out = L0;
  for (int it = 0; it < n; ++it) {
    std::vector<KSet> merged(L0.blocks[it].empty() ? 0 : fcount[it]);
    for (size_t a = 0; a < L0.blocks[it].size(); ++a)
      merged[fcls[it][a]] = set_union(merged[fcls[it][a]], L0.blocks[it][a]);
    out.blocks[it] = std::move(merged);
  }
  out.canonicalize();
  return out;
}

FollowPartition optimize(const Cfg& g, const FirstK& first, OptimizeStats* stats) {
  FirstK first0(g, 0);
  Nfa lr0 = build_lr_nfa(g, first0, coarsest_partition(g, first0));
  Dfa lr0_dfa = subset_construct(g, lr0);
  ReachableFollows rf = forward_reachable(g, first);
  ConflictLookaheads cl = potentially_conflicting(g, first, rf, lr0, lr0_dfa);
  FollowPartition init = initial_backward_partition(g, first, rf, cl);
  FollowPartition bwd = backward_refine(g, first, init);
  FollowPartition fwd = forward_refine(g, first, bwd);
  if (stats) {
    for (auto& u : init.universe) stats->canonical_blocks += u.size();
    stats->backward_blocks = bwd.total_blocks();
    stats->optimized_blocks = fwd.total_blocks();
  }
  return fwd;
}

}  // namespace xlr
