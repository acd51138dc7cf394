#include "xlr/oracle.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace xlr {

namespace {

std::vector<char> nullable_symbols(const Cfg& g) {
  std::vector<char> n(g.num_symbols(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& p : g.prods) {
      if (n[p.lhs]) continue;
      if (std::all_of(p.rhs.begin(), p.rhs.end(), [&](int s) { return n[s] != 0; }))
        n[p.lhs] = changed = true;
    }
  }
  return n;
}

uint64_t item_key(const EarleyRecognizer::Item& it) {
  return (static_cast<uint64_t>(it.prod) << 40) | (static_cast<uint64_t>(it.dot) << 24) |
         static_cast<uint64_t>(it.origin);
}

}  // namespace

EarleyRecognizer::EarleyRecognizer(const Cfg& g) : g_(g), nullable_(nullable_symbols(g)) {
  sets_.emplace_back();
  for (int p : g_.by_lhs[g_.start]) add(sets_[0], {p, 0, 0});
  close(0);
}

void EarleyRecognizer::add(Set& s, Item it) {
  if (s.seen.insert(item_key(it)).second) s.items.push_back(it);
}

void EarleyRecognizer::close(int j) {
  Set& s = sets_[j];
  for (size_t n = 0; n < s.items.size(); ++n) {
    Item it = s.items[n];
    const Production& p = g_.prods[it.prod];
    if (it.dot == static_cast<int>(p.rhs.size())) {
      const Set& o = sets_[it.origin];
      for (size_t m = 0; m < o.items.size(); ++m) {
        Item w = o.items[m];
        const Production& q = g_.prods[w.prod];
        if (w.dot < static_cast<int>(q.rhs.size()) && q.rhs[w.dot] == p.lhs)
          add(s, {w.prod, w.dot + 1, w.origin});
      }
      continue;
    }
    int y = p.rhs[it.dot];
    if (g_.is_terminal(y)) continue;
    for (int q : g_.by_lhs[y]) add(s, {q, 0, j});
    if (nullable_[y]) add(s, {it.prod, it.dot + 1, it.origin});
  }
}

void EarleyRecognizer::push(int t) {
  int j = static_cast<int>(sets_.size()) - 1;
  input_.push_back(t);
  sets_.emplace_back();
  for (const Item& it : sets_[j].items) {
    const Production& p = g_.prods[it.prod];
    if (it.dot < static_cast<int>(p.rhs.size()) && p.rhs[it.dot] == t)
      add(sets_.back(), {it.prod, it.dot + 1, it.origin});
  }
  close(j + 1);
}

void EarleyRecognizer::pop() {
  if (sets_.size() > 1) {
    sets_.pop_back();
    input_.pop_back();
  }
}

bool EarleyRecognizer::accepted() const {
  for (const Item& it : sets_.back().items)
    if (it.origin == 0 && g_.prods[it.prod].lhs == g_.start &&
        it.dot == static_cast<int>(g_.prods[it.prod].rhs.size()))
      return true;
  return false;
}

namespace {

struct Counter {
  const Cfg& g;
  const std::vector<int>& w;
  int cap;
  std::unordered_set<uint64_t> derivable;
  std::unordered_map<uint64_t, int> sym_memo, seq_memo;
  std::unordered_set<uint64_t> in_progress;

  static uint64_t k3(int a, int i, int j) {
    return (static_cast<uint64_t>(a) << 32) | (static_cast<uint64_t>(i) << 16) |
           static_cast<uint64_t>(j);
  }
  static uint64_t k4(int p, int d, int i, int j) {
    return (static_cast<uint64_t>(p) << 40) | (static_cast<uint64_t>(d) << 32) |
           (static_cast<uint64_t>(i) << 16) | static_cast<uint64_t>(j);
  }
  int mul(int a, int b) const { return a == 0 || b == 0 ? 0 : std::min<int64_t>(cap, int64_t{a} * b); }
  int addc(int a, int b) const { return std::min(cap, a + b); }

  int sym(int a, int i, int j) {
    if (g.is_terminal(a)) return (j == i + 1 && w[i] == a) ? 1 : 0;
    if (!derivable.count(k3(a, i, j))) return 0;
    uint64_t k = k3(a, i, j);
    auto it = sym_memo.find(k);
    if (it != sym_memo.end()) return it->second;
    if (in_progress.count(k)) return cap;  // a derivable cycle: unboundedly many trees
    in_progress.insert(k);
    int total = 0;
    for (int p : g.by_lhs[a]) total = addc(total, seq(p, 0, i, j));
    in_progress.erase(k);
    sym_memo[k] = total;
    return total;
  }

  int seq(int p, int d, int i, int j) {
    const auto& rhs = g.prods[p].rhs;
    if (d == static_cast<int>(rhs.size())) return i == j ? 1 : 0;
    uint64_t k = k4(p, d, i, j);
    auto it = seq_memo.find(k);
    if (it != seq_memo.end()) return it->second;
    int total = 0;
    for (int m = i; m <= j; ++m) {
      int a = sym(rhs[d], i, m);
      if (a == 0) continue;
      total = addc(total, mul(a, seq(p, d + 1, m, j)));
    }
    seq_memo[k] = total;
    return total;
  }

  Tree build_sym(int a, int i, int j) {
    Tree t;
    t.sym = a;
    t.begin = i;
    t.end = j;
    if (g.is_terminal(a)) return t;
    for (int p : g.by_lhs[a])
      if (seq(p, 0, i, j) > 0) {
        t.prod = p;
        build_seq(p, 0, i, j, t.kids);
        break;
      }
    return t;
  }

  void build_seq(int p, int d, int i, int j, std::vector<Tree>& out) {
    const auto& rhs = g.prods[p].rhs;
    if (d == static_cast<int>(rhs.size())) return;
    for (int m = i; m <= j; ++m)
      if (sym(rhs[d], i, m) > 0 && seq(p, d + 1, m, j) > 0) {
        out.push_back(build_sym(rhs[d], i, m));
        build_seq(p, d + 1, m, j, out);
        return;
      }
  }
};

}  // namespace

OracleResult earley(const Cfg& g, const std::vector<int>& w, int count_cap) {
  EarleyRecognizer r(g);
  for (int t : w) r.push(t);
  OracleResult res;
  res.member = r.accepted();
  if (!res.member) return res;
  Counter c{g, w, count_cap, {}, {}, {}, {}};
  int n = static_cast<int>(w.size());
  for (int j = 0; j <= n; ++j)
    for (auto& it : r.items(j))
      if (it.dot == static_cast<int>(g.prods[it.prod].rhs.size()))
        c.derivable.insert(Counter::k3(g.prods[it.prod].lhs, it.origin, j));
  res.count = c.sym(g.start, 0, n);
  if (res.count == 1) res.tree = c.build_sym(g.start, 0, n);
  return res;
}

std::set<std::vector<int>> enumerate(const Cfg& g, int max_len) {
  if (max_len < 0 || max_len > 12) throw Error("oracle", "enumerate: max_len must be in 0..12");
  size_t cap = static_cast<size_t>(max_len);
  std::vector<std::set<std::vector<int>>> lang(g.num_symbols());
  for (int t = 1; t < g.num_terminals; ++t) lang[t].insert({t});
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& p : g.prods) {
      std::set<std::vector<int>> partial{{}};
      for (int s : p.rhs) {
        std::set<std::vector<int>> next;
        for (auto& a : partial)
          for (auto& b : lang[s]) {
            if (a.size() + b.size() > cap) continue;
            auto c = a;
            c.insert(c.end(), b.begin(), b.end());
            next.insert(std::move(c));
          }
        partial = std::move(next);
        if (partial.empty()) break;
      }
      for (auto& s : partial)
        if (lang[p.lhs].insert(s).second) changed = true;
    }
  }
  return lang[g.start];
}

Tree to_tree_ids(const Cfg& g, const Tree& t) {
  Tree o = t;
  if (t.prod >= 0) o.prod = g.prods[t.prod].tree;
  o.sym = g.labels[g.label[t.sym]].flat;
  for (auto& k : o.kids) k = to_tree_ids(g, k);
  return o;
}

}  // namespace xlr
