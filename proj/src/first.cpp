#include "xlr/first.hpp"

#include <algorithm>

namespace xlr {

namespace kstr {

KStr make(const std::vector<int>& syms) {
  KStr s = 0;
  for (int x : syms) s = push(s, x, kMaxK);
  return s;
}

std::vector<int> vec(KStr s) {
  std::vector<int> v;
  for (int i = 0; i < len(s); ++i) v.push_back(at(s, i));
  return v;
}

KStr push(KStr a, int sym, int k) {
  int n = len(a);
  if (n >= k) return a;
  return (a & ~KStr{0xffff}) | (static_cast<KStr>(sym) << (48 - 16 * n)) | static_cast<KStr>(n + 1);
}

KStr concat(KStr a, KStr b, int k) {
  int n = len(b);
  for (int i = 0; i < n && len(a) < k; ++i) a = push(a, at(b, i), k);
  return a;
}

KStr ends(int k) {
  KStr s = 0;
  for (int i = 0; i < k; ++i) s = push(s, 0, k);
  return s;
}

std::string str(const Cfg& g, KStr s) {
  if (len(s) == 0) return "ε";
  std::string out;
  for (int i = 0; i < len(s); ++i) {
    if (i) out += " ";
    out += g.names[at(s, i)];
  }
  return out;
}

}  // namespace kstr

void normalize(KSet& s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
}

KSet concat_k(const KSet& a, const KSet& b, int k) {
  KSet out;
  for (KStr x : a) {
    if (kstr::len(x) >= k) {
      out.push_back(x);
      continue;
    }
    for (KStr y : b) out.push_back(kstr::concat(x, y, k));
  }
  normalize(out);
  return out;
}

KSet set_union(const KSet& a, const KSet& b) {
  KSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

KSet set_intersect(const KSet& a, const KSet& b) {
  KSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool intersects(const KSet& a, const KSet& b) {
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j) ++i;
    else ++j;
  }
  return false;
}

bool contains(const KSet& a, KStr s) { return std::binary_search(a.begin(), a.end(), s); }

std::string set_str(const Cfg& g, const KSet& s) {
  std::string out = "{";
  for (size_t i = 0; i < s.size(); ++i) out += (i ? ", " : "") + kstr::str(g, s[i]);
  return out + "}";
}

FirstK::FirstK(const Cfg& g, int k) : g_(g), k_(k) {
  if (k < 0 || k > kMaxK) throw Error("automata", "k must be in 0.." + std::to_string(kMaxK));
  int n = g.num_symbols();
  sym_.assign(n, {});
  for (int t = 0; t < g.num_terminals; ++t)
    sym_[t] = {k == 0 ? kstr::empty() : kstr::push(kstr::empty(), t, k)};
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& p : g.prods) {
      KSet acc{kstr::empty()};
      for (int s : p.rhs) {
        acc = concat_k(acc, sym_[s], k);
        if (acc.empty()) break;
      }
      KSet u = set_union(sym_[p.lhs], acc);
      if (u.size() != sym_[p.lhs].size()) {
        sym_[p.lhs] = std::move(u);
        changed = true;
      }
    }
  }
  offset_.resize(g.prods.size());
  int total = 0;
  for (size_t p = 0; p < g.prods.size(); ++p) {
    offset_[p] = total;
    total += static_cast<int>(g.prods[p].rhs.size()) + 1;
  }
  suffix_.assign(total, {});
  for (size_t p = 0; p < g.prods.size(); ++p) {
    const auto& rhs = g.prods[p].rhs;
    int base = offset_[p];
    suffix_[base + rhs.size()] = {kstr::empty()};
    for (int d = static_cast<int>(rhs.size()) - 1; d >= 0; --d)
      suffix_[base + d] = concat_k(sym_[rhs[d]], suffix_[base + d + 1], k);
  }
}

KSet FirstK::of(const std::vector<int>& syms) const {
  KSet acc{kstr::empty()};
  for (int s : syms) {
    acc = concat_k(acc, sym_[s], k_);
    if (acc.empty()) break;
  }
  return acc;
}

const KSet& FirstK::compat(int p, int dot, KStr lambda) const {
  auto key = std::make_pair(offset_[p] + dot, lambda);
  auto it = compat_cache_.find(key);
  if (it != compat_cache_.end()) return it->second;
  KSet r = concat_k(suffix(p, dot), KSet{lambda}, k_);
  return compat_cache_.emplace(key, std::move(r)).first->second;
}

KSet FirstK::compat_set(int p, int dot, const KSet& lambdas) const {
  return concat_k(suffix(p, dot), lambdas, k_);
}

ItemIndex::ItemIndex(const Cfg& g) {
  offset.resize(g.prods.size());
  for (size_t p = 0; p < g.prods.size(); ++p) {
    offset[p] = count;
    for (size_t d = 0; d <= g.prods[p].rhs.size(); ++d) prod_of.push_back(static_cast<int>(p));
    count += static_cast<int>(g.prods[p].rhs.size()) + 1;
  }
}

}  // namespace xlr
