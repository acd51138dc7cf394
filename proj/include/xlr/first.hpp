// k-bounded terminal strings and First_k(Gen(.)) computation.
#ifndef XLR_FIRST_HPP
#define XLR_FIRST_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "xlr/cfg.hpp"

namespace xlr {

/// Terminal string of length <= 3 packed into 64 bits: three 16-bit slots (first symbol
/// most significant) and the length in the low bits. Numeric order is lexicographic.
using KStr = uint64_t;
using KSet = std::vector<KStr>;  // sorted, unique

constexpr int kMaxK = 3;

namespace kstr {
inline int len(KStr s) { return static_cast<int>(s & 0xffff); }
inline int at(KStr s, int i) { return static_cast<int>((s >> (48 - 16 * i)) & 0xffff); }
inline KStr empty() { return 0; }
KStr make(const std::vector<int>& syms);
std::vector<int> vec(KStr s);
/// Appends as much of b as fits in k.
KStr concat(KStr a, KStr b, int k);
KStr push(KStr a, int sym, int k);
/// The k-string of k sentinels.
KStr ends(int k);
std::string str(const Cfg& g, KStr s);
}  // namespace kstr

KSet concat_k(const KSet& a, const KSet& b, int k);
KSet set_union(const KSet& a, const KSet& b);
KSet set_intersect(const KSet& a, const KSet& b);
bool intersects(const KSet& a, const KSet& b);
bool contains(const KSet& a, KStr s);
void normalize(KSet& s);
std::string set_str(const Cfg& g, const KSet& s);

/// First_k(Gen(.)) for the symbols and production suffixes of a grammar.
class FirstK {
 public:
  FirstK(const Cfg& g, int k);

  int k() const { return k_; }
  const KSet& of_symbol(int s) const { return sym_[s]; }
  /// First_k of rhs[dot..] of production p.
  const KSet& suffix(int p, int dot) const { return suffix_[offset_[p] + dot]; }
  KSet of(const std::vector<int>& syms) const;
  /// First_k(Gen(beta lambda)) with beta = rhs[dot..] of p; cached.
  const KSet& compat(int p, int dot, KStr lambda) const;
  /// First_k(Gen(beta L)) for a set L.
  KSet compat_set(int p, int dot, const KSet& lambdas) const;

 private:
  const Cfg& g_;
  int k_;
  std::vector<KSet> sym_;
  std::vector<int> offset_;
  std::vector<KSet> suffix_;
  mutable std::map<std::pair<int, KStr>, KSet> compat_cache_;
};

/// Item numbering: item (p, dot) has id offset[p] + dot.
struct ItemIndex {
  std::vector<int> offset;
  std::vector<int> prod_of;  // per item
  int count = 0;

  explicit ItemIndex(const Cfg& g);
  ItemIndex() = default;
  int id(int p, int dot) const { return offset[p] + dot; }
  int dot(int item) const { return item - offset[prod_of[item]]; }
};

}  // namespace xlr

#endif
