// LR(k) and RD NFAs over follow partitions, and DFAs by subset construction.
#ifndef XLR_AUTOMATA_HPP
#define XLR_AUTOMATA_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "xlr/follow.hpp"

namespace xlr {

/// Accept action. Reduce carries the descriptor used by the runtime: tree production of the
/// flat grammar, its arity r, the rhs length m of the reduced production, and the goto label.
/// Recur carries a symbol, Return the label of the returned symbol.
struct Action {
  enum Kind { Shift, Reduce, Recur, Return };
  Kind kind = Shift;
  int tree = -1;
  int arity = 0;
  int m = 0;
  int label = -1;

  static Action shift() { return {}; }
  static Action reduce(const Production& p, int goto_label);
  static Action recur(int sym) { return {Recur, -1, 0, 0, sym}; }
  static Action ret(int label) { return {Return, -1, 0, 0, label}; }

  auto key() const { return std::tie(kind, tree, arity, m, label); }
  bool operator==(const Action& o) const { return key() == o.key(); }
  bool operator<(const Action& o) const { return key() < o.key(); }
  std::string str(const Cfg& g) const;
};

using ActionMap = std::map<KStr, std::vector<Action>>;  // sorted unique action lists

/// NFA vertex: (dotted production, follow block), plus the RD left-recursion tag.
/// The special productions #R -> .R and #R -> R. use hash = R and dot 0/1.
struct NfaVertex {
  int prod = -1;
  int dot = 0;
  int hash = -1;
  int rtag = -1;  // RD only; -1 is bottom
  int block = 0;  // index into the follow partition blocks of the item
  KSet follows;

  bool is_hash() const { return hash >= 0; }
};

struct NfaEdge {
  bool recur = false;  // RecurStep(sym)
  int sym = 0;
  int target = 0;
};

struct Nfa {
  int k = 1;
  bool rd = false;
  std::vector<NfaVertex> vertices;
  int start = 0;
  std::vector<std::vector<int>> eps;
  std::vector<std::vector<NfaEdge>> steps;
  std::vector<ActionMap> actions;

  int size() const { return static_cast<int>(vertices.size()); }
  std::string vertex_str(const Cfg& g, int v) const;
};

Nfa build_lr_nfa(const Cfg& g, const FirstK& first, const FollowPartition& L);

/// RD NFA over the same follow partition. #R items carry one block holding every follow
/// string of a non-unfoldable occurrence of R.
Nfa build_rd_nfa(const Cfg& g, const FirstK& first, const FollowPartition& L);

/// DFA edge label: a symbol label with a concrete attribute value, or RecurStep(sym).
using EdgeKey = uint64_t;
namespace edge {
inline EdgeKey sym(int label, int value) {
  return (static_cast<uint64_t>(label) << 24) | static_cast<uint64_t>(value);
}
inline EdgeKey recur(int sym) { return (uint64_t{1} << 48) | (static_cast<uint64_t>(sym) << 24); }
inline bool is_recur(EdgeKey e) { return (e >> 48) != 0; }
inline int label(EdgeKey e) { return static_cast<int>((e >> 24) & 0xffffff); }
inline int value(EdgeKey e) { return static_cast<int>(e & 0xffffff); }
std::string str(const Cfg& g, EdgeKey e);
}  // namespace edge

struct DfaState {
  std::vector<int> nfa;  // sorted NFA vertex ids
  std::vector<std::pair<EdgeKey, int>> edges;  // sorted by key
  ActionMap actions;

  int next(EdgeKey e) const;  // -1 if none
};

struct Dfa {
  int k = 1;
  bool rd = false;
  std::vector<DfaState> states;  // state 0 is the start

  int size() const { return static_cast<int>(states.size()); }
};

/// NFA edge labels an instance symbol matches in the DFA: one per inhabited value
/// satisfying the symbol's lower bounds.
std::vector<EdgeKey> edge_keys(const Cfg& g, const NfaEdge& e);

Dfa subset_construct(const Cfg& g, const Nfa& nfa);

struct Conflict {
  int state = 0;
  KStr lookahead = 0;
  std::vector<Action> actions;
};

std::vector<Conflict> detect_conflicts(const Dfa& dfa);

/// Witness symbols of a cycle made of RecurStep edges, if any.
std::optional<std::vector<int>> find_recur_cycle(const Dfa& dfa);
/// Throws Error("automata", "InfiniteRecursion: ...") on a RecurStep cycle.
void check_recur_cycles(const Cfg& g, const Dfa& dfa);

std::string dump(const Cfg& g, const Nfa& nfa, const Dfa& dfa);

}  // namespace xlr

#endif
