// Conflict tracing: shortest "confusing input" pairs for automaton conflicts.
#ifndef XLR_TRACE_HPP
#define XLR_TRACE_HPP

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xlr/automata.hpp"

namespace xlr {

/// Shortest generated terminal string per symbol.
struct GenEntry {
  static constexpr int kInf = std::numeric_limits<int>::max();
  int len = kInf;
  std::vector<int> str;
  bool present() const { return len != kInf; }
};
using GenTable = std::vector<GenEntry>;

GenTable gen_table(const Cfg& g);

/// k-prefix tables: for each symbol and each production tail, prefix -> shortest string.
struct PrefixTables {
  using Table = std::map<KStr, std::vector<int>>;
  int k = 1;
  ItemIndex items;
  std::vector<Table> sym;   // per symbol
  std::vector<Table> tail;  // per item: table of rhs[dot..]
};

PrefixTables prefix_tables(const Cfg& g, int k);

/// Shortest string generated by zeta that begins with lambda, if any.
std::optional<std::vector<int>> prefix_match(const PrefixTables& pt, KStr lambda,
                                             const std::vector<int>& zeta);

struct ConflictTrace {
  int state = 0;
  KStr lookahead = 0;
  Action a, b;
  std::vector<EdgeKey> dfa_path;
  std::vector<int> path_a, path_b;  // NFA vertices from the start
  std::vector<int> prefix;          // terminals shared by both inputs
  std::vector<int> input_a, input_b;  // raw, ending in k sentinels when complete
  bool complete = false;            // false: CompletionNotFound
  std::string note;

  /// Inputs with the trailing sentinels removed.
  std::vector<int> display_a() const;
  std::vector<int> display_b() const;
  std::string str(const Cfg& g, const Nfa& nfa) const;
};

/// Traces the conflict between actions a and b of c. LR automata only.
ConflictTrace trace_conflict(const Cfg& g, const Nfa& nfa, const Dfa& dfa, const Conflict& c,
                             const Action& a, const Action& b, const GenTable& gen,
                             const PrefixTables& pt);

/// One trace per conflict, for its first two actions.
std::vector<ConflictTrace> trace_conflicts(const Cfg& g, const Nfa& nfa, const Dfa& dfa,
                                           const std::vector<Conflict>& conflicts);

}  // namespace xlr

#endif
