// Brute-force reference machinery for tests: Earley recognizer/parser and enumeration.
#ifndef XLR_ORACLE_HPP
#define XLR_ORACLE_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <unordered_set>
#include <vector>

#include "xlr/cfg.hpp"

namespace xlr {

struct OracleResult {
  bool member = false;
  int count = 0;  // number of parse trees, saturated at the cap
  std::optional<Tree> tree;  // present iff count == 1
};

/// Earley chart that can be extended and shrunk one token at a time.
class EarleyRecognizer {
 public:
  explicit EarleyRecognizer(const Cfg& g);

  void push(int terminal);
  void pop();
  bool accepted() const;
  bool viable() const { return !sets_.back().items.empty(); }
  int length() const { return static_cast<int>(sets_.size()) - 1; }

  struct Item {
    int prod, dot, origin;
  };
  const std::vector<Item>& items(int j) const { return sets_[j].items; }

 private:
  struct Set {
    std::vector<Item> items;
    std::unordered_set<uint64_t> seen;
  };
  void add(Set& s, Item it);
  void close(int j);

  const Cfg& g_;
  std::vector<char> nullable_;
  std::vector<Set> sets_;
  std::vector<int> input_;
};

/// Recognizes w, counts trees up to count_cap, and extracts the tree when unique.
OracleResult earley(const Cfg& g, const std::vector<int>& w, int count_cap = 1000);

/// Every terminal string of length <= max_len derivable from the start symbol.
std::set<std::vector<int>> enumerate(const Cfg& g, int max_len);

/// Rewrites production ids of a tree through Production::tree.
Tree to_tree_ids(const Cfg& g, const Tree& t);

}  // namespace xlr

#endif
