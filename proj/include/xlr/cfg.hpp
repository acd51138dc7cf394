// Flat context-free grammar shared by every stage after flattening.
#ifndef XLR_CFG_HPP
#define XLR_CFG_HPP

#include <string>
#include <vector>

#include "xlr/grammar.hpp"

namespace xlr {

struct FlatConstraint {
  enum Form { LhsLeq, RhsIGeq, LhsLeqRhsI };
  Form form = LhsLeq;
  int i = 0;  // 1-based rhs index (unused for LhsLeq)
  std::string key;
  std::string key2;  // LhsLeqRhsI only: key in the rhs symbol's domain
  int bound = 0;
  bool operator==(const FlatConstraint& o) const {
    return form == o.form && i == o.i && key == o.key && key2 == o.key2 && bound == o.bound;
  }
  bool operator<(const FlatConstraint& o) const;
};

struct Provenance {
  enum Role { TopLevel, FreshConcat, FreshAlt, FreshOpt, FreshStar, FreshPlus, FreshList, Wrapper };
  int rule = -1;  // index into BnfGrammar::rules, -1 for a wrapper
  Role role = TopLevel;
};
const char* role_name(Provenance::Role r);

struct Production {
  int id = 0;
  int lhs = 0;
  std::vector<int> rhs;
  Provenance prov;
  std::vector<FlatConstraint> constraints;
  std::vector<char> unfold;  // per rhs position: occurrence is unfoldable (RD)
  // Reduce descriptor: tree production in the flat grammar, its arity, and the goto label.
  int tree = 0;
  int arity = 0;
};

/// A goto label: terminal, flat nonterminal, or CPS symbol. Carries the attribute domain.
struct Label {
  std::string name;
  bool terminal = false;
  bool hat = false;
  int flat = -1;  // flat symbol this label derives from
  std::vector<AttrDecl> domain;
  std::vector<int> values;  // inhabited value indices (see inhabited_values)

  int value_count() const;
};

/// \brief Context-free grammar. Symbol 0 is the sentinel; terminals are 0..num_terminals-1.
struct Cfg {
  std::vector<std::string> names;
  int num_terminals = 1;
  int start = -1;
  std::vector<Production> prods;
  std::vector<int> label;                 // per symbol
  std::vector<std::vector<int>> bound;    // per symbol, lower bounds per label domain key
  std::vector<char> cps_eligible;         // per symbol
  std::vector<Label> labels;              // shared label table
  std::vector<std::vector<int>> by_lhs;   // production ids per symbol

  int num_symbols() const { return static_cast<int>(names.size()); }
  bool is_terminal(int s) const { return s < num_terminals; }
  int find(const std::string& name) const;  // -1 if absent
  int add_symbol(const std::string& name, int lbl);
  void index();  // rebuild by_lhs and production ids
  std::string item_str(int prod, int dot) const;
  std::string prod_str(int prod) const;
};

/// Derivation tree over a Cfg. Leaves are terminals (prod == -1).
struct Tree {
  int prod = -1;
  int sym = 0;
  int begin = 0, end = 0;  // token index span
  std::vector<Tree> kids;
  bool operator==(const Tree& o) const {
    return prod == o.prod && sym == o.sym && begin == o.begin && end == o.end && kids == o.kids;
  }
};
std::string tree_str(const Cfg& g, const Tree& t);

/// Canonical text dump: one production per line, sorted by id.
std::string dump(const Cfg& g);

/// Value-vector helpers for label domains (mixed radix, first key most significant).
std::vector<int> decode_value(const Label& l, int v);
int encode_value(const Label& l, const std::vector<int>& vals);

}  // namespace xlr

#endif
