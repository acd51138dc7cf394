// BNF grammar model and the grammar source format.
#ifndef XLR_GRAMMAR_HPP
#define XLR_GRAMMAR_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "xlr/error.hpp"

namespace xlr {

/// \brief A right-hand-side expression of a BNF rule.
struct BnfExpr {
  enum Kind { Symbol, Concat, Alt, Optional, Star, Plus, List, Tagged };

  Kind kind = Symbol;
  std::vector<BnfExpr> children;
  std::string symbol;  // Symbol only
  std::string tag;     // Tagged only
  int node_id = -1;    // preorder index of Symbol nodes within the rule

  static BnfExpr sym(std::string name);
  static BnfExpr make(Kind k, std::vector<BnfExpr> kids);
  static BnfExpr tagged(BnfExpr e, std::string tag);

  bool operator==(const BnfExpr& o) const;
};

/// \brief Selector of the R[...] side of an attribute constraint.
struct Selector {
  enum Kind { Rhs, RhsBegin, RhsEnd, RhsMid, RhsTag };
  Kind kind = Rhs;
  std::string tag;
  bool operator==(const Selector& o) const { return kind == o.kind && tag == o.tag; }
};

struct AttrConstraint {
  enum Form { LhsLeq, RhsGeq, LhsLeqRhs };
  Form form = LhsLeq;
  std::string key;    // alpha
  std::string key2;   // beta (LhsLeqRhs only)
  int bound = 0;      // b
  Selector sel;
  bool operator==(const AttrConstraint& o) const {
    return form == o.form && key == o.key && key2 == o.key2 && bound == o.bound &&
           sel == o.sel;
  }
};

struct BnfRule {
  std::string lhs;
  std::string variant;  // empty when absent
  BnfExpr rhs;
  std::vector<AttrConstraint> constraints;
  std::set<int> unfoldable;  // node_id of Symbol nodes marked unfoldable
  int line = 0;

  std::string ref() const { return variant.empty() ? lhs : lhs + "." + variant; }
  bool operator==(const BnfRule& o) const {
    return lhs == o.lhs && variant == o.variant && rhs == o.rhs &&
           constraints == o.constraints && unfoldable == o.unfoldable;
  }
};

enum class Assoc { None, Left, Right, Prefix, Postfix };
const char* assoc_name(Assoc a);

struct PrecItem {
  std::vector<std::string> rules;  // rule references (Lhs or Lhs.Variant)
  Assoc assoc = Assoc::None;
  bool operator==(const PrecItem& o) const { return rules == o.rules && assoc == o.assoc; }
};

struct TokenDef {
  std::string name;
  bool is_pattern = false;
  std::string text;  // literal contents or pattern body
  bool operator==(const TokenDef& o) const {
    return name == o.name && is_pattern == o.is_pattern && text == o.text;
  }
};

/// \brief Attribute value type: boolean is range 2.
struct AttrType {
  bool is_bool = false;
  int range = 2;
  bool operator==(const AttrType& o) const { return is_bool == o.is_bool && range == o.range; }
};

struct AttrDecl {
  std::string key;
  AttrType type;
  bool operator==(const AttrDecl& o) const { return key == o.key && type == o.type; }
};

struct BnfGrammar {
  std::vector<TokenDef> tokens;
  std::string start;
  std::vector<BnfRule> rules;
  std::vector<PrecItem> prec;
  // nonterminal -> declared attribute domain, in declaration order
  std::vector<std::pair<std::string, std::vector<AttrDecl>>> attrs;

  const TokenDef* token(const std::string& name) const;
  bool is_nonterminal(const std::string& name) const;
  std::vector<std::string> nonterminals() const;  // first-appearance order of rule lhs
  const std::vector<AttrDecl>* domain(const std::string& nt) const;
  std::vector<AttrDecl>& domain_mut(const std::string& nt);
  int find_rule(const std::string& ref) const;  // -1 if none or ambiguous

  bool operator==(const BnfGrammar& o) const {
    return tokens == o.tokens && start == o.start && rules == o.rules && prec == o.prec &&
           attrs == o.attrs;
  }
};

/// Parses grammar source text. Throws xlr::Error with line/column on failure.
BnfGrammar parse_grammar_source(const std::string& text);

/// Checks invariants; may insert the S' -> S wrapper (reported as a note).
std::vector<Diagnostic> validate_grammar(BnfGrammar& g);

/// Canonical pretty-printer; parse_grammar_source(render(g)) == g.
std::string render(const BnfGrammar& g);
std::string render_expr(const BnfExpr& e);

/// Marks symbol occurrences unfoldable. names empty + all=true marks every occurrence.
void mark_unfoldable(BnfGrammar& g, bool all, const std::set<std::string>& names);

/// Assigns preorder node ids to Symbol nodes of every rule.
void number_symbol_nodes(BnfGrammar& g);

}  // namespace xlr

#endif
