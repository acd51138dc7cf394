// BNF to flat CFG lowering, precedence lowering, attribute instantiation.
#ifndef XLR_FLATTEN_HPP
#define XLR_FLATTEN_HPP

#include <set>
#include <string>
#include <vector>

#include "xlr/cfg.hpp"
#include "xlr/grammar.hpp"

namespace xlr {

struct PrecAddition {
  int rule = 0;  // index into BnfGrammar::rules
  AttrConstraint constraint;
};

/// Constraints implied by the precedence stanza, in stanza order.
std::vector<PrecAddition> lower_precedence(const BnfGrammar& g);

/// Returns g with prL/prR domains and the precedence constraints added.
BnfGrammar apply_precedence(const BnfGrammar& g);

/// Where a flat rhs position came from in the BNF expression.
struct PositionInfo {
  bool begin = false;
  bool end = false;
  std::set<std::string> tags;
  bool fresh = false;       // position holds a fresh nonterminal
  bool structural = false;  // recursive self-reference introduced by a repeat
  int node_id = -1;         // Symbol node of the BNF rhs, -1 otherwise
};

struct FlatProductionInfo {
  int prod = 0;            // production id in the Cfg
  bool top_level = false;  // lhs is the rule's own lhs
  std::vector<PositionInfo> positions;
};

/// Resolves the rule's constraints onto its flat productions. Throws on an unknown tag.
std::vector<std::vector<FlatConstraint>> lower_constraints(
    const BnfGrammar& g, const BnfRule& rule, const Cfg& cfg,
    const std::vector<FlatProductionInfo>& prods);

/// Flattens a validated grammar (precedence must already be applied).
Cfg flatten(const BnfGrammar& g);

/// Expands attribute bounds into instance symbols. Identity on attribute-free grammars.
Cfg instantiate_attributes(const Cfg& flat);

/// Set of values a label can take on any derivable node, per label (mixed-radix indices).
std::vector<std::vector<int>> inhabited_values(const Cfg& flat);

/// Value of a node for production p given child values (-1 for terminal children).
int node_value(const Cfg& flat, const Production& p, const std::vector<int>& child_values);

}  // namespace xlr

#endif
