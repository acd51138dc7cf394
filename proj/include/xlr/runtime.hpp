// Table-driven parsing: tokenizer, LR, RD and XLR drivers, CPS dual-stack reduction.
#ifndef XLR_RUNTIME_HPP
#define XLR_RUNTIME_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "xlr/automata.hpp"
#include "xlr/grammar.hpp"

namespace xlr {

struct Token {
  int sym = 0;
  std::string lexeme;
  size_t begin = 0, end = 0;  // byte offsets
};

struct TableLabel {
  std::string name;
  bool terminal = false;
  std::vector<std::string> keys;
  std::vector<int> ranges;
};

/// A production of the flat grammar as the runtime sees it: tree node name, lhs label,
/// length, and what it needs to compute attribute values.
struct TreeProd {
  std::string name;
  int lhs = 0;
  int len = 0;
  bool splice = false;   // fresh lhs: children are inlined in dumps
  bool wrapper = false;  // start wrapper: skipped in dumps
  std::vector<int> caps;
  std::vector<std::array<int, 3>> rels;  // (0-based child, lhs key, child key)
};

struct ParseTable {
  enum Mode { LR, RD, XLR };
  Mode mode = LR;
  int k = 1;
  int xlr_t = 0;  // certified fork degree, 0 when not certified
  int start_label = 0;
  int num_terminals = 1;
  std::vector<TokenDef> tokens;  // terminal t is tokens[t - 1]
  std::vector<TableLabel> labels;
  std::vector<TreeProd> prods;
  std::vector<DfaState> states;  // nfa member lists are left empty

  bool operator==(const ParseTable& o) const;
};

const char* mode_name(ParseTable::Mode m);

/// Canonical text form, header "XLRTAB 1".
std::string serialize(const ParseTable& t);
/// Throws Error("table", ...) on a malformed file.
ParseTable deserialize(const std::string& text);

/// Error raised while lexing or parsing an input.
class ParseFailure : public Error {
 public:
  enum Kind { Lex, Syntax, Ambiguity, BranchLimit, Internal };
  ParseFailure(Kind kind, const std::string& msg, size_t offset);
  Kind kind() const { return kind_; }
  size_t offset() const { return offset_; }

 private:
  Kind kind_;
  size_t offset_;
};

/// Maximal munch with declaration-order priority on ties; ASCII whitespace is skipped.
std::vector<Token> tokenize(const ParseTable& t, const std::string& text);

/// Syntax tree in an arena. Nodes of productions carry the flat production id in prod;
/// leaves carry prod = -1 and the terminal in sym. Spans are token indices.
struct ParseTree {
  struct Node {
    int prod = -1;
    int sym = 0;
    int begin = 0, end = 0;
    int kid0 = 0, nkids = 0;
  };
  std::vector<Node> nodes;
  std::vector<int> kids;
  int root = -1;

  int add_leaf(int sym, int pos);
  int add_node(int prod, int sym, int begin, int end, const std::vector<int>& children);
  Tree to_tree() const;
  Tree to_tree(int n) const;
};

struct StackElem {
  int node = -1;
  int label = 0;  // label of the node's symbol in the flat grammar
  int value = 0;
  int begin = 0, end = 0;
};

struct DualStack {
  std::vector<StackElem> primary;
  std::vector<StackElem> secondary;
};

/// Attribute value of a node of tree production p with the given children.
int node_value(const ParseTable& t, int p, const std::vector<StackElem>& kids);

/// Builds the node for a reduction from its r children (already gathered) and returns the
/// element to push. pos is the current token index (used for empty reductions).
StackElem make_node(const ParseTable& t, ParseTree& tree, const Action& a,
                    const std::vector<StackElem>& kids, int pos);

/// Reduction of a CPS production with original arity r and rhs length m: pops m from the
/// primary stack; when r <= m the first r form the node and the rest move to the secondary
/// stack (first leftover on top); when r > m the remaining r - m children come off the
/// secondary stack. Pushes the node onto the primary stack.
StackElem cps_reduce_step(const ParseTable& t, ParseTree& tree, DualStack& st, const Action& a,
                          int pos);

struct ParseStats {
  size_t steps = 0;
  int peak_instances = 1;
  std::vector<std::string> events;  // RD Recur/Return events when logging is on
  bool log = false;
};

ParseTree lr_parse(const ParseTable& t, const std::vector<Token>& tokens,
                   ParseStats* stats = nullptr);
ParseTree rd_parse(const ParseTable& t, const std::vector<Token>& tokens,
                   ParseStats* stats = nullptr);
ParseTree xlr_parse(const ParseTable& t, const std::vector<Token>& tokens, int t_max,
                    ParseStats* stats = nullptr);
/// Dispatches on the table mode.
ParseTree parse(const ParseTable& t, const std::vector<Token>& tokens, int t_max = 64,
                ParseStats* stats = nullptr);

/// "(Name child ...)" with fresh nodes spliced, the wrapper skipped, literal tokens
/// omitted, and a node with one pattern-token child printed as that lexeme.
std::string dump_sexpr(const ParseTable& t, const ParseTree& tree,
                       const std::vector<Token>& tokens);
std::string dump_json(const ParseTable& t, const ParseTree& tree,
                      const std::vector<Token>& tokens);

}  // namespace xlr

#endif
