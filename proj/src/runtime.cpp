#include "xlr/runtime.hpp"

#include <algorithm>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "xlr/regex.hpp"

namespace xlr {

const char* mode_name(ParseTable::Mode m) {
  switch (m) {
    case ParseTable::LR: return "lr";
    case ParseTable::RD: return "rd";
    case ParseTable::XLR: return "xlr";
  }
  return "lr";
}

ParseFailure::ParseFailure(Kind kind, const std::string& msg, size_t offset)
    : Error("parse", msg), kind_(kind), offset_(offset) {}

// ---------------------------------------------------------------------------
// Tokenizer

std::vector<Token> tokenize(const ParseTable& t, const std::string& text) {
  std::vector<std::unique_ptr<Regex>> rx(t.tokens.size());
  for (size_t j = 0; j < t.tokens.size(); ++j)
    if (t.tokens[j].is_pattern) rx[j] = std::make_unique<Regex>(t.tokens[j].text);
  std::vector<Token> out;
  std::string_view all(text);
  size_t i = 0;
  while (i < text.size()) {
    unsigned char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      ++i;
      continue;
    }
    std::string_view rest = all.substr(i);
    int best = 0, which = -1;
    for (size_t j = 0; j < t.tokens.size(); ++j) {
      int len;
      if (rx[j]) {
        len = rx[j]->longest_match(rest);
      } else {
        const std::string& lit = t.tokens[j].text;
        len = rest.substr(0, lit.size()) == lit ? static_cast<int>(lit.size()) : -1;
      }
      if (len > best) {
        best = len;
        which = static_cast<int>(j);
      }
    }
    if (which < 0)
      throw ParseFailure(ParseFailure::Lex, "UnlexableInput at offset " + std::to_string(i), i);
    out.push_back({which + 1, std::string(rest.substr(0, best)), i, i + best});
    i += best;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trees

int ParseTree::add_leaf(int sym, int pos) {
  nodes.push_back({-1, sym, pos, pos + 1, static_cast<int>(kids.size()), 0});
  return static_cast<int>(nodes.size()) - 1;
}

int ParseTree::add_node(int prod, int sym, int begin, int end, const std::vector<int>& children) {
  nodes.push_back({prod, sym, begin, end, static_cast<int>(kids.size()),
                   static_cast<int>(children.size())});
  kids.insert(kids.end(), children.begin(), children.end());
  return static_cast<int>(nodes.size()) - 1;
}

Tree ParseTree::to_tree(int n) const {
  const Node& x = nodes[n];
  Tree t;
  t.prod = x.prod;
  t.sym = x.sym;
  t.begin = x.begin;
  t.end = x.end;
  for (int j = 0; j < x.nkids; ++j) t.kids.push_back(to_tree(kids[x.kid0 + j]));
  return t;
}

Tree ParseTree::to_tree() const { return to_tree(root); }

// ---------------------------------------------------------------------------
// Reduction

int node_value(const ParseTable& t, int p, const std::vector<StackElem>& kids) {
  const TreeProd& tp = t.prods[p];
  const TableLabel& l = t.labels[tp.lhs];
  if (l.ranges.empty()) return 0;
  std::vector<int> v = tp.caps;
  for (auto& [i, a, b] : tp.rels) {
    const StackElem& c = kids[i];
    const TableLabel& cl = t.labels[c.label];
    int div = 1;
    for (size_t j = b + 1; j < cl.ranges.size(); ++j) div *= cl.ranges[j];
    int digit = (c.value / div) % cl.ranges[b];
    v[a] = std::min(v[a], digit);
  }
  int out = 0;
  for (size_t j = 0; j < v.size(); ++j) out = out * l.ranges[j] + v[j];
  return out;
}

StackElem make_node(const ParseTable& t, ParseTree& tree, const Action& a,
                    const std::vector<StackElem>& kids, int pos) {
  const TreeProd& tp = t.prods[a.tree];
  int begin = kids.empty() ? pos : kids.front().begin;
  int end = kids.empty() ? pos : kids.back().end;
  std::vector<int> ids;
  ids.reserve(kids.size());
  for (auto& k : kids) ids.push_back(k.node);
  int n = tree.add_node(a.tree, tp.lhs, begin, end, ids);
  return {n, tp.lhs, node_value(t, a.tree, kids), begin, end};
}

namespace {

// Shared dual-stack logic over popped elements; `pull` takes one from the secondary top.
template <class Pull, class PushSecondary>
StackElem reduce_popped(const ParseTable& t, ParseTree& tree, const Action& a,
                        std::vector<StackElem>& popped, int pos, Pull pull,
                        PushSecondary push_secondary) {
  int r = a.arity, m = a.m;
  if (r <= m) {
    if (r == 0 && m > 0) pos = popped[0].begin;
    for (int j = m - 1; j >= r; --j) push_secondary(popped[j]);
    popped.resize(r);
  } else {
    for (int j = 0; j < r - m; ++j) popped.push_back(pull());
  }
  return make_node(t, tree, a, popped, pos);
}

}  // namespace

StackElem cps_reduce_step(const ParseTable& t, ParseTree& tree, DualStack& st, const Action& a,
                          int pos) {
  if (static_cast<int>(st.primary.size()) < a.m)
    throw ParseFailure(ParseFailure::Internal, "primary stack underflow", 0);
  std::vector<StackElem> popped(st.primary.end() - a.m, st.primary.end());
  st.primary.resize(st.primary.size() - a.m);
  StackElem e = reduce_popped(
      t, tree, a, popped, pos,
      [&] {
        if (st.secondary.empty())
          throw ParseFailure(ParseFailure::Internal, "secondary stack underflow", 0);
        StackElem x = st.secondary.back();
        st.secondary.pop_back();
        return x;
      },
      [&](const StackElem& x) { st.secondary.push_back(x); });
  st.primary.push_back(e);
  return e;
}

// ---------------------------------------------------------------------------
// Drivers

namespace {

KStr lookahead(const ParseTable& t, const std::vector<Token>& toks, size_t i) {
  KStr s = kstr::empty();
  for (int j = 0; j < t.k; ++j) s = kstr::push(s, i + j < toks.size() ? toks[i + j].sym : 0, t.k);
  return s;
}

size_t offset_of(const std::vector<Token>& toks, size_t i) {
  if (i < toks.size()) return toks[i].begin;
  return toks.empty() ? 0 : toks.back().end;
}

std::string la_str(const ParseTable& t, KStr s) {
  if (kstr::len(s) == 0) return "ε";
  std::string out;
  for (int i = 0; i < kstr::len(s); ++i) out += (i ? " " : "") + t.labels[kstr::at(s, i)].name;
  return out;
}

[[noreturn]] void syntax_error(const ParseTable& t, const std::vector<Token>& toks, size_t i,
                               int state) {
  size_t off = offset_of(toks, i);
  std::string msg = "ParseError at offset " + std::to_string(off) + " (state " +
                    std::to_string(state) + "): unexpected " +
                    (i < toks.size() ? "'" + toks[i].lexeme + "'" : std::string("end of input"));
  std::string exp;
  int shown = 0;
  for (auto& [la, as] : t.states[state].actions) {
    if (shown++ == 8) {
      exp += ", ...";
      break;
    }
    exp += (exp.empty() ? "" : ", ") + la_str(t, la);
  }
  if (!exp.empty()) msg += "; expected " + exp;
  throw ParseFailure(ParseFailure::Syntax, msg, off);
}

ParseTree run_deterministic(const ParseTable& t, const std::vector<Token>& toks,
                            ParseStats* stats, bool rd) {
  ParseTree tree;
  std::vector<int> states{0};
  DualStack st;
  size_t i = 0, n = toks.size();
  size_t steps = 0;
  for (;;) {
    ++steps;
    int v = states.back();
    auto it = t.states[v].actions.find(lookahead(t, toks, i));
    if (it == t.states[v].actions.end()) syntax_error(t, toks, i, v);
    if (it->second.size() != 1)
      throw ParseFailure(ParseFailure::Internal, "table has a conflict in state " + std::to_string(v),
                         offset_of(toks, i));
    const Action& a = it->second[0];
    EdgeKey buf = 0;
    switch (a.kind) {
      case Action::Shift: {
        if (i == n) syntax_error(t, toks, i, v);
        int leaf = tree.add_leaf(toks[i].sym, static_cast<int>(i));
        st.primary.push_back({leaf, toks[i].sym, 0, static_cast<int>(i), static_cast<int>(i) + 1});
        buf = edge::sym(toks[i].sym, 0);
        ++i;
        break;
      }
      case Action::Reduce: {
        StackElem e = cps_reduce_step(t, tree, st, a, static_cast<int>(i));
        states.resize(states.size() - a.m);
        if (a.label == t.start_label) {
          if (i != n) syntax_error(t, toks, i, v);
          tree.root = e.node;
          if (stats) stats->steps += steps;
          return tree;
        }
        buf = edge::sym(a.label, e.value);
        break;
      }
      case Action::Recur:
        if (!rd) throw ParseFailure(ParseFailure::Internal, "Recur action in an LR table", 0);
        if (stats && stats->log) stats->events.push_back("recur " + std::to_string(a.label) + " at " + std::to_string(i));
        buf = edge::recur(a.label);
        break;
      case Action::Return:
        if (!rd) throw ParseFailure(ParseFailure::Internal, "Return action in an LR table", 0);
        if (stats && stats->log) stats->events.push_back("return " + t.labels[a.label].name + " at " + std::to_string(i));
        states.resize(states.size() - 2);
        buf = edge::sym(a.label, st.primary.back().value);
        break;
    }
    int next = t.states[states.back()].next(buf);
    if (next < 0) syntax_error(t, toks, i, states.back());
    states.push_back(next);
  }
}

}  // namespace

ParseTree lr_parse(const ParseTable& t, const std::vector<Token>& tokens, ParseStats* stats) {
  return run_deterministic(t, tokens, stats, false);
}

ParseTree rd_parse(const ParseTable& t, const std::vector<Token>& tokens, ParseStats* stats) {
  return run_deterministic(t, tokens, stats, true);
}

namespace {

// Persistent stacks as cons cells in arenas shared by all instances.
struct Arena {
  std::vector<std::pair<int, int>> scells;        // (state, next)
  std::vector<std::pair<StackElem, int>> ecells;  // (element, next)

  int push_state(int s, int next) {
    scells.push_back({s, next});
    return static_cast<int>(scells.size()) - 1;
  }
  int push_elem(const StackElem& e, int next) {
    ecells.push_back({e, next});
    return static_cast<int>(ecells.size()) - 1;
  }
};

struct Instance {
  int st = -1;   // state stack top cell
  int pri = -1;  // primary stack top cell
  int sec = -1;  // secondary stack top cell
  int pending = -1;  // index of the action to apply next, -1 to look it up
};

}  // namespace

ParseTree xlr_parse(const ParseTable& t, const std::vector<Token>& toks, int t_max,
                    ParseStats* stats) {
  if (t_max < 1) throw Error("parse", "t_max must be at least 1");
  ParseTree tree;
  Arena ar;
  Instance init;
  init.st = ar.push_state(0, -1);
  std::vector<Instance> cur{init};
  size_t n = toks.size();
  size_t steps = 0;
  int peak = 1;
  const size_t step_limit = 64 * (n + 1) * static_cast<size_t>(t_max) + 100000;
  for (size_t i = 0;; ++i) {
    KStr la = lookahead(t, toks, i);
    std::vector<Instance> work(cur.rbegin(), cur.rend()), shifted;
    std::vector<int> done;
    int last_state = ar.scells[cur.front().st].first;
    while (!work.empty()) {
      Instance in = work.back();
      work.pop_back();
      for (;;) {
        if (++steps > step_limit)
          throw ParseFailure(ParseFailure::BranchLimit, "step limit exceeded", offset_of(toks, i));
        int v = ar.scells[in.st].first;
        last_state = v;
        auto it = t.states[v].actions.find(la);
        if (it == t.states[v].actions.end()) break;
        const auto& acts = it->second;
        size_t pick = 0;
        if (in.pending >= 0) {
          pick = static_cast<size_t>(in.pending);
          in.pending = -1;
        } else {
          for (size_t j = acts.size(); j-- > 1;) {
            Instance f = in;
            f.pending = static_cast<int>(j);
            work.push_back(f);
          }
        }
        int live = static_cast<int>(work.size() + shifted.size()) + 1;
        peak = std::max(peak, live);
        if (live > t_max)
          throw ParseFailure(ParseFailure::BranchLimit,
                             "BranchLimitExceeded: " + std::to_string(live) + " live instances at offset " +
                                 std::to_string(offset_of(toks, i)),
                             offset_of(toks, i));
        const Action& a = acts[pick];
        EdgeKey buf = 0;
        bool stop = false;
        switch (a.kind) {
          case Action::Shift: {
            if (i == n) {
              stop = true;
              break;
            }
            int leaf = tree.add_leaf(toks[i].sym, static_cast<int>(i));
            in.pri = ar.push_elem({leaf, toks[i].sym, 0, static_cast<int>(i), static_cast<int>(i) + 1}, in.pri);
            buf = edge::sym(toks[i].sym, 0);
            int nx = t.states[v].next(buf);
            if (nx >= 0) {
              in.st = ar.push_state(nx, in.st);
              shifted.push_back(in);
            }
            stop = true;
            break;
          }
          case Action::Reduce: {
            std::vector<StackElem> popped(a.m);
            for (int j = a.m - 1; j >= 0; --j) {
              popped[j] = ar.ecells[in.pri].first;
              in.pri = ar.ecells[in.pri].second;
            }
            StackElem e = reduce_popped(
                t, tree, a, popped, static_cast<int>(i),
                [&] {
                  StackElem x = ar.ecells[in.sec].first;
                  in.sec = ar.ecells[in.sec].second;
                  return x;
                },
                [&](const StackElem& x) { in.sec = ar.push_elem(x, in.sec); });
            in.pri = ar.push_elem(e, in.pri);
            for (int j = 0; j < a.m; ++j) in.st = ar.scells[in.st].second;
            if (a.label == t.start_label) {
              if (i == n) done.push_back(e.node);
              stop = true;
              break;
            }
            buf = edge::sym(a.label, e.value);
            break;
          }
          case Action::Recur:
            buf = edge::recur(a.label);
            break;
          case Action::Return:
            in.st = ar.scells[ar.scells[in.st].second].second;
            buf = edge::sym(a.label, ar.ecells[in.pri].first.value);
            break;
        }
        if (stop) break;
        int nx = t.states[ar.scells[in.st].first].next(buf);
        if (nx < 0) break;
        in.st = ar.push_state(nx, in.st);
      }
    }
    if (i == n || shifted.empty()) {
      if (stats) {
        stats->steps += steps;
        stats->peak_instances = peak;
      }
      if (done.size() == 1) {
        tree.root = done[0];
        return tree;
      }
      if (done.size() >= 2)
        throw ParseFailure(ParseFailure::Ambiguity,
                           "Ambiguity: " + std::to_string(done.size()) + " parses", offset_of(toks, i));
      syntax_error(t, toks, i, last_state);
    }
    cur = std::move(shifted);
  }
}

ParseTree parse(const ParseTable& t, const std::vector<Token>& tokens, int t_max,
                ParseStats* stats) {
  switch (t.mode) {
    case ParseTable::LR: return lr_parse(t, tokens, stats);
    case ParseTable::RD: return rd_parse(t, tokens, stats);
    case ParseTable::XLR: return xlr_parse(t, tokens, t_max, stats);
  }
  return lr_parse(t, tokens, stats);
}

// ---------------------------------------------------------------------------
// Dumps

namespace {

bool pattern_leaf(const ParseTable& t, const ParseTree& tree, int n) {
  const auto& x = tree.nodes[n];
  return x.prod < 0 && x.sym >= 1 && t.tokens[x.sym - 1].is_pattern;
}

// The single printable child when a node is just a wrapper around one pattern token.
int lone_pattern_child(const ParseTable& t, const ParseTree& tree, int n) {
  const auto& x = tree.nodes[n];
  int found = -1;
  for (int j = 0; j < x.nkids; ++j) {
    int c = tree.kids[x.kid0 + j];
    if (pattern_leaf(t, tree, c)) {
      if (found >= 0) return -1;
      found = c;
    } else if (tree.nodes[c].prod >= 0) {
      return -1;
    }
  }
  return found;
}

}  // namespace

std::string dump_sexpr(const ParseTable& t, const ParseTree& tree,
                       const std::vector<Token>& tokens) {
  std::string out;
  bool space = false;
  auto item = [&](const std::string& s) {
    if (space) out += ' ';
    out += s;
    space = true;
  };
  std::vector<int> stack{tree.root};  // node id, or -1 for a closing paren
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    if (n < 0) {
      out += ')';
      space = true;
      continue;
    }
    const auto& x = tree.nodes[n];
    if (x.prod < 0) {
      if (pattern_leaf(t, tree, n)) item(tokens[x.begin].lexeme);
      continue;
    }
    const TreeProd& tp = t.prods[x.prod];
    if (!tp.splice && !tp.wrapper) {
      int lone = lone_pattern_child(t, tree, n);
      if (lone >= 0) {
        item(tokens[tree.nodes[lone].begin].lexeme);
        continue;
      }
      item("(" + tp.name);
      stack.push_back(-1);
    }
    for (int j = x.nkids; j-- > 0;) stack.push_back(tree.kids[x.kid0 + j]);
  }
  return out;
}

std::string dump_json(const ParseTable& t, const ParseTree& tree,
                      const std::vector<Token>& tokens) {
  std::string out;
  std::vector<char> first{1};  // per open array: no element written yet
  auto sep = [&] {
    if (!first.back()) out += ',';
    first.back() = 0;
  };
  std::vector<int> stack{tree.root};
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    if (n < 0) {
      out += "]}";
      first.pop_back();
      continue;
    }
    const auto& x = tree.nodes[n];
    if (x.prod < 0) {
      sep();
      out += "{\"token\":" + nlohmann::json(t.labels[x.sym].name).dump() +
             ",\"text\":" + nlohmann::json(tokens[x.begin].lexeme).dump() + "}";
      continue;
    }
    const TreeProd& tp = t.prods[x.prod];
    if (!tp.splice && !tp.wrapper) {
      sep();
      out += "{\"node\":" + nlohmann::json(tp.name).dump() + ",\"children\":[";
      first.push_back(1);
      stack.push_back(-1);
    }
    for (int j = x.nkids; j-- > 0;) stack.push_back(tree.kids[x.kid0 + j]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

bool ParseTable::operator==(const ParseTable& o) const {
  if (mode != o.mode || k != o.k || xlr_t != o.xlr_t || start_label != o.start_label ||
      num_terminals != o.num_terminals || !(tokens == o.tokens) || states.size() != o.states.size() ||
      labels.size() != o.labels.size() || prods.size() != o.prods.size())
    return false;
  for (size_t j = 0; j < labels.size(); ++j) {
    auto& a = labels[j];
    auto& b = o.labels[j];
    if (a.name != b.name || a.terminal != b.terminal || a.keys != b.keys || a.ranges != b.ranges)
      return false;
  }
  for (size_t j = 0; j < prods.size(); ++j) {
    auto& a = prods[j];
    auto& b = o.prods[j];
    if (a.name != b.name || a.lhs != b.lhs || a.len != b.len || a.splice != b.splice ||
        a.wrapper != b.wrapper || a.caps != b.caps || a.rels != b.rels)
      return false;
  }
  for (size_t j = 0; j < states.size(); ++j)
    if (states[j].edges != o.states[j].edges || states[j].actions != o.states[j].actions)
      return false;
  return true;
}

std::string serialize(const ParseTable& t) {
  std::ostringstream os;
  os << "XLRTAB 1\n";
  os << "mode " << mode_name(t.mode) << "\n";
  os << "k " << t.k << "\n";
  os << "xlr_t " << t.xlr_t << "\n";
  os << "start_label " << t.start_label << "\n";
  os << "terminals " << t.num_terminals << "\n";
  for (size_t j = 0; j < t.tokens.size(); ++j)
    os << "token " << j + 1 << " " << t.tokens[j].name << " " << (t.tokens[j].is_pattern ? "pat" : "lit")
       << " " << nlohmann::json(t.tokens[j].text).dump() << "\n";
  os << "labels " << t.labels.size() << "\n";
  for (size_t j = 0; j < t.labels.size(); ++j) {
    auto& l = t.labels[j];
    os << "label " << j << " " << l.name << " " << l.terminal << " " << l.keys.size();
    for (size_t q = 0; q < l.keys.size(); ++q) os << " " << l.keys[q] << " " << l.ranges[q];
    os << "\n";
  }
  os << "prods " << t.prods.size() << "\n";
  for (size_t j = 0; j < t.prods.size(); ++j) {
    auto& p = t.prods[j];
    os << "prod " << j << " " << p.name << " " << p.lhs << " " << p.len << " " << p.splice << " "
       << p.wrapper << " " << p.caps.size();
    for (int c : p.caps) os << " " << c;
    os << " " << p.rels.size();
    for (auto& r : p.rels) os << " " << r[0] << " " << r[1] << " " << r[2];
    os << "\n";
  }
  os << "states " << t.states.size() << "\n";
  for (size_t s = 0; s < t.states.size(); ++s) {
    auto& st = t.states[s];
    os << "state " << s << " " << st.edges.size() << " " << st.actions.size() << "\n";
    for (auto& [k, to] : st.edges) os << "e " << k << " " << to << "\n";
    for (auto& [la, as] : st.actions) {
      os << "a " << la << " " << as.size();
      for (auto& a : as)
        os << " " << static_cast<int>(a.kind) << " " << a.tree << " " << a.arity << " " << a.m << " "
           << a.label;
      os << "\n";
    }
  }
  os << "end\n";
  return os.str();
}

namespace {

struct Reader {
  std::istringstream in;
  explicit Reader(const std::string& s) : in(s) {}

  [[noreturn]] void fail(const std::string& what) {
    throw Error("table", "malformed table: " + what);
  }
  std::string word() {
    std::string w;
    if (!(in >> w)) fail("unexpected end of file");
    return w;
  }
  void expect(const std::string& w) {
    std::string got = word();
    if (got != w) fail("expected '" + w + "', found '" + got + "'");
  }
  template <class T>
  T num() {
    T v;
    if (!(in >> v)) fail("expected a number");
    return v;
  }
  int count(size_t limit = 1u << 26) {
    long long v = num<long long>();
    if (v < 0 || static_cast<size_t>(v) > limit) fail("bad count");
    return static_cast<int>(v);
  }
};

}  // namespace

ParseTable deserialize(const std::string& text) {
  Reader r(text);
  ParseTable t;
  r.expect("XLRTAB");
  if (r.word() != "1") r.fail("unsupported version");
  r.expect("mode");
  std::string m = r.word();
  if (m == "lr") t.mode = ParseTable::LR;
  else if (m == "rd") t.mode = ParseTable::RD;
  else if (m == "xlr") t.mode = ParseTable::XLR;
  else r.fail("unknown mode " + m);
  r.expect("k");
  t.k = r.count(kMaxK);
  r.expect("xlr_t");
  t.xlr_t = r.count();
  r.expect("start_label");
  t.start_label = r.count();
  r.expect("terminals");
  t.num_terminals = r.count();
  if (t.num_terminals < 1) r.fail("no terminals");
  for (int j = 1; j < t.num_terminals; ++j) {
    r.expect("token");
    if (r.count() != j) r.fail("token ids out of order");
    TokenDef d;
    d.name = r.word();
    std::string kind = r.word();
    if (kind != "lit" && kind != "pat") r.fail("bad token kind");
    d.is_pattern = kind == "pat";
    std::string rest;
    std::getline(r.in, rest);
    try {
      d.text = nlohmann::json::parse(rest).get<std::string>();
    } catch (const std::exception&) {
      r.fail("bad token text");
    }
    t.tokens.push_back(std::move(d));
  }
  r.expect("labels");
  t.labels.resize(r.count());
  for (size_t j = 0; j < t.labels.size(); ++j) {
    r.expect("label");
    if (static_cast<size_t>(r.count()) != j) r.fail("label ids out of order");
    auto& l = t.labels[j];
    l.name = r.word();
    l.terminal = r.count(1) != 0;
    int nk = r.count(64);
    for (int q = 0; q < nk; ++q) {
      l.keys.push_back(r.word());
      int range = r.count(1 << 16);
      if (range < 1) r.fail("bad attribute range");
      l.ranges.push_back(range);
    }
  }
  r.expect("prods");
  t.prods.resize(r.count());
  for (size_t j = 0; j < t.prods.size(); ++j) {
    r.expect("prod");
    if (static_cast<size_t>(r.count()) != j) r.fail("production ids out of order");
    auto& p = t.prods[j];
    p.name = r.word();
    p.lhs = r.count(t.labels.size() - 1);
    p.len = r.count();
    p.splice = r.count(1) != 0;
    p.wrapper = r.count(1) != 0;
    int nc = r.count(64);
    for (int q = 0; q < nc; ++q) p.caps.push_back(r.count());
    int nr = r.count();
    for (int q = 0; q < nr; ++q) {
      std::array<int, 3> rel{r.count(), r.count(), r.count()};
      p.rels.push_back(rel);
    }
  }
  r.expect("states");
  t.states.resize(r.count());
  for (size_t s = 0; s < t.states.size(); ++s) {
    r.expect("state");
    if (static_cast<size_t>(r.count()) != s) r.fail("state ids out of order");
    int ne = r.count(), na = r.count();
    auto& st = t.states[s];
    for (int e = 0; e < ne; ++e) {
      r.expect("e");
      EdgeKey k = r.num<EdgeKey>();
      int to = r.count(t.states.size() - 1);
      st.edges.push_back({k, to});
    }
    if (!std::is_sorted(st.edges.begin(), st.edges.end())) r.fail("unsorted edges");
    for (int a = 0; a < na; ++a) {
      r.expect("a");
      KStr la = r.num<KStr>();
      int nacts = r.count(64);
      auto& list = st.actions[la];
      for (int q = 0; q < nacts; ++q) {
        Action act;
        int kind = r.count(3);
        act.kind = static_cast<Action::Kind>(kind);
        act.tree = r.num<int>();
        act.arity = r.count();
        act.m = r.count();
        act.label = r.num<int>();
        if (act.kind == Action::Reduce &&
            (act.tree < 0 || act.tree >= static_cast<int>(t.prods.size())))
          r.fail("reduce of an unknown production");
        list.push_back(act);
      }
    }
  }
  r.expect("end");
  return t;
}

}  // namespace xlr
