#include "xlr/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

namespace xlr {

std::string Diagnostic::str() const {
  std::ostringstream os;
  if (line > 0) os << line << ":" << col << ": ";
  os << (severity == Err ? "error: " : severity == Warning ? "warning: " : "note: ") << message;
  return os.str();
}

Error::Error(std::string stage, const std::string& msg, int line, int col)
    : std::runtime_error(line > 0 ? std::to_string(line) + ":" + std::to_string(col) + ": " + msg
                                  : msg),
      stage_(std::move(stage)),
      line_(line),
      col_(col) {}

BnfExpr BnfExpr::sym(std::string name) {
  BnfExpr e;
  e.kind = Symbol;
  e.symbol = std::move(name);
  return e;
}

BnfExpr BnfExpr::make(Kind k, std::vector<BnfExpr> kids) {
  BnfExpr e;
  e.kind = k;
  e.children = std::move(kids);
  return e;
}

BnfExpr BnfExpr::tagged(BnfExpr inner, std::string tag) {
  BnfExpr e;
  e.kind = Tagged;
  e.children.push_back(std::move(inner));
  e.tag = std::move(tag);
  return e;
}

bool BnfExpr::operator==(const BnfExpr& o) const {
  return kind == o.kind && symbol == o.symbol && tag == o.tag && children == o.children;
}

const char* assoc_name(Assoc a) {
  switch (a) {
    case Assoc::None: return "none";
    case Assoc::Left: return "left";
    case Assoc::Right: return "right";
    case Assoc::Prefix: return "prefix";
    case Assoc::Postfix: return "postfix";
  }
  return "none";
}

const TokenDef* BnfGrammar::token(const std::string& name) const {
  for (auto& t : tokens)
    if (t.name == name) return &t;
  return nullptr;
}

bool BnfGrammar::is_nonterminal(const std::string& name) const {
  for (auto& r : rules)
    if (r.lhs == name) return true;
  return false;
}

std::vector<std::string> BnfGrammar::nonterminals() const {
  std::vector<std::string> out;
  for (auto& r : rules)
    if (std::find(out.begin(), out.end(), r.lhs) == out.end()) out.push_back(r.lhs);
  return out;
}

const std::vector<AttrDecl>* BnfGrammar::domain(const std::string& nt) const {
  for (auto& [n, d] : attrs)
    if (n == nt) return &d;
  return nullptr;
}

std::vector<AttrDecl>& BnfGrammar::domain_mut(const std::string& nt) {
  for (auto& [n, d] : attrs)
    if (n == nt) return d;
  attrs.emplace_back(nt, std::vector<AttrDecl>{});
  return attrs.back().second;
}

int BnfGrammar::find_rule(const std::string& ref) const {
  int found = -1;
  for (size_t i = 0; i < rules.size(); ++i) {
    if (rules[i].ref() == ref) {
      if (found >= 0) return -1;
      found = static_cast<int>(i);
    }
  }
  return found;
}

void number_symbol_nodes(BnfGrammar& g) {
  for (auto& r : g.rules) {
    int next = 0;
    std::function<void(BnfExpr&)> walk = [&](BnfExpr& e) {
      if (e.kind == BnfExpr::Symbol) e.node_id = next++;
      for (auto& c : e.children) walk(c);
    };
    walk(r.rhs);
  }
}

void mark_unfoldable(BnfGrammar& g, bool all, const std::set<std::string>& names) {
  number_symbol_nodes(g);
  for (auto& r : g.rules) {
    std::function<void(const BnfExpr&)> walk = [&](const BnfExpr& e) {
      if (e.kind == BnfExpr::Symbol && g.is_nonterminal(e.symbol) &&
          (all || names.count(e.symbol)))
        r.unfoldable.insert(e.node_id);
      for (auto& c : e.children) walk(c);
    };
    walk(r.rhs);
  }
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class T {
  Ident, String, Pattern, Int, LBrace, RBrace, Semi, Eq, Bar, Quest, Star, Plus, LParen,
  RParen, LBrack, RBrack, Comma, Dot, Arrow, ColonColon, Colon, Le, Ge, TagOpen, At, End
};

struct Tok {
  T t;
  std::string s;
  int line, col;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : s_(src) {}

  std::vector<Tok> run() {
    std::vector<Tok> out;
    for (;;) {
      skip();
      int l = line_, c = col_;
      if (i_ >= s_.size()) {
        out.push_back({T::End, "", l, c});
        return out;
      }
      char ch = s_[i_];
      if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
        size_t j = i_;
        while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) ||
                                 s_[j] == '_' || s_[j] == '\''))
          ++j;
        std::string id = s_.substr(i_, j - i_);
        if (id.back() == '_' && j < s_.size() && s_[j] == '[') {
          id.pop_back();
          if (!id.empty()) out.push_back({T::Ident, id, l, c});
          adv(j - i_ + 1);
          out.push_back({T::TagOpen, "_[", l, c + static_cast<int>(id.size())});
          continue;
        }
        adv(j - i_);
        out.push_back({T::Ident, id, l, c});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(ch))) {
        size_t j = i_;
        while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
        out.push_back({T::Int, s_.substr(i_, j - i_), l, c});
        adv(j - i_);
        continue;
      }
      if (ch == '"') {
        std::string v;
        adv(1);
        for (;;) {
          if (i_ >= s_.size() || s_[i_] == '\n') throw Error("parse", "unterminated string", l, c);
          char d = s_[i_];
          if (d == '"') {
            adv(1);
            break;
          }
          if (d == '\\') {
            if (i_ + 1 >= s_.size()) throw Error("parse", "unterminated string", l, c);
            char e = s_[i_ + 1];
            v += e == 'n' ? '\n' : e == 't' ? '\t' : e == 'r' ? '\r' : e;
            adv(2);
            continue;
          }
          v += d;
          adv(1);
        }
        out.push_back({T::String, v, l, c});
        continue;
      }
      if (ch == '/') {
        std::string v;
        adv(1);
        for (;;) {
          if (i_ >= s_.size() || s_[i_] == '\n') throw Error("parse", "unterminated pattern", l, c);
          char d = s_[i_];
          if (d == '/') {
            adv(1);
            break;
          }
          if (d == '\\' && i_ + 1 < s_.size()) {
            v += d;
            v += s_[i_ + 1];
            adv(2);
            continue;
          }
          v += d;
          adv(1);
        }
        if (v.empty()) throw Error("parse", "empty pattern", l, c);
        out.push_back({T::Pattern, v, l, c});
        continue;
      }
      auto two = s_.substr(i_, 2);
      if (two == "->") { out.push_back({T::Arrow, two, l, c}); adv(2); continue; }
      if (two == "::") { out.push_back({T::ColonColon, two, l, c}); adv(2); continue; }
      if (two == "<=") { out.push_back({T::Le, two, l, c}); adv(2); continue; }
      if (two == ">=") { out.push_back({T::Ge, two, l, c}); adv(2); continue; }
      T t;
      switch (ch) {
        case '{': t = T::LBrace; break;
        case '}': t = T::RBrace; break;
        case ';': t = T::Semi; break;
        case '=': t = T::Eq; break;
        case '|': t = T::Bar; break;
        case '?': t = T::Quest; break;
        case '*': t = T::Star; break;
        case '+': t = T::Plus; break;
        case '(': t = T::LParen; break;
        case ')': t = T::RParen; break;
        case '[': t = T::LBrack; break;
        case ']': t = T::RBrack; break;
        case ',': t = T::Comma; break;
        case '.': t = T::Dot; break;
        case ':': t = T::Colon; break;
        case '@': t = T::At; break;
        default:
          throw Error("parse", std::string("unexpected character '") + ch + "'", l, c);
      }
      out.push_back({t, std::string(1, ch), l, c});
      adv(1);
    }
  }

 private:
  void adv(size_t n) {
    for (size_t k = 0; k < n && i_ < s_.size(); ++k, ++i_) {
      if (s_[i_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
    }
  }
  void skip() {
    for (;;) {
      while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) adv(1);
      if (i_ + 1 < s_.size() && s_[i_] == '/' && s_[i_ + 1] == '/') {
        while (i_ < s_.size() && s_[i_] != '\n') adv(1);
        continue;
      }
      return;
    }
  }

  const std::string& s_;
  size_t i_ = 0;
  int line_ = 1, col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser

struct SymRef {
  std::string name;
  int line, col;
};

class Parser {
 public:
  explicit Parser(std::vector<Tok> toks) : t_(std::move(toks)) {}

  BnfGrammar run() {
    bool have_start = false;
    while (peek().t != T::End) {
      Tok k = expect(T::Ident, "section keyword");
      if (k.s == "tokens") {
        tokens_section();
      } else if (k.s == "start") {
        if (have_start) fail(k, "duplicate start declaration");
        g_.start = expect(T::Ident, "start symbol").s;
        start_ref_ = {g_.start, k.line, k.col};
        expect(T::Semi, "';'");
        have_start = true;
      } else if (k.s == "rules") {
        rules_section();
      } else if (k.s == "prec") {
        prec_section();
      } else if (k.s == "attrs") {
        attrs_section();
      } else {
        fail(k, "unknown section '" + k.s + "'");
      }
    }
    if (!have_start) throw Error("parse", "missing start declaration", 1, 1);
    check_refs();
    number_symbol_nodes(g_);
    for (auto& [ri, ids] : marks_) g_.rules[ri].unfoldable = ids;
    return std::move(g_);
  }

 private:
  const Tok& peek(size_t off = 0) const { return t_[std::min(p_ + off, t_.size() - 1)]; }
  Tok next() { return t_[std::min(p_++, t_.size() - 1)]; }
  [[noreturn]] void fail(const Tok& at, const std::string& msg) {
    throw Error("parse", msg, at.line, at.col);
  }
  Tok expect(T t, const char* what) {
    Tok k = next();
    if (k.t != t) fail(k, std::string("expected ") + what + ", found '" + k.s + "'");
    return k;
  }
  bool accept(T t) {
    if (peek().t == t) {
      ++p_;
      return true;
    }
    return false;
  }

  void tokens_section() {
    expect(T::LBrace, "'{'");
    while (!accept(T::RBrace)) {
      Tok name = expect(T::Ident, "token name");
      expect(T::Eq, "'='");
      Tok v = next();
      TokenDef d;
      d.name = name.s;
      if (v.t == T::String) {
        if (v.s.empty()) fail(v, "empty token literal");
        d.text = v.s;
      } else if (v.t == T::Pattern) {
        d.is_pattern = true;
        d.text = v.s;
      } else {
        fail(v, "expected string literal or /pattern/");
      }
      if (g_.token(d.name)) fail(name, "duplicate symbol declaration '" + d.name + "'");
      g_.tokens.push_back(d);
      expect(T::Semi, "';'");
    }
  }

  void attrs_section() {
    expect(T::LBrace, "'{'");
    while (!accept(T::RBrace)) {
      Tok nt = expect(T::Ident, "nonterminal");
      expect(T::Colon, "':'");
      for (auto& [n, d] : g_.attrs)
        if (n == nt.s) fail(nt, "duplicate attribute declaration for '" + nt.s + "'");
      std::vector<AttrDecl> dom;
      do {
        Tok key = expect(T::Ident, "attribute key");
        Tok ty = expect(T::Ident, "attribute type");
        AttrDecl a;
        a.key = key.s;
        if (ty.s == "bool") {
          a.type = {true, 2};
        } else if (ty.s == "int") {
          expect(T::LParen, "'('");
          Tok n = expect(T::Int, "range");
          expect(T::RParen, "')'");
          a.type = {false, std::stoi(n.s)};
          if (a.type.range < 1) fail(n, "attribute range must be positive");
        } else {
          fail(ty, "expected 'bool' or 'int(n)'");
        }
        for (auto& b : dom)
          if (b.key == a.key) fail(key, "duplicate attribute key '" + a.key + "'");
        dom.push_back(a);
      } while (accept(T::Comma));
      expect(T::Semi, "';'");
      g_.attrs.emplace_back(nt.s, dom);
      attr_lines_.push_back({nt.s, nt.line, nt.col});
    }
  }

  void prec_section() {
    expect(T::LBrace, "'{'");
    while (!accept(T::RBrace)) {
      expect(T::LBrace, "'{'");
      PrecItem item;
      do {
        Tok a = expect(T::Ident, "rule reference");
        std::string ref = a.s;
        if (accept(T::Dot)) ref += "." + expect(T::Ident, "variant").s;
        item.rules.push_back(ref);
        prec_refs_.push_back({ref, a.line, a.col});
      } while (accept(T::Comma));
      expect(T::RBrace, "'}'");
      Tok as = expect(T::Ident, "associativity");
      if (as.s == "none") item.assoc = Assoc::None;
      else if (as.s == "left") item.assoc = Assoc::Left;
      else if (as.s == "right") item.assoc = Assoc::Right;
      else if (as.s == "prefix") item.assoc = Assoc::Prefix;
      else if (as.s == "postfix") item.assoc = Assoc::Postfix;
      else fail(as, "unknown associativity '" + as.s + "'");
      expect(T::Semi, "';'");
      g_.prec.push_back(item);
    }
  }

  void rules_section() {
    expect(T::LBrace, "'{'");
    while (!accept(T::RBrace)) {
      BnfRule r;
      Tok lhs = expect(T::Ident, "rule name");
      r.lhs = lhs.s;
      r.line = lhs.line;
      if (accept(T::Dot)) r.variant = expect(T::Ident, "variant").s;
      for (auto& o : g_.rules)
        if (o.ref() == r.ref()) fail(lhs, "duplicate rule '" + r.ref() + "'");
      expect(T::Arrow, "'->'");
      cur_marks_.clear();
      sym_counter_ = 0;
      r.rhs = alt();
      if (peek().t == T::Ident && peek().s == "where") {
        next();
        do r.constraints.push_back(constraint());
        while (accept(T::Comma));
      }
      expect(T::Semi, "';'");
      if (!cur_marks_.empty()) marks_[static_cast<int>(g_.rules.size())] = cur_marks_;
      g_.rules.push_back(std::move(r));
    }
  }

  BnfExpr alt() {
    std::vector<BnfExpr> kids;
    kids.push_back(seq());
    while (accept(T::Bar)) kids.push_back(seq());
    if (kids.size() == 1) return std::move(kids[0]);
    return BnfExpr::make(BnfExpr::Alt, std::move(kids));
  }

  bool starts_primary() const {
    auto t = peek().t;
    if (t == T::Ident) return peek().s != "where";
    return t == T::LParen || t == T::At;
  }

  BnfExpr seq() {
    std::vector<BnfExpr> kids;
    if (!starts_primary()) fail(peek(), "expected expression, found '" + peek().s + "'");
    while (starts_primary()) kids.push_back(postfix());
    if (kids.size() == 1) return std::move(kids[0]);
    return BnfExpr::make(BnfExpr::Concat, std::move(kids));
  }

  BnfExpr postfix() {
    BnfExpr e = primary();
    for (;;) {
      if (accept(T::Quest)) e = BnfExpr::make(BnfExpr::Optional, {std::move(e)});
      else if (accept(T::Star)) e = BnfExpr::make(BnfExpr::Star, {std::move(e)});
      else if (accept(T::Plus)) e = BnfExpr::make(BnfExpr::Plus, {std::move(e)});
      else if (accept(T::TagOpen)) {
        std::string tag = expect(T::Ident, "tag").s;
        expect(T::RBrack, "']'");
        e = BnfExpr::tagged(std::move(e), tag);
      } else {
        return e;
      }
    }
  }

  BnfExpr primary() {
    if (accept(T::LParen)) {
      BnfExpr e = alt();
      expect(T::RParen, "')'");
      return e;
    }
    bool marked = accept(T::At);
    Tok id = expect(T::Ident, "symbol");
    if (!marked && id.s == "List" && peek().t == T::LBrack) {
      next();
      BnfExpr el = alt();
      expect(T::ColonColon, "'::'");
      BnfExpr d = alt();
      expect(T::RBrack, "']'");
      return BnfExpr::make(BnfExpr::List, {std::move(el), std::move(d)});
    }
    refs_.push_back({id.s, id.line, id.col});
    if (marked) cur_marks_.insert(sym_counter_);
    ++sym_counter_;
    return BnfExpr::sym(id.s);
  }

  Selector selector(const Tok& k) {
    Selector s;
    if (k.s == "rhs") s.kind = Selector::Rhs;
    else if (k.s == "rhs_begin") s.kind = Selector::RhsBegin;
    else if (k.s == "rhs_end") s.kind = Selector::RhsEnd;
    else if (k.s == "rhs_mid") s.kind = Selector::RhsMid;
    else if (k.s == "rhs_tag") {
      s.kind = Selector::RhsTag;
      expect(T::LBrack, "'['");
      s.tag = expect(T::Ident, "tag").s;
      expect(T::RBrack, "']'");
    } else {
      fail(k, "malformed constraint: unknown selector '" + k.s + "'");
    }
    return s;
  }

  std::string bracket_key() {
    expect(T::LBrack, "'['");
    std::string key = expect(T::Ident, "attribute key").s;
    expect(T::RBrack, "']'");
    return key;
  }

  int value() {
    Tok v = next();
    if (v.t == T::Int) return std::stoi(v.s);
    if (v.t == T::Ident && v.s == "true") return 1;
    if (v.t == T::Ident && v.s == "false") return 0;
    fail(v, "malformed constraint: expected a value");
  }

  AttrConstraint constraint() {
    Tok k = expect(T::Ident, "constraint");
    AttrConstraint c;
    if (k.s == "lhs") {
      c.key = bracket_key();
      expect(T::Le, "'<='");
      if (peek().t == T::Ident && peek().s.rfind("rhs", 0) == 0) {
        Tok s = next();
        c.form = AttrConstraint::LhsLeqRhs;
        c.sel = selector(s);
        c.key2 = bracket_key();
      } else {
        c.form = AttrConstraint::LhsLeq;
        c.bound = value();
      }
      return c;
    }
    c.form = AttrConstraint::RhsGeq;
    c.sel = selector(k);
    c.key = bracket_key();
    expect(T::Ge, "'>='");
    c.bound = value();
    return c;
  }

  void check_refs() {
    auto known = [&](const std::string& n) { return g_.token(n) || g_.is_nonterminal(n); };
    for (auto& r : refs_)
      if (!known(r.name))
        throw Error("parse", "reference to undeclared symbol '" + r.name + "'", r.line, r.col);
    if (!g_.is_nonterminal(g_.start))
      throw Error("parse", "start symbol '" + g_.start + "' has no rules", start_ref_.line,
                  start_ref_.col);
    for (auto& r : prec_refs_)
      if (g_.find_rule(r.name) < 0)
        throw Error("parse", "precedence references unknown rule '" + r.name + "'", r.line,
                    r.col);
    for (auto& a : attr_lines_)
      if (!g_.is_nonterminal(a.name))
        throw Error("parse", "attributes declared for undeclared nonterminal '" + a.name + "'",
                    a.line, a.col);
    for (auto& t : g_.tokens)
      if (g_.is_nonterminal(t.name))
        throw Error("parse", "duplicate symbol declaration '" + t.name + "'");
  }

  std::vector<Tok> t_;
  size_t p_ = 0;
  BnfGrammar g_;
  std::vector<SymRef> refs_, prec_refs_, attr_lines_;
  SymRef start_ref_{};
  std::set<int> cur_marks_;
  int sym_counter_ = 0;
  std::map<int, std::set<int>> marks_;
};

}  // namespace

BnfGrammar parse_grammar_source(const std::string& text) {
  Lexer lx(text);
  Parser p(lx.run());
  return p.run();
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void collect_symbols(const BnfExpr& e, std::vector<std::string>& out) {
  if (e.kind == BnfExpr::Symbol) out.push_back(e.symbol);
  for (auto& c : e.children) collect_symbols(c, out);
}

void collect_tags(const BnfExpr& e, std::set<std::string>& out) {
  if (e.kind == BnfExpr::Tagged) out.insert(e.tag);
  for (auto& c : e.children) collect_tags(c, out);
}

const AttrDecl* find_key(const std::vector<AttrDecl>* dom, const std::string& key) {
  if (!dom) return nullptr;
  for (auto& a : *dom)
    if (a.key == key) return &a;
  return nullptr;
}

}  // namespace

std::vector<Diagnostic> validate_grammar(BnfGrammar& g) {
  std::vector<Diagnostic> out;
  auto err = [&](const std::string& m, int line = 0) {
    out.push_back({Diagnostic::Err, m, line, line > 0 ? 1 : 0});
  };

  if (g.start.empty() || !g.is_nonterminal(g.start)) err("start symbol '" + g.start + "' is not declared");
  for (auto& t : g.tokens)
    if (g.is_nonterminal(t.name)) err("symbol '" + t.name + "' is both a token and a nonterminal");
  for (size_t i = 0; i < g.tokens.size(); ++i)
    for (size_t j = i + 1; j < g.tokens.size(); ++j)
      if (g.tokens[i].name == g.tokens[j].name) err("duplicate token '" + g.tokens[i].name + "'");

  for (auto& r : g.rules) {
    std::vector<std::string> syms;
    collect_symbols(r.rhs, syms);
    for (auto& s : syms)
      if (!g.token(s) && !g.is_nonterminal(s))
        err("rule " + r.ref() + " references undeclared symbol '" + s + "'", r.line);
    std::set<std::string> tags;
    collect_tags(r.rhs, tags);
    const auto* ldom = g.domain(r.lhs);
    for (auto& c : r.constraints) {
      if (c.sel.kind == Selector::RhsTag && !tags.count(c.sel.tag))
        err("rule " + r.ref() + ": tag '" + c.sel.tag + "' not present in rule", r.line);
      if (c.form == AttrConstraint::LhsLeq || c.form == AttrConstraint::LhsLeqRhs) {
        const AttrDecl* a = find_key(ldom, c.key);
        if (!a) {
          err("rule " + r.ref() + ": attribute '" + c.key + "' not in domain of " + r.lhs, r.line);
        } else if (c.form == AttrConstraint::LhsLeq && (c.bound < 0 || c.bound >= a->type.range)) {
          err("rule " + r.ref() + ": bound " + std::to_string(c.bound) + " out of range for '" +
                  c.key + "'",
              r.line);
        }
      }
      if (c.form == AttrConstraint::RhsGeq || c.form == AttrConstraint::LhsLeqRhs) {
        const std::string& k = c.form == AttrConstraint::RhsGeq ? c.key : c.key2;
        bool any = false;
        int range = 0;
        for (auto& s : syms)
          if (const AttrDecl* a = find_key(g.domain(s), k)) {
            any = true;
            range = std::max(range, a->type.range);
          }
        if (!any && !find_key(ldom, k))
          err("rule " + r.ref() + ": attribute '" + k + "' not in any referenced domain", r.line);
        if (c.form == AttrConstraint::RhsGeq && any && (c.bound < 0 || c.bound >= range))
          err("rule " + r.ref() + ": bound " + std::to_string(c.bound) + " out of range for '" +
                  k + "'",
              r.line);
      }
    }
  }

  std::map<std::string, int> level_of;
  for (size_t i = 0; i < g.prec.size(); ++i) {
    for (auto& ref : g.prec[i].rules) {
      int ri = g.find_rule(ref);
      if (ri < 0) {
        err("precedence references unknown rule '" + ref + "'");
        continue;
      }
      if (level_of.count(ref)) err("rule '" + ref + "' appears in more than one precedence item");
      level_of[ref] = static_cast<int>(i);
    }
  }
  for (auto& nt : g.nonterminals()) {
    int leveled = 0, total = 0;
    for (auto& r : g.rules)
      if (r.lhs == nt) {
        ++total;
        leveled += level_of.count(r.ref()) ? 1 : 0;
      }
    if (leveled > 0 && leveled < total)
      err("nonterminal '" + nt + "' has rules both with and without a precedence level");
  }

  bool has_error = std::any_of(out.begin(), out.end(), [](auto& d) { return d.is_error(); });
  if (!has_error) {
    bool in_rhs = false;
    int start_rules = 0;
    bool multi = false;
    for (auto& r : g.rules) {
      std::vector<std::string> syms;
      collect_symbols(r.rhs, syms);
      if (std::find(syms.begin(), syms.end(), g.start) != syms.end()) in_rhs = true;
      if (r.lhs == g.start) {
        ++start_rules;
        auto k = r.rhs.kind;
        if (k != BnfExpr::Symbol && k != BnfExpr::Concat && k != BnfExpr::Tagged) multi = true;
      }
    }
    if (in_rhs || start_rules > 1 || multi) {
      std::string name = g.start + "'";
      while (g.is_nonterminal(name) || g.token(name)) name += "'";
      BnfRule w;
      w.lhs = name;
      w.rhs = BnfExpr::sym(g.start);
      g.rules.insert(g.rules.begin(), w);
      std::string old = g.start;
      g.start = name;
      number_symbol_nodes(g);
      out.push_back({Diagnostic::Note,
                     "wrapper inserted: " + name + " -> " + old +
                         (in_rhs ? " (start symbol appears in a right-hand side)"
                                 : " (start symbol has several productions)"),
                     0, 0});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string quote(const std::string& s) {
  std::string o = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') o += '\\', o += c;
    else if (c == '\n') o += "\\n";
    else if (c == '\t') o += "\\t";
    else if (c == '\r') o += "\\r";
    else o += c;
  }
  return o + "\"";
}

void render_expr_into(const BnfExpr& e, std::string& o, int ctx, const std::set<int>* marks) {
  // ctx: 0 = top/alt branch position, 1 = concat element, 2 = postfix operand
  switch (e.kind) {
    case BnfExpr::Symbol:
      if (marks && marks->count(e.node_id)) o += "@";
      o += e.symbol;
      return;
    case BnfExpr::Concat:
    case BnfExpr::Alt: {
      bool paren = (e.kind == BnfExpr::Alt) ? ctx >= 1 : ctx >= 1;
      if (paren) o += "(";
      for (size_t i = 0; i < e.children.size(); ++i) {
        if (i) o += e.kind == BnfExpr::Alt ? " | " : " ";
        render_expr_into(e.children[i], o, e.kind == BnfExpr::Alt ? 1 - (e.children[i].kind != BnfExpr::Alt) : 1, marks);
      }
      if (paren) o += ")";
      return;
    }
    case BnfExpr::Optional:
    case BnfExpr::Star:
    case BnfExpr::Plus:
      render_expr_into(e.children[0], o, 2, marks);
      o += e.kind == BnfExpr::Optional ? "?" : e.kind == BnfExpr::Star ? "*" : "+";
      return;
    case BnfExpr::Tagged:
      render_expr_into(e.children[0], o, 2, marks);
      o += "_[" + e.tag + "]";
      return;
    case BnfExpr::List:
      o += "List[";
      render_expr_into(e.children[0], o, 0, marks);
      o += " :: ";
      render_expr_into(e.children[1], o, 0, marks);
      o += "]";
      return;
  }
}

std::string render_selector(const Selector& s) {
  switch (s.kind) {
    case Selector::Rhs: return "rhs";
    case Selector::RhsBegin: return "rhs_begin";
    case Selector::RhsEnd: return "rhs_end";
    case Selector::RhsMid: return "rhs_mid";
    case Selector::RhsTag: return "rhs_tag[" + s.tag + "]";
  }
  return "rhs";
}

}  // namespace

std::string render_expr(const BnfExpr& e) {
  std::string o;
  render_expr_into(e, o, 0, nullptr);
  return o;
}

std::string render(const BnfGrammar& g) {
  std::ostringstream os;
  os << "tokens {\n";
  for (auto& t : g.tokens) {
    os << "  " << t.name << " = ";
    if (t.is_pattern) os << "/" << t.text << "/";
    else os << quote(t.text);
    os << ";\n";
  }
  os << "}\n";
  os << "start " << g.start << ";\n";
  if (!g.attrs.empty()) {
    os << "attrs {\n";
    for (auto& [nt, dom] : g.attrs) {
      os << "  " << nt << " :";
      for (size_t i = 0; i < dom.size(); ++i) {
        os << (i ? ", " : " ") << dom[i].key << " ";
        if (dom[i].type.is_bool) os << "bool";
        else os << "int(" << dom[i].type.range << ")";
      }
      os << ";\n";
    }
    os << "}\n";
  }
  os << "rules {\n";
  for (auto& r : g.rules) {
    std::string rhs;
    render_expr_into(r.rhs, rhs, 0, &r.unfoldable);
    os << "  " << r.ref() << " -> " << rhs;
    for (size_t i = 0; i < r.constraints.size(); ++i) {
      auto& c = r.constraints[i];
      os << (i ? ", " : " where ");
      switch (c.form) {
        case AttrConstraint::LhsLeq: os << "lhs[" << c.key << "] <= " << c.bound; break;
        case AttrConstraint::RhsGeq:
          os << render_selector(c.sel) << "[" << c.key << "] >= " << c.bound;
          break;
        case AttrConstraint::LhsLeqRhs:
          os << "lhs[" << c.key << "] <= " << render_selector(c.sel) << "[" << c.key2 << "]";
          break;
      }
    }
    os << ";\n";
  }
  os << "}\n";
  if (!g.prec.empty()) {
    os << "prec {\n";
    for (auto& p : g.prec) {
      os << "  {";
      for (size_t i = 0; i < p.rules.size(); ++i) os << (i ? ", " : "") << p.rules[i];
      os << "} " << assoc_name(p.assoc) << ";\n";
    }
    os << "}\n";
  }
  return os.str();
}

}  // namespace xlr
