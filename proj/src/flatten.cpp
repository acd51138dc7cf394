#include "xlr/flatten.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <set>
#include <tuple>

namespace xlr {

// ---------------------------------------------------------------------------
// Precedence

std::vector<PrecAddition> lower_precedence(const BnfGrammar& g) {
  std::vector<PrecAddition> out;
  const std::string L = "prL", R = "prR";
  auto leq = [](const std::string& k, int b) {
    AttrConstraint c;
    c.form = AttrConstraint::LhsLeq;
    c.key = k;
    c.bound = b;
    return c;
  };
  auto geq = [](Selector::Kind s, const std::string& k, int b) {
    AttrConstraint c;
    c.form = AttrConstraint::RhsGeq;
    c.sel.kind = s;
    c.key = k;
    c.bound = b;
    return c;
  };
  auto rel = [](const std::string& k, Selector::Kind s) {
    AttrConstraint c;
    c.form = AttrConstraint::LhsLeqRhs;
    c.key = k;
    c.key2 = k;
    c.sel.kind = s;
    return c;
  };
  for (size_t lvl = 0; lvl < g.prec.size(); ++lvl) {
    int l = static_cast<int>(lvl);
    std::vector<AttrConstraint> cs;
    switch (g.prec[lvl].assoc) {
      case Assoc::None:
        cs = {leq(L, l), leq(R, l), geq(Selector::Rhs, L, l + 1), geq(Selector::Rhs, R, l + 1)};
        break;
      case Assoc::Left:
        cs = {leq(L, l),
              leq(R, l),
              geq(Selector::RhsBegin, R, l),
              geq(Selector::RhsMid, L, l + 1),
              geq(Selector::RhsMid, R, l + 1),
              geq(Selector::RhsEnd, L, l + 1),
              rel(L, Selector::RhsBegin),
              rel(R, Selector::RhsEnd)};
        break;
      case Assoc::Right:
        cs = {leq(L, l),
              leq(R, l),
              geq(Selector::RhsBegin, R, l + 1),
              geq(Selector::RhsMid, L, l + 1),
              geq(Selector::RhsMid, R, l + 1),
              geq(Selector::RhsEnd, L, l),
              rel(L, Selector::RhsBegin),
              rel(R, Selector::RhsEnd)};
        break;
      case Assoc::Prefix:
        cs = {leq(R, l), geq(Selector::RhsMid, L, l + 1), geq(Selector::RhsMid, R, l + 1),
              geq(Selector::RhsEnd, L, l + 1), rel(R, Selector::Rhs)};
        break;
      case Assoc::Postfix:
        cs = {leq(L, l), geq(Selector::RhsBegin, R, l + 1), geq(Selector::RhsMid, L, l + 1),
              geq(Selector::RhsMid, R, l + 1), rel(L, Selector::Rhs)};
        break;
    }
    for (auto& ref : g.prec[lvl].rules) {
      int ri = g.find_rule(ref);
      if (ri < 0) throw Error("flatten", "precedence references unknown rule '" + ref + "'");
      for (auto& c : cs) out.push_back({ri, c});
    }
  }
  return out;
}

BnfGrammar apply_precedence(const BnfGrammar& g) {
  BnfGrammar out = g;
  auto adds = lower_precedence(g);
  if (g.prec.empty()) return out;
  int n = static_cast<int>(g.prec.size());
  std::vector<std::string> leveled;
  for (auto& a : adds) {
    const std::string& lhs = g.rules[a.rule].lhs;
    if (std::find(leveled.begin(), leveled.end(), lhs) == leveled.end()) leveled.push_back(lhs);
  }
  for (auto& nt : leveled) {
    auto& dom = out.domain_mut(nt);
    for (const char* k : {"prL", "prR"}) {
      bool have = std::any_of(dom.begin(), dom.end(), [&](auto& d) { return d.key == k; });
      if (!have) dom.push_back({k, AttrType{false, n}});
    }
  }
  for (auto& a : adds) out.rules[a.rule].constraints.push_back(a.constraint);
  return out;
}

// ---------------------------------------------------------------------------
// Flattening

namespace {

bool inlinable(const BnfExpr& e) {
  const BnfExpr* x = &e;
  while (x->kind == BnfExpr::Tagged) x = &x->children[0];
  return x->kind == BnfExpr::Symbol || e.kind == BnfExpr::Concat;
}

Provenance::Role role_for(BnfExpr::Kind k) {
  switch (k) {
    case BnfExpr::Alt: return Provenance::FreshAlt;
    case BnfExpr::Optional: return Provenance::FreshOpt;
    case BnfExpr::Star: return Provenance::FreshStar;
    case BnfExpr::Plus: return Provenance::FreshPlus;
    case BnfExpr::List: return Provenance::FreshList;
    default: return Provenance::FreshConcat;
  }
}

struct Flattener {
  const BnfGrammar& g;
  Cfg& cfg;
  int rule_idx;
  const BnfRule& rule;
  std::map<std::string, int>& counters;
  std::vector<FlatProductionInfo> infos;
  int top_lhs;

  int fresh() {
    std::string name;
    do name = "_" + rule.lhs + "_" + std::to_string(counters[rule.lhs]++);
    while (cfg.find(name) >= 0);
    Label l;
    l.name = name;
    l.flat = cfg.num_symbols();
    l.domain = cfg.labels[cfg.label[top_lhs]].domain;
    cfg.labels.push_back(l);
    int id = cfg.add_symbol(name, static_cast<int>(cfg.labels.size()) - 1);
    cfg.cps_eligible[id] = 1;
    return id;
  }

  struct Pending {
    int sym;
    const BnfExpr* expr;
    bool begin, end;
  };

  int push(int X, std::vector<int> rhs, std::vector<PositionInfo> pos, Provenance::Role role) {
    Production p;
    p.id = static_cast<int>(cfg.prods.size());
    p.lhs = X;
    p.rhs = std::move(rhs);
    p.prov = {rule_idx, role};
    p.tree = p.id;
    p.arity = static_cast<int>(p.rhs.size());
    for (auto& pi : pos)
      p.unfold.push_back(pi.fresh || pi.structural ||
                         (pi.node_id >= 0 && rule.unfoldable.count(pi.node_id)));
    cfg.prods.push_back(p);
    infos.push_back({p.id, X == top_lhs, std::move(pos)});
    return p.id;
  }

  // Emits X -> elems [X]. Complex elements get fresh symbols (or the given override).
  void seq(int X, const std::vector<const BnfExpr*>& elems, bool xb, bool xe, Provenance::Role role,
           bool self_tail, int override_sym = -1) {
    std::vector<int> rhs;
    std::vector<PositionInfo> pos;
    std::vector<Pending> pending;
    size_t n = elems.size();
    for (size_t i = 0; i < n; ++i) {
      PositionInfo pi;
      pi.begin = xb && i == 0;
      pi.end = xe && i + 1 == n;
      const BnfExpr* x = elems[i];
      while (x->kind == BnfExpr::Tagged) {
        pi.tags.insert(x->tag);
        x = &x->children[0];
      }
      if (x->kind == BnfExpr::Symbol) {
        rhs.push_back(cfg.find(x->symbol));
        pi.node_id = x->node_id;
      } else if (override_sym >= 0) {
        rhs.push_back(override_sym);
        pi.fresh = true;
      } else {
        int f = fresh();
        rhs.push_back(f);
        pi.fresh = true;
        pending.push_back({f, x, pi.begin, pi.end});
      }
      pos.push_back(pi);
    }
    if (self_tail) {
      PositionInfo pi;
      pi.structural = true;
      rhs.push_back(X);
      pos.push_back(pi);
    }
    push(X, std::move(rhs), std::move(pos), role);
    for (auto& p : pending) flat(p.sym, *p.expr, p.begin, p.end, role_for(p.expr->kind));
  }

  static std::vector<const BnfExpr*> elements(const BnfExpr& e) {
    std::vector<const BnfExpr*> v;
    if (e.kind == BnfExpr::Concat)
      for (auto& c : e.children) v.push_back(&c);
    else
      v.push_back(&e);
    return v;
  }

  void flat(int X, const BnfExpr& e, bool xb, bool xe, Provenance::Role role) {
    switch (e.kind) {
      case BnfExpr::Symbol:
      case BnfExpr::Tagged:
      case BnfExpr::Concat:
        seq(X, elements(e), xb, xe, role, false);
        return;
      case BnfExpr::Alt:
        for (auto& c : e.children) flat(X, c, xb, xe, role);
        return;
      case BnfExpr::Optional:
        flat(X, e.children[0], xb, xe, role);
        seq(X, {}, xb, xe, role, false);
        return;
      case BnfExpr::Star:
        seq(X, inlinable(e.children[0]) ? elements(e.children[0])
                                        : std::vector<const BnfExpr*>{&e.children[0]},
            xb, xe, role, true);
        seq(X, {}, xb, xe, role, false);
        return;
      case BnfExpr::Plus: {
        const BnfExpr& body = e.children[0];
        if (inlinable(body)) {
          seq(X, elements(body), xb, xe, role, true);
          seq(X, elements(body), xb, xe, role, false);
        } else {
          int a = fresh();
          seq(X, {&body}, xb, xe, role, true, a);
          seq(X, {&body}, xb, xe, role, false, a);
          flat(a, body, xb, xe, role_for(body.kind));
        }
        return;
      }
      case BnfExpr::List: {
        // List[e :: d] is e (d e)*
        synth_.push_back(std::make_unique<BnfExpr>(BnfExpr::make(
            BnfExpr::Concat,
            {e.children[0],
             BnfExpr::make(BnfExpr::Star, {BnfExpr::make(BnfExpr::Concat,
                                                         {e.children[1], e.children[0]})})})));
        flat(X, *synth_.back(), xb, xe, role);
        return;
      }
    }
  }

  std::vector<std::unique_ptr<BnfExpr>> synth_;
};

bool matches(const Selector& s, const PositionInfo& p) {
  switch (s.kind) {
    case Selector::Rhs: return true;
    case Selector::RhsBegin: return p.begin;
    case Selector::RhsEnd: return p.end;
    case Selector::RhsMid: return !p.begin && !p.end;
    case Selector::RhsTag: return p.tags.count(s.tag) > 0;
  }
  return false;
}

bool has_key(const std::vector<AttrDecl>& d, const std::string& k) {
  return std::any_of(d.begin(), d.end(), [&](auto& a) { return a.key == k; });
}

bool tag_present(const BnfExpr& e, const std::string& t) {
  if (e.kind == BnfExpr::Tagged && e.tag == t) return true;
  for (auto& c : e.children)
    if (tag_present(c, t)) return true;
  return false;
}

}  // namespace

std::vector<std::vector<FlatConstraint>> lower_constraints(
    const BnfGrammar& g, const BnfRule& rule, const Cfg& cfg,
    const std::vector<FlatProductionInfo>& prods) {
  (void)g;
  for (auto& c : rule.constraints)
    if (c.sel.kind == Selector::RhsTag &&
        (c.form == AttrConstraint::RhsGeq || c.form == AttrConstraint::LhsLeqRhs) &&
        !tag_present(rule.rhs, c.sel.tag))
      throw Error("flatten", "rule " + rule.ref() + ": tag '" + c.sel.tag + "' not present in rule",
                  rule.line, 1);
  std::vector<std::vector<FlatConstraint>> out;
  for (auto& info : prods) {
    const Production& p = cfg.prods[info.prod];
    const auto& ldom = cfg.labels[cfg.label[p.lhs]].domain;
    std::vector<FlatConstraint> cs;
    auto add = [&](FlatConstraint c) {
      if (std::find(cs.begin(), cs.end(), c) == cs.end()) cs.push_back(c);
    };
    if (info.top_level)
      for (auto& c : rule.constraints)
        if (c.form == AttrConstraint::LhsLeq && has_key(ldom, c.key))
          add({FlatConstraint::LhsLeq, 0, c.key, "", c.bound});
    for (size_t j = 0; j < info.positions.size(); ++j) {
      const PositionInfo& pi = info.positions[j];
      int i = static_cast<int>(j) + 1;
      int sym = p.rhs[j];
      const auto& sdom = cfg.labels[cfg.label[sym]].domain;
      if (pi.fresh || pi.structural) {
        for (auto& a : ldom)
          if (has_key(sdom, a.key)) add({FlatConstraint::LhsLeqRhsI, i, a.key, a.key, 0});
        continue;
      }
      for (auto& c : rule.constraints) {
        if (c.form == AttrConstraint::LhsLeq || !matches(c.sel, pi)) continue;
        if (c.form == AttrConstraint::RhsGeq && has_key(sdom, c.key))
          add({FlatConstraint::RhsIGeq, i, c.key, "", c.bound});
        if (c.form == AttrConstraint::LhsLeqRhs && has_key(sdom, c.key2) && has_key(ldom, c.key))
          add({FlatConstraint::LhsLeqRhsI, i, c.key, c.key2, 0});
      }
    }
    out.push_back(std::move(cs));
  }
  return out;
}

Cfg flatten(const BnfGrammar& g) {
  Cfg cfg;
  cfg.names.clear();
  Label end;
  end.name = "$";
  end.terminal = true;
  end.flat = 0;
  cfg.labels.push_back(end);
  cfg.add_symbol("$", 0);
  for (auto& t : g.tokens) {
    Label l;
    l.name = t.name;
    l.terminal = true;
    l.flat = cfg.num_symbols();
    cfg.labels.push_back(l);
    cfg.add_symbol(t.name, static_cast<int>(cfg.labels.size()) - 1);
  }
  cfg.num_terminals = cfg.num_symbols();
  for (auto& nt : g.nonterminals()) {
    Label l;
    l.name = nt;
    l.flat = cfg.num_symbols();
    if (auto* d = g.domain(nt)) l.domain = *d;
    cfg.labels.push_back(l);
    cfg.add_symbol(nt, static_cast<int>(cfg.labels.size()) - 1);
  }
  cfg.start = cfg.find(g.start);
  if (cfg.start < 0) throw Error("flatten", "start symbol '" + g.start + "' has no rules");

  std::map<std::string, int> counters;
  for (size_t ri = 0; ri < g.rules.size(); ++ri) {
    const BnfRule& r = g.rules[ri];
    Flattener f{g, cfg, static_cast<int>(ri), r, counters, {}, cfg.find(r.lhs), {}};
    bool wrapper = r.lhs == g.start && r.rhs.kind == BnfExpr::Symbol && r.constraints.empty() &&
                   !r.lhs.empty() && r.lhs.back() == '\'';
    f.flat(f.top_lhs, r.rhs, true, true, wrapper ? Provenance::Wrapper : Provenance::TopLevel);
    auto cs = lower_constraints(g, r, cfg, f.infos);
    for (size_t j = 0; j < f.infos.size(); ++j) cfg.prods[f.infos[j].prod].constraints = cs[j];
  }
  cfg.index();
  for (auto& p : cfg.prods) {
    p.tree = p.id;
    p.arity = static_cast<int>(p.rhs.size());
  }
  auto vals = inhabited_values(cfg);
  for (int s = 0; s < cfg.num_symbols(); ++s)
    cfg.labels[cfg.label[s]].values = cfg.is_terminal(s) ? std::vector<int>{0} : vals[s];
  return cfg;
}

// ---------------------------------------------------------------------------
// Attribute values

namespace {

int key_index(const Label& l, const std::string& k) {
  for (size_t j = 0; j < l.domain.size(); ++j)
    if (l.domain[j].key == k) return static_cast<int>(j);
  return -1;
}

std::vector<int> caps_of(const Cfg& flat, const Production& p) {
  const Label& l = flat.labels[flat.label[p.lhs]];
  std::vector<int> v(l.domain.size());
  for (size_t j = 0; j < v.size(); ++j) v[j] = l.domain[j].type.range - 1;
  for (auto& c : p.constraints)
    if (c.form == FlatConstraint::LhsLeq) {
      int a = key_index(l, c.key);
      if (a >= 0) v[a] = std::min(v[a], c.bound);
    }
  return v;
}

}  // namespace

int node_value(const Cfg& flat, const Production& p, const std::vector<int>& child_values) {
  const Label& l = flat.labels[flat.label[p.lhs]];
  if (l.domain.empty()) return 0;
  std::vector<int> v = caps_of(flat, p);
  for (auto& c : p.constraints) {
    if (c.form != FlatConstraint::LhsLeqRhsI) continue;
    int child = p.rhs[c.i - 1];
    const Label& cl = flat.labels[flat.label[child]];
    int a = key_index(l, c.key), b = key_index(cl, c.key2);
    if (a < 0 || b < 0 || child_values[c.i - 1] < 0) continue;
    v[a] = std::min(v[a], decode_value(cl, child_values[c.i - 1])[b]);
  }
  return encode_value(l, v);
}

std::vector<std::vector<int>> inhabited_values(const Cfg& flat) {
  int n = flat.num_symbols();
  std::vector<std::set<int>> vals(n);
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& p : flat.prods) {
      const Label& l = flat.labels[flat.label[p.lhs]];
      std::set<std::vector<int>> partial{caps_of(flat, p)};
      bool ok = true;
      for (size_t j = 0; j < p.rhs.size() && ok; ++j) {
        int c = p.rhs[j];
        if (flat.is_terminal(c)) continue;
        const Label& cl = flat.labels[flat.label[c]];
        std::vector<std::vector<int>> allowed;
        for (int w : vals[c]) {
          auto wv = decode_value(cl, w);
          bool fits = true;
          for (auto& k : p.constraints)
            if (k.form == FlatConstraint::RhsIGeq && k.i == static_cast<int>(j) + 1) {
              int b = key_index(cl, k.key);
              if (b >= 0 && wv[b] < k.bound) fits = false;
            }
          if (fits) allowed.push_back(wv);
        }
        if (allowed.empty()) {
          ok = false;
          break;
        }
        std::vector<std::pair<int, int>> rel;
        for (auto& k : p.constraints)
          if (k.form == FlatConstraint::LhsLeqRhsI && k.i == static_cast<int>(j) + 1)
            rel.push_back({key_index(l, k.key), key_index(cl, k.key2)});
        if (rel.empty()) continue;
        std::set<std::vector<int>> next;
        for (auto& v : partial)
          for (auto& w : allowed) {
            auto u = v;
            for (auto [a, b] : rel)
              if (a >= 0 && b >= 0) u[a] = std::min(u[a], w[b]);
            next.insert(u);
          }
        partial = std::move(next);
      }
      if (!ok) continue;
      for (auto& v : partial)
        if (vals[p.lhs].insert(encode_value(l, v)).second) changed = true;
    }
  }
  std::vector<std::vector<int>> out(n);
  for (int s = 0; s < n; ++s) out[s].assign(vals[s].begin(), vals[s].end());
  return out;
}

// ---------------------------------------------------------------------------
// Instance expansion

Cfg instantiate_attributes(const Cfg& flat) {
  int nflat = flat.num_symbols();
  // keys that can cap the value of each flat nonterminal
  std::vector<std::vector<char>> used(nflat);
  for (int s = 0; s < nflat; ++s)
    used[s].assign(flat.labels[flat.label[s]].domain.size(), 0);
  for (auto& p : flat.prods) {
    const Label& l = flat.labels[flat.label[p.lhs]];
    for (auto& c : p.constraints)
      if (c.form == FlatConstraint::LhsLeq || c.form == FlatConstraint::LhsLeqRhsI) {
        int a = key_index(l, c.key);
        if (a >= 0) used[p.lhs][a] = 1;
      }
  }

  struct Inst {
    int flat;
    std::vector<int> b;
    int parent;
  };
  std::vector<Inst> insts;
  std::map<std::tuple<int, std::vector<int>, int>, int> ids;
  auto get = [&](int fs, std::vector<int> b, int parent) {
    for (size_t j = 0; j < b.size(); ++j)
      if (!used[fs][j]) b[j] = 0;
    int key_parent = flat.cps_eligible[fs] ? parent : -1;
    if (flat.cps_eligible[fs] && parent >= 0 && insts[parent].flat == fs && insts[parent].b == b)
      return parent;
    auto key = std::make_tuple(fs, b, key_parent);
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(insts.size());
    insts.push_back({fs, b, key_parent});
    ids[key] = id;
    return id;
  };

  struct IProd {
    int lhs;
    std::vector<int> rhs;  // instance ids for nonterminals, -1 - terminal for terminals
    int flat_prod;
  };
  std::vector<IProd> iprods;
  get(flat.start, std::vector<int>(flat.labels[flat.label[flat.start]].domain.size(), 0), -1);
  for (size_t cur = 0; cur < insts.size(); ++cur) {
    Inst in = insts[cur];
    const Label& l = flat.labels[flat.label[in.flat]];
    for (int pid : flat.by_lhs[in.flat]) {
      const Production& p = flat.prods[pid];
      bool ok = true;
      for (auto& c : p.constraints)
        if (c.form == FlatConstraint::LhsLeq) {
          int a = key_index(l, c.key);
          if (a >= 0 && in.b[a] > c.bound) ok = false;
        }
      if (!ok) continue;
      std::vector<std::vector<int>> cb(p.rhs.size());
      for (size_t j = 0; j < p.rhs.size(); ++j)
        cb[j].assign(flat.labels[flat.label[p.rhs[j]]].domain.size(), 0);
      for (auto& c : p.constraints) {
        if (c.form == FlatConstraint::LhsLeq) continue;
        const Label& cl = flat.labels[flat.label[p.rhs[c.i - 1]]];
        if (c.form == FlatConstraint::RhsIGeq) {
          int b = key_index(cl, c.key);
          if (b >= 0) cb[c.i - 1][b] = std::max(cb[c.i - 1][b], c.bound);
        } else {
          int a = key_index(l, c.key), b = key_index(cl, c.key2);
          if (a >= 0 && b >= 0) cb[c.i - 1][b] = std::max(cb[c.i - 1][b], in.b[a]);
        }
      }
      for (size_t j = 0; j < p.rhs.size() && ok; ++j) {
        const Label& cl = flat.labels[flat.label[p.rhs[j]]];
        for (size_t b = 0; b < cb[j].size(); ++b)
          if (cb[j][b] >= cl.domain[b].type.range) ok = false;
      }
      if (!ok) continue;
      IProd ip{static_cast<int>(cur), {}, pid};
      for (size_t j = 0; j < p.rhs.size(); ++j) {
        int s = p.rhs[j];
        ip.rhs.push_back(flat.is_terminal(s) ? -1 - s : get(s, cb[j], static_cast<int>(cur)));
      }
      iprods.push_back(std::move(ip));
    }
  }

  // prune unproductive instances, then unreachable ones
  std::vector<char> productive(insts.size(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& ip : iprods) {
      if (productive[ip.lhs]) continue;
      bool ok = std::all_of(ip.rhs.begin(), ip.rhs.end(),
                            [&](int s) { return s < 0 || productive[s]; });
      if (ok) productive[ip.lhs] = changed = true;
    }
  }
  auto live_prod = [&](const IProd& ip) {
    return productive[ip.lhs] &&
           std::all_of(ip.rhs.begin(), ip.rhs.end(), [&](int s) { return s < 0 || productive[s]; });
  };
  std::vector<int> order, newid(insts.size(), -1);
  std::vector<std::vector<int>> by(insts.size());
  for (size_t j = 0; j < iprods.size(); ++j)
    if (live_prod(iprods[j])) by[iprods[j].lhs].push_back(static_cast<int>(j));
  std::deque<int> q{0};
  newid[0] = 0;
  order.push_back(0);
  while (!q.empty()) {
    int s = q.front();
    q.pop_front();
    for (int j : by[s])
      for (int c : iprods[j].rhs)
        if (c >= 0 && newid[c] < 0) {
          newid[c] = static_cast<int>(order.size());
          order.push_back(c);
          q.push_back(c);
        }
  }

  Cfg out;
  out.labels = flat.labels;
  for (int t = 0; t < flat.num_terminals; ++t) out.add_symbol(flat.names[t], flat.label[t]);
  out.num_terminals = flat.num_terminals;
  std::map<std::string, int> seen;
  for (int s : order) {
    const Inst& in = insts[s];
    const Label& l = flat.labels[flat.label[in.flat]];
    std::string name = flat.names[in.flat];
    bool nz = std::any_of(in.b.begin(), in.b.end(), [](int x) { return x > 0; });
    if (nz) {
      name += "[";
      bool first = true;
      for (size_t j = 0; j < in.b.size(); ++j)
        if (in.b[j] > 0) {
          name += (first ? "" : ",") + l.domain[j].key + ">=" + std::to_string(in.b[j]);
          first = false;
        }
      name += "]";
    }
    int dup = seen[name]++;
    if (dup > 0) name += "#" + std::to_string(dup + 1);
    int id = out.add_symbol(name, flat.label[in.flat]);
    out.bound[id] = in.b;
    out.cps_eligible[id] = flat.cps_eligible[in.flat];
  }
  out.start = flat.num_terminals;
  for (int s : order)
    for (int j : by[s]) {
      const IProd& ip = iprods[j];
      const Production& fp = flat.prods[ip.flat_prod];
      Production p = fp;
      p.lhs = flat.num_terminals + newid[ip.lhs];
      p.rhs.clear();
      for (int c : ip.rhs) p.rhs.push_back(c < 0 ? -1 - c : flat.num_terminals + newid[c]);
      p.tree = fp.id;
      p.arity = static_cast<int>(fp.rhs.size());
      out.prods.push_back(std::move(p));
    }
  out.index();
  return out;
}

}  // namespace xlr
