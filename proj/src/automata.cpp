#include "xlr/automata.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>

namespace xlr {

Action Action::reduce(const Production& p, int goto_label) {
  return {Reduce, p.tree, p.arity, static_cast<int>(p.rhs.size()), goto_label};
}

std::string Action::str(const Cfg& g) const {
  switch (kind) {
    case Shift: return "shift";
    case Reduce: {
      std::string s = "reduce " + std::to_string(tree) + " -> " + g.labels[label].name;
      if (arity != m) s += " (r=" + std::to_string(arity) + ", m=" + std::to_string(m) + ")";
      return s;
    }
    case Recur: return "recur " + g.names[label];
    case Return: return "return " + g.labels[label].name;
  }
  return "";
}

std::string Nfa::vertex_str(const Cfg& g, int v) const {
  const NfaVertex& x = vertices[v];
  std::string s = "(";
  if (x.is_hash())
    s += "#" + g.names[x.hash] + " ->" + (x.dot == 0 ? " . " : " ") + g.names[x.hash] +
         (x.dot == 1 ? " ." : "");
  else
    s += g.item_str(x.prod, x.dot);
  s += ", " + set_str(g, x.follows);
  if (rd) s += ", " + (x.rtag < 0 ? std::string("⊥") : g.names[x.rtag]);
  return s + ")";
}

namespace {

void add_action(ActionMap& m, KStr la, const Action& a) {
  auto& v = m[la];
  auto it = std::lower_bound(v.begin(), v.end(), a);
  if (it == v.end() || !(*it == a)) v.insert(it, a);
}

struct Builder {
  const Cfg& g;
  const FirstK& first;
  const FollowPartition& L;
  Nfa nfa;
  std::map<std::tuple<int, int, int, int, int>, int> ids;  // (prod, dot, hash, rtag, block)
  std::deque<int> work;
  std::map<int, KSet> hash_universe;
  // Symbols whose immediately left-recursive occurrence also needs a Recur (reached under
  // another tag); only then do its follow strings belong to the #Y universe.
  std::set<int> lr_recur;
  std::set<int> lr_missing;

  int vertex(int prod, int dot, int hash, int rtag, int block, const KSet& follows) {
    auto key = std::make_tuple(prod, dot, hash, rtag, block);
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    int id = nfa.size();
    NfaVertex v;
    v.prod = prod;
    v.dot = dot;
    v.hash = hash;
    v.rtag = rtag;
    v.block = block;
    v.follows = follows;
    nfa.vertices.push_back(std::move(v));
    nfa.eps.emplace_back();
    nfa.steps.emplace_back();
    nfa.actions.emplace_back();
    ids[key] = id;
    work.push_back(id);
    return id;
  }

  int item_vertex(int prod, int dot, int rtag, int block) {
    int it = L.items.id(prod, dot);
    return vertex(prod, dot, -1, rtag, block, L.blocks[it][block]);
  }

  const KSet& hash_follows(int y) {
    auto it = hash_universe.find(y);
    if (it != hash_universe.end()) return it->second;
    KSet u;
    if (y == g.start) u = {kstr::ends(L.k)};
    for (auto& p : g.prods)
      for (size_t d = 0; d < p.rhs.size(); ++d)
        if (p.rhs[d] == y && !(d < p.unfold.size() && p.unfold[d]) &&
            !(d == 0 && p.lhs == y && !lr_recur.count(y)))
          u = set_union(u, first.compat_set(p.id, static_cast<int>(d) + 1,
                                            L.universe[L.items.id(p.id, 0)]));
    return hash_universe.emplace(y, std::move(u)).first->second;
  }

  // epsilon edges into every block of Y's initial items compatible with `look`
  void predict(int v, int y, const KSet& look, int rtag) {
    for (int q : g.by_lhs[y]) {
      int it = L.items.id(q, 0);
      for (size_t b = 0; b < L.blocks[it].size(); ++b)
        if (intersects(L.blocks[it][b], look)) {
          int w = item_vertex(q, 0, rtag, static_cast<int>(b));
          nfa.eps[v].push_back(w);
        }
    }
  }

  void step(int v, int prod, int dot, const KSet& follows, int sym) {
    int it = L.items.id(prod, dot + 1);
    for (size_t b = 0; b < L.blocks[it].size(); ++b)
      if (intersects(L.blocks[it][b], follows)) {
        int w = item_vertex(prod, dot + 1, -1, static_cast<int>(b));
        nfa.steps[v].push_back({false, sym, w});
      }
  }

  void expand(int v) {
    NfaVertex x = nfa.vertices[v];
    if (x.is_hash()) {
      if (x.dot == 0) {
        predict(v, x.hash, x.follows, x.hash);
        int t = vertex(-1, 1, x.hash, -1, 0, x.follows);
        nfa.steps[v].push_back({false, x.hash, t});
      } else {
        for (KStr la : x.follows) add_action(nfa.actions[v], la, Action::ret(g.label[x.hash]));
      }
      return;
    }
    const Production& p = g.prods[x.prod];
    if (x.dot == static_cast<int>(p.rhs.size())) {
      Action a = Action::reduce(p, g.label[p.lhs]);
      for (KStr la : x.follows) add_action(nfa.actions[v], la, a);
      return;
    }
    int s = p.rhs[x.dot];
    if (g.is_terminal(s)) {
      for (KStr la : first.compat_set(x.prod, x.dot, x.follows))
        add_action(nfa.actions[v], la, Action::shift());
    } else {
      bool unfold = !nfa.rd || (x.dot < static_cast<int>(p.unfold.size()) && p.unfold[x.dot]) ||
                    (s == x.rtag && x.dot == 0);
      if (unfold) {
        predict(v, s, first.compat_set(x.prod, x.dot + 1, x.follows), x.rtag);
      } else {
        if (x.dot == 0 && p.lhs == s && !lr_recur.count(s)) lr_missing.insert(s);
        for (KStr la : first.compat_set(x.prod, x.dot, x.follows))
          add_action(nfa.actions[v], la, Action::recur(s));
        int t = vertex(-1, 0, s, s, 0, hash_follows(s));
        nfa.steps[v].push_back({true, s, t});
      }
    }
    step(v, x.prod, x.dot, x.follows, s);
  }

  void run() {
    while (!work.empty()) {
      int v = work.front();
      work.pop_front();
      expand(v);
    }
  }
};

int start_prod(const Cfg& g) {
  if (g.by_lhs[g.start].size() != 1)
    throw Error("automata", "start symbol must have exactly one production");
  return g.by_lhs[g.start][0];
}

}  // namespace

Nfa build_lr_nfa(const Cfg& g, const FirstK& first, const FollowPartition& L) {
  Builder b{g, first, L, {}, {}, {}, {}, {}, {}};
  b.nfa.k = L.k;
  int p = start_prod(g);
  int blk = L.block_of(L.items.id(p, 0), kstr::ends(L.k));
  if (blk < 0) throw Error("automata", "start item has no sentinel block");
  b.nfa.start = b.item_vertex(p, 0, -1, blk);
  b.run();
  return std::move(b.nfa);
}

Nfa build_rd_nfa(const Cfg& g, const FirstK& first, const FollowPartition& L) {
  start_prod(g);
  std::set<int> lr_recur;
  for (;;) {
    Builder b{g, first, L, {}, {}, {}, {}, lr_recur, {}};
    b.nfa.k = L.k;
    b.nfa.rd = true;
    b.nfa.start = b.vertex(-1, 0, g.start, g.start, 0, b.hash_follows(g.start));
    b.run();
    if (b.lr_missing.empty()) return std::move(b.nfa);
    lr_recur.insert(b.lr_missing.begin(), b.lr_missing.end());
  }
}

namespace edge {
std::string str(const Cfg& g, EdgeKey e) {
  if (is_recur(e)) return "RecurStep(" + g.names[label(e)] + ")";
  const Label& l = g.labels[label(e)];
  if (l.domain.empty()) return l.name;
  auto v = decode_value(l, value(e));
  std::string s = l.name + "[";
  for (size_t j = 0; j < v.size(); ++j)
    s += (j ? "," : "") + l.domain[j].key + "=" + std::to_string(v[j]);
  return s + "]";
}
}  // namespace edge

int DfaState::next(EdgeKey e) const {
  auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(e, -1));
  return it != edges.end() && it->first == e ? it->second : -1;
}

std::vector<EdgeKey> edge_keys(const Cfg& g, const NfaEdge& e) {
  if (e.recur) return {edge::recur(e.sym)};
  int lbl = g.label[e.sym];
  if (g.is_terminal(e.sym)) return {edge::sym(lbl, 0)};
  const Label& l = g.labels[lbl];
  std::vector<EdgeKey> out;
  for (int v : l.values) {
    auto vals = decode_value(l, v);
    bool ok = true;
    for (size_t j = 0; j < vals.size() && j < g.bound[e.sym].size(); ++j)
      if (vals[j] < g.bound[e.sym][j]) ok = false;
    if (ok) out.push_back(edge::sym(lbl, v));
  }
  return out;
}

Dfa subset_construct(const Cfg& g, const Nfa& nfa) {
  Dfa dfa;
  dfa.k = nfa.k;
  dfa.rd = nfa.rd;
  std::vector<std::vector<int>> closure_memo(nfa.size());
  std::vector<char> has_memo(nfa.size(), 0);
  auto closure_of = [&](int v) -> const std::vector<int>& {
    if (has_memo[v]) return closure_memo[v];
    std::vector<char> seen(nfa.size(), 0);
    std::vector<int> stack{v}, out;
    seen[v] = 1;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      out.push_back(x);
      for (int y : nfa.eps[x])
        if (!seen[y]) {
          seen[y] = 1;
          stack.push_back(y);
        }
    }
    std::sort(out.begin(), out.end());
    has_memo[v] = 1;
    closure_memo[v] = std::move(out);
    return closure_memo[v];
  };
  auto closure = [&](const std::vector<int>& seeds) {
    std::vector<int> out;
    for (int s : seeds) {
      const auto& c = closure_of(s);
      out.insert(out.end(), c.begin(), c.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };

  std::map<std::vector<int>, int> ids;
  auto state = [&](std::vector<int> set) {
    auto it = ids.find(set);
    if (it != ids.end()) return it->second;
    int id = dfa.size();
    ids[set] = id;
    DfaState st;
    st.nfa = std::move(set);
    dfa.states.push_back(std::move(st));
    return id;
  };
  state(closure({nfa.start}));
  for (int cur = 0; cur < dfa.size(); ++cur) {
    std::map<EdgeKey, std::vector<int>> moves;
    ActionMap acts;
    for (int v : dfa.states[cur].nfa) {
      for (auto& [la, as] : nfa.actions[v])
        for (auto& a : as) add_action(acts, la, a);
      for (auto& e : nfa.steps[v])
        for (EdgeKey k : edge_keys(g, e)) moves[k].push_back(e.target);
    }
    std::vector<std::pair<EdgeKey, int>> edges;
    for (auto& [k, seeds] : moves) {
      auto set = closure(seeds);
      if (set.empty()) continue;
      edges.push_back({k, state(std::move(set))});
    }
    dfa.states[cur].edges = std::move(edges);
    dfa.states[cur].actions = std::move(acts);
  }
  return dfa;
}

std::vector<Conflict> detect_conflicts(const Dfa& dfa) {
  std::vector<Conflict> out;
  for (int s = 0; s < dfa.size(); ++s)
    for (auto& [la, as] : dfa.states[s].actions)
      if (as.size() >= 2) out.push_back({s, la, as});
  return out;
}

std::optional<std::vector<int>> find_recur_cycle(const Dfa& dfa) {
  int n = dfa.size();
  std::vector<int> color(n, 0);
  std::vector<std::pair<int, int>> path;  // (state, symbol of the edge taken)
  std::optional<std::vector<int>> found;
  std::function<void(int)> dfs = [&](int s) {
    color[s] = 1;
    for (auto& [k, t] : dfa.states[s].edges) {
      if (found) return;
      if (!edge::is_recur(k)) continue;
      path.push_back({s, edge::label(k)});
      if (color[t] == 1) {
        std::vector<int> cyc;
        size_t j = 0;
        while (path[j].first != t) ++j;
        for (; j < path.size(); ++j) cyc.push_back(path[j].second);
        found = cyc;
        return;
      }
      if (color[t] == 0) dfs(t);
      path.pop_back();
    }
    color[s] = 2;
  };
  for (int s = 0; s < n && !found; ++s)
    if (color[s] == 0) dfs(s);
  return found;
}

void check_recur_cycles(const Cfg& g, const Dfa& dfa) {
  auto cyc = find_recur_cycle(dfa);
  if (!cyc) return;
  std::string names;
  for (size_t j = 0; j < cyc->size(); ++j) names += (j ? ", " : "") + g.names[(*cyc)[j]];
  throw Error("automata", "InfiniteRecursion: RecurStep cycle through " + names);
}

std::string dump(const Cfg& g, const Nfa& nfa, const Dfa& dfa) {
  std::ostringstream os;
  for (int s = 0; s < dfa.size(); ++s) {
    const DfaState& st = dfa.states[s];
    os << "state " << s << ":";
    for (int v : st.nfa) os << " " << nfa.vertex_str(g, v);
    os << ";";
    for (auto& [k, t] : st.edges) os << " " << edge::str(g, k) << "->" << t;
    os << ";";
    for (auto& [la, as] : st.actions) {
      os << " [" << kstr::str(g, la) << ":";
      for (size_t j = 0; j < as.size(); ++j) os << (j ? " | " : " ") << as[j].str(g);
      os << "]";
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace xlr
