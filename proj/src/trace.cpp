#include "xlr/trace.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <sstream>
#include <tuple>

namespace xlr {

GenTable gen_table(const Cfg& g) {
  GenTable t(g.num_symbols());
  for (int s = 0; s < g.num_terminals; ++s) t[s] = {1, {s}};
  std::vector<std::vector<int>> uses(g.num_symbols());
  for (auto& p : g.prods)
    for (int s : p.rhs) uses[s].push_back(p.id);
  // Every production starts queued so that empty and all-terminal rules are seen.
  std::deque<int> q;
  std::vector<char> queued(g.prods.size(), 1);
  for (auto& p : g.prods) q.push_back(p.id);
  while (!q.empty()) {
    const Production& p = g.prods[q.front()];
    q.pop_front();
    queued[p.id] = 0;
    long long len = 0;
    bool ok = true;
    for (int s : p.rhs) {
      if (!t[s].present()) {
        ok = false;
        break;
      }
      len += t[s].len;
    }
    if (!ok || len >= t[p.lhs].len) continue;
    std::vector<int> str;
    for (int s : p.rhs) str.insert(str.end(), t[s].str.begin(), t[s].str.end());
    t[p.lhs] = {static_cast<int>(len), std::move(str)};
    for (int u : uses[p.lhs])
      if (!queued[u]) {
        queued[u] = 1;
        q.push_back(u);
      }
  }
  return t;
}

namespace {

bool merge(PrefixTables::Table& dst, KStr key, const std::vector<int>& val) {
  auto it = dst.find(key);
  if (it != dst.end() && it->second.size() <= val.size()) return false;
  dst[key] = val;
  return true;
}

KStr truncate_str(const std::vector<int>& s, int k) {
  KStr out = kstr::empty();
  for (int x : s) {
    if (kstr::len(out) >= k) break;
    out = kstr::push(out, x, k);
  }
  return out;
}

}  // namespace

PrefixTables prefix_tables(const Cfg& g, int k) {
  PrefixTables pt;
  pt.k = k;
  pt.items = ItemIndex(g);
  pt.sym.resize(g.num_symbols());
  pt.tail.resize(pt.items.count);
  std::vector<std::vector<int>> after(g.num_symbols());  // items X -> a s . b
  for (auto& p : g.prods)
    for (size_t d = 0; d < p.rhs.size(); ++d) after[p.rhs[d]].push_back(pt.items.id(p.id, d + 1));

  const int ns = g.num_symbols();
  std::deque<int> q;  // symbols are [0, ns), items are ns + id
  std::vector<char> queued(ns + pt.items.count, 0);
  auto push = [&](int x) {
    if (!queued[x]) {
      queued[x] = 1;
      q.push_back(x);
    }
  };
  for (int s = 0; s < g.num_terminals; ++s) {
    pt.sym[s][truncate_str({s}, k)] = {s};
    push(s);
  }
  for (auto& p : g.prods) {
    int it = pt.items.id(p.id, static_cast<int>(p.rhs.size()));
    pt.tail[it][kstr::empty()] = {};
    push(ns + it);
  }
  while (!q.empty()) {
    int x = q.front();
    q.pop_front();
    queued[x] = 0;
    if (x < ns) {
      for (int it : after[x]) push(ns + it);
      continue;
    }
    int it = x - ns;
    int p = pt.items.prod_of[it];
    int d = pt.items.dot(it);
    const Production& prod = g.prods[p];
    if (d == 0) {
      bool changed = false;
      for (auto& [key, val] : pt.tail[it]) changed |= merge(pt.sym[prod.lhs], key, val);
      if (changed) push(prod.lhs);
      continue;
    }
    int z = prod.rhs[d - 1];
    int prev = pt.items.id(p, d - 1);
    bool changed = false;
    for (auto& [k1, v1] : pt.sym[z])
      for (auto& [k2, v2] : pt.tail[it]) {
        std::vector<int> v = v1;
        v.insert(v.end(), v2.begin(), v2.end());
        changed |= merge(pt.tail[prev], kstr::concat(k1, k2, k), v);
      }
    if (changed) push(ns + prev);
  }
  return pt;
}

std::optional<std::vector<int>> prefix_match(const PrefixTables& pt, KStr lambda,
                                             const std::vector<int>& zeta) {
  const int k = kstr::len(lambda);
  const int s = static_cast<int>(zeta.size());
  std::vector<int> lam = kstr::vec(lambda);
  auto id = [&](int i, int j) { return j * (k + 1) + i; };
  const int n = (k + 1) * (s + 1);
  std::vector<long long> dist(n, -1);
  std::vector<int> from(n, -1);
  std::vector<const std::vector<int>*> piece(n, nullptr);
  using Q = std::tuple<long long, int, int>;  // (dist, j, i)
  std::priority_queue<Q, std::vector<Q>, std::greater<Q>> pq;
  dist[id(0, 0)] = 0;
  pq.push({0, 0, 0});
  std::vector<char> done(n, 0);
  while (!pq.empty()) {
    auto [dd, j, i] = pq.top();
    pq.pop();
    int u = id(i, j);
    if (done[u]) continue;
    done[u] = 1;
    if (j == s) continue;
    for (auto& [alpha, beta] : pt.sym[zeta[j]]) {
      int la = kstr::len(alpha);
      auto relax = [&](int i2) {
        int w = id(i2, j + 1);
        long long nd = dd + static_cast<long long>(beta.size());
        if (dist[w] < 0 || nd < dist[w]) {
          dist[w] = nd;
          from[w] = u;
          piece[w] = &beta;
          pq.push({nd, j + 1, i2});
        }
      };
      bool prefix_ok = true;
      int m = std::min(la, k - i);
      for (int t = 0; t < m && prefix_ok; ++t) prefix_ok = kstr::at(alpha, t) == lam[i + t];
      if (!prefix_ok) continue;
      // alpha == beta lies wholly inside the remaining lookahead
      if (static_cast<int>(beta.size()) == la && la <= k - i) relax(i + la);
      // or alpha covers the rest of the lookahead
      else if (la >= k - i) relax(k);
    }
  }
  int target = id(k, s);
  if (dist[target] < 0) return std::nullopt;
  std::vector<const std::vector<int>*> parts;
  for (int w = target; from[w] >= 0; w = from[w]) parts.push_back(piece[w]);
  std::vector<int> out;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) out.insert(out.end(), (*it)->begin(), (*it)->end());
  return out;
}

namespace {

std::vector<int> strip(const std::vector<int>& s) {
  std::vector<int> out = s;
  while (!out.empty() && out.back() == 0) out.pop_back();
  return out;
}

std::string terminals_str(const Cfg& g, const std::vector<int>& s) {
  if (s.empty()) return "ε";
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) out += (i ? " " : "") + g.names[s[i]];
  return out;
}

bool has_action(const Nfa& nfa, int v, KStr la, const Action& a) {
  auto it = nfa.actions[v].find(la);
  return it != nfa.actions[v].end() &&
         std::find(it->second.begin(), it->second.end(), a) != it->second.end();
}

// Componentwise bound comparison between two instance symbols of the same label.
bool dominates(const Cfg& g, int s, int t) {
  const auto& bs = g.bound[s];
  const auto& bt = g.bound[t];
  if (bs.size() != bt.size()) return false;
  for (size_t j = 0; j < bs.size(); ++j)
    if (bs[j] < bt[j]) return false;
  return true;
}

}  // namespace

std::vector<int> ConflictTrace::display_a() const { return strip(input_a); }
std::vector<int> ConflictTrace::display_b() const { return strip(input_b); }

std::string ConflictTrace::str(const Cfg& g, const Nfa& nfa) const {
  std::ostringstream os;
  os << "conflict in state " << state << " on " << kstr::str(g, lookahead) << "\n";
  os << "  action a: " << a.str(g) << "\n";
  os << "  action b: " << b.str(g) << "\n";
  auto path = [&](const std::vector<int>& p) {
    std::string out;
    for (size_t i = 0; i < p.size(); ++i) out += (i ? "\n      " : "") + nfa.vertex_str(g, p[i]);
    return out;
  };
  os << "  path a: " << path(path_a) << "\n";
  os << "  path b: " << path(path_b) << "\n";
  os << "  prefix:  " << terminals_str(g, prefix) << "\n";
  if (complete) {
    os << "  input a: " << terminals_str(g, display_a()) << "\n";
    os << "  input b: " << terminals_str(g, display_b()) << "\n";
  } else {
    os << "  CompletionNotFound: " << note << "\n";
  }
  return os.str();
}

ConflictTrace trace_conflict(const Cfg& g, const Nfa& nfa, const Dfa& dfa, const Conflict& c,
                             const Action& a, const Action& b, const GenTable& gen,
                             const PrefixTables& pt) {
  if (nfa.rd) throw Error("trace", "conflict tracing needs an LR automaton");
  ConflictTrace tr;
  tr.state = c.state;
  tr.lookahead = c.lookahead;
  tr.a = a;
  tr.b = b;

  // Weight of a DFA edge: shortest string of a symbol that can label it.
  std::map<EdgeKey, std::pair<long long, int>> key_sym;  // key -> (weight, symbol)
  for (int s = 0; s < g.num_symbols(); ++s) {
    if (!gen[s].present()) continue;
    for (EdgeKey e : edge_keys(g, NfaEdge{false, s, 0})) {
      auto it = key_sym.find(e);
      if (it == key_sym.end() || gen[s].len < it->second.first) key_sym[e] = {gen[s].len, s};
    }
  }

  // 1. Shortest weighted DFA path to the conflict state.
  const int nd = dfa.size();
  std::vector<long long> dist(nd, -1);
  std::vector<std::pair<int, EdgeKey>> pred(nd, {-1, 0});
  using Q = std::pair<long long, int>;
  std::priority_queue<Q, std::vector<Q>, std::greater<Q>> pq;
  dist[0] = 0;
  pq.push({0, 0});
  std::vector<char> done(nd, 0);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (done[u]) continue;
    done[u] = 1;
    for (auto& [key, to] : dfa.states[u].edges) {
      auto it = key_sym.find(key);
      if (edge::is_recur(key) || it == key_sym.end()) continue;
      long long w = d + it->second.first;
      if (dist[to] < 0 || w < dist[to]) {
        dist[to] = w;
        pred[to] = {u, key};
        pq.push({w, to});
      }
    }
  }
  if (dist[c.state] < 0) {
    tr.note = "conflict state not reachable by productive symbols";
    return tr;
  }
  for (int u = c.state; u != 0; u = pred[u].first) tr.dfa_path.push_back(pred[u].second);
  std::reverse(tr.dfa_path.begin(), tr.dfa_path.end());
  const int r = static_cast<int>(tr.dfa_path.size());

  // 2. Shortest paths in the NFA x {0..r} product.
  const int nv = nfa.size();
  auto pid = [&](int v, int i) { return v * (r + 1) + i; };
  std::vector<long long> pd(static_cast<size_t>(nv) * (r + 1), -1);
  std::vector<int> ppred(pd.size(), -1);
  std::vector<int> psym(pd.size(), -1);  // symbol of the step edge taken into the node, -1 for eps
  std::vector<char> pdone(pd.size(), 0);
  std::vector<long long> tail_len(nv, -1);
  for (int v = 0; v < nv; ++v) {
    const NfaVertex& x = nfa.vertices[v];
    if (x.is_hash()) continue;
    long long sum = 0;
    bool ok = true;
    for (size_t j = x.dot; j < g.prods[x.prod].rhs.size() && ok; ++j) {
      int s = g.prods[x.prod].rhs[j];
      if (!gen[s].present()) ok = false;
      else sum += gen[s].len;
    }
    if (ok) tail_len[v] = sum;
  }
  std::vector<std::vector<std::vector<EdgeKey>>> keys(nv);
  for (int v = 0; v < nv; ++v)
    for (auto& e : nfa.steps[v]) {
      auto k = edge_keys(g, e);
      std::sort(k.begin(), k.end());
      keys[v].push_back(std::move(k));
    }
  using PQ = std::tuple<long long, int, int>;  // (dist, vertex, index)
  std::priority_queue<PQ, std::vector<PQ>, std::greater<PQ>> q2;
  pd[pid(nfa.start, 0)] = 0;
  q2.push({0, nfa.start, 0});
  while (!q2.empty()) {
    auto [d, v, i] = q2.top();
    q2.pop();
    int u = pid(v, i);
    if (pdone[u]) continue;
    pdone[u] = 1;
    auto relax = [&](int w, int j, long long nd2, int sym) {
      int x = pid(w, j);
      if (pd[x] < 0 || nd2 < pd[x]) {
        pd[x] = nd2;
        ppred[x] = u;
        psym[x] = sym;
        q2.push({nd2, w, j});
      }
    };
    for (int w : nfa.eps[v])
      if (tail_len[w] >= 0) relax(w, i, d + tail_len[w], -1);
    if (i < r)
      for (size_t e = 0; e < nfa.steps[v].size(); ++e)
        if (std::binary_search(keys[v][e].begin(), keys[v][e].end(), tr.dfa_path[i]))
          relax(nfa.steps[v][e].target, i + 1, d, nfa.steps[v][e].sym);
  }
  auto best_target = [&](const Action& act) {
    int best = -1;
    for (int v : dfa.states[c.state].nfa) {
      if (!has_action(nfa, v, c.lookahead, act) || pd[pid(v, r)] < 0) continue;
      if (best < 0 || pd[pid(v, r)] < pd[pid(best, r)]) best = v;
    }
    return best;
  };
  int ta = best_target(a), tb = best_target(b);
  if (ta < 0 || tb < 0) {
    tr.note = "no NFA path reaches the conflicting items";
    return tr;
  }
  // Vertices and the symbols used for each DFA edge, along one path.
  auto unwind = [&](int t, std::vector<int>& verts, std::vector<int>& syms) {
    std::vector<int> nodes;
    for (int x = pid(t, r); x >= 0; x = ppred[x]) nodes.push_back(x);
    std::reverse(nodes.begin(), nodes.end());
    std::vector<char> is_eps;
    for (size_t j = 0; j < nodes.size(); ++j) {
      verts.push_back(nodes[j] / (r + 1));
      if (j > 0) {
        is_eps.push_back(psym[nodes[j]] < 0);
        if (psym[nodes[j]] >= 0) syms.push_back(psym[nodes[j]]);
      }
    }
    return is_eps;
  };
  std::vector<int> syms_a, syms_b;
  auto eps_a = unwind(ta, tr.path_a, syms_a);
  auto eps_b = unwind(tb, tr.path_b, syms_b);

  // 3-4. Tail strings beta_s ... beta_0, then a completion that starts with the lookahead.
  auto tail_of = [&](const std::vector<int>& verts, const std::vector<char>& eps) {
    std::vector<int> out;
    for (int j = static_cast<int>(verts.size()) - 1; j >= 0; --j) {
      const NfaVertex& x = nfa.vertices[verts[j]];
      const auto& rhs = g.prods[x.prod].rhs;
      int from;
      if (j == static_cast<int>(verts.size()) - 1) from = x.dot;
      else if (eps[j]) from = x.dot + 1;
      else continue;
      out.insert(out.end(), rhs.begin() + std::min<size_t>(from, rhs.size()), rhs.end());
    }
    for (int j = 0; j < nfa.k; ++j) out.push_back(0);
    return out;
  };
  for (int i = 0; i < r; ++i) {
    int sa = syms_a[i], sb = syms_b[i];
    int s = dominates(g, sb, sa) && !dominates(g, sa, sb) ? sb : sa;
    tr.prefix.insert(tr.prefix.end(), gen[s].str.begin(), gen[s].str.end());
  }
  auto ca = prefix_match(pt, c.lookahead, tail_of(tr.path_a, eps_a));
  auto cb = prefix_match(pt, c.lookahead, tail_of(tr.path_b, eps_b));
  if (!ca || !cb) {
    tr.note = std::string("no completion of ") + (!ca ? "path a" : "path b") +
              " starts with the conflicting lookahead";
    return tr;
  }
  tr.input_a = tr.prefix;
  tr.input_a.insert(tr.input_a.end(), ca->begin(), ca->end());
  tr.input_b = tr.prefix;
  tr.input_b.insert(tr.input_b.end(), cb->begin(), cb->end());
  tr.complete = true;
  return tr;
}

std::vector<ConflictTrace> trace_conflicts(const Cfg& g, const Nfa& nfa, const Dfa& dfa,
                                           const std::vector<Conflict>& conflicts) {
  std::vector<ConflictTrace> out;
  if (conflicts.empty()) return out;
  GenTable gen = gen_table(g);
  PrefixTables pt = prefix_tables(g, nfa.k);
  for (auto& c : conflicts)
    out.push_back(trace_conflict(g, nfa, dfa, c, c.actions[0], c.actions[1], gen, pt));
  return out;
}

}  // namespace xlr
