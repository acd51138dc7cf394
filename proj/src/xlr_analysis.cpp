#include "xlr/xlr_analysis.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include "xlr/first.hpp"
#include "xlr/follow.hpp"

namespace xlr {

namespace {

std::vector<std::vector<int>> successors(const Nfa& nfa) {
  std::vector<std::vector<int>> out(nfa.size());
  for (int v = 0; v < nfa.size(); ++v) {
    out[v] = nfa.eps[v];
    for (auto& e : nfa.steps[v]) out[v].push_back(e.target);
  }
  return out;
}

// Cooper-Harvey-Kennedy iterative dominators; idom[start] == start, -1 if unreachable.
std::vector<int> dominators(const std::vector<std::vector<int>>& succ, int start) {
  const int n = static_cast<int>(succ.size());
  std::vector<int> order, rpo_index(n, -1);
  std::vector<char> seen(n, 0);
  std::vector<std::pair<int, size_t>> stack{{start, 0}};
  seen[start] = 1;
  while (!stack.empty()) {
    auto& [v, i] = stack.back();
    if (i < succ[v].size()) {
      int w = succ[v][i++];
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back({w, 0});
      }
    } else {
      order.push_back(v);
      stack.pop_back();
    }
  }
  std::reverse(order.begin(), order.end());
  for (size_t i = 0; i < order.size(); ++i) rpo_index[order[i]] = static_cast<int>(i);
  std::vector<std::vector<int>> pred(n);
  for (int v = 0; v < n; ++v)
    if (seen[v])
      for (int w : succ[v]) pred[w].push_back(v);
  std::vector<int> idom(n, -1);
  idom[start] = start;
  auto intersect = [&](int a, int b) {
    while (a != b) {
      while (rpo_index[a] > rpo_index[b]) a = idom[a];
      while (rpo_index[b] > rpo_index[a]) b = idom[b];
    }
    return a;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 1; i < order.size(); ++i) {
      int v = order[i];
      int nd = -1;
      for (int p : pred[v]) {
        if (idom[p] < 0) continue;
        nd = nd < 0 ? p : intersect(p, nd);
      }
      if (nd != idom[v]) {
        idom[v] = nd;
        changed = true;
      }
    }
  }
  return idom;
}

// Vertices reachable from `from` without entering `avoid`.
std::vector<char> reach_avoiding(const std::vector<std::vector<int>>& succ, int from, int avoid) {
  std::vector<char> seen(succ.size(), 0);
  if (from == avoid) return seen;
  std::vector<int> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : succ[v])
      if (w != avoid && !seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
  }
  return seen;
}

// Strongly connected components (iterative Tarjan); components come out sinks first.
std::vector<int> scc(const std::vector<std::vector<int>>& succ, int* count) {
  const int n = static_cast<int>(succ.size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1), st;
  std::vector<char> on(n, 0);
  int next = 0, c = 0;
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    std::vector<std::pair<int, size_t>> call{{root, 0}};
    index[root] = low[root] = next++;
    st.push_back(root);
    on[root] = 1;
    while (!call.empty()) {
      auto& [v, i] = call.back();
      if (i < succ[v].size()) {
        int w = succ[v][i++];
        if (index[w] < 0) {
          index[w] = low[w] = next++;
          st.push_back(w);
          on[w] = 1;
          call.push_back({w, 0});
        } else if (on[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        int w;
        do {
          w = st.back();
          st.pop_back();
          on[w] = 0;
          comp[w] = c;
        } while (w != v);
        ++c;
      }
      int done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
    }
  }
  *count = c;
  return comp;
}

bool has_action(const Nfa& nfa, int v, KStr la, const Action& a) {
  auto it = nfa.actions[v].find(la);
  return it != nfa.actions[v].end() &&
         std::find(it->second.begin(), it->second.end(), a) != it->second.end();
}

std::string syms_str(const Cfg& g, const std::vector<int>& s) {
  if (s.empty()) return "ε";
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) out += (i ? " " : "") + g.names[s[i]];
  return out;
}

}  // namespace

std::vector<std::vector<int>> conflict_sites(const Nfa& nfa, const Dfa& dfa, const Conflict& c) {
  std::vector<std::vector<int>> out(c.actions.size());
  for (size_t i = 0; i < c.actions.size(); ++i)
    for (int v : dfa.states[c.state].nfa)
      if (has_action(nfa, v, c.lookahead, c.actions[i])) out[i].push_back(v);
  return out;
}

std::vector<ForkPoint> find_fork_points(const Nfa& nfa, const Dfa& dfa, const Conflict& c) {
  auto sites = conflict_sites(nfa, dfa, c);
  const int d = static_cast<int>(sites.size());
  auto succ = successors(nfa);
  auto idom = dominators(succ, nfa.start);
  std::vector<int> cls(nfa.size(), -1);
  std::vector<int> all;
  for (int i = 0; i < d; ++i)
    for (int w : sites[i]) {
      cls[w] = i;
      all.push_back(w);
    }
  // Common dominators of every conflicting vertex.
  std::set<int> common;
  bool first = true;
  for (int w : all) {
    std::set<int> chain;
    for (int x = w;; x = idom[x]) {
      if (x < 0) break;
      chain.insert(x);
      if (x == nfa.start) break;
    }
    if (first) common = chain;
    else {
      std::set<int> keep;
      std::set_intersection(common.begin(), common.end(), chain.begin(), chain.end(),
                            std::inserter(keep, keep.end()));
      common = std::move(keep);
    }
    first = false;
  }
  std::vector<ForkPoint> out;
  for (int v : common) {
    if (cls[v] >= 0) continue;
    ForkPoint f;
    f.vertex = v;
    f.degree = d;
    f.classes.assign(d, {});
    bool ok = true;
    for (auto& e : nfa.steps[v]) {
      auto r = reach_avoiding(succ, e.target, v);
      for (int w : all)
        if (r[w]) ok = false;
    }
    for (int x : nfa.eps[v]) {
      if (!ok) break;
      auto r = reach_avoiding(succ, x, v);
      int which = -1;
      for (int w : all)
        if (r[w]) {
          if (which >= 0 && which != cls[w]) ok = false;
          which = cls[w];
        }
      if (which >= 0 && std::find(f.classes[which].begin(), f.classes[which].end(), x) == f.classes[which].end())
        f.classes[which].push_back(x);
    }
    for (auto& s : f.classes)
      if (s.empty()) ok = false;
    if (!ok) continue;
    for (int w : succ[v])
      if (w == v || reach_avoiding(succ, w, -1)[v]) f.on_cycle = true;
    out.push_back(std::move(f));
  }
  return out;
}

const char* join_result_name(JoinCheck::Result r) {
  switch (r) {
    case JoinCheck::Safe: return "safe";
    case JoinCheck::Unsafe: return "unsafe";
    case JoinCheck::Unknown: return "unknown";
  }
  return "unknown";
}

namespace {

using StrSet = std::set<std::vector<int>>;
constexpr size_t kSetCap = 20000;

bool concat_into(StrSet& out, const StrSet& a, const StrSet& b, size_t j) {
  for (auto& x : a) {
    if (x.size() >= j) {
      out.insert(x);
      continue;
    }
    for (auto& y : b) {
      std::vector<int> z = x;
      for (size_t i = 0; i < y.size() && z.size() < j; ++i) z.push_back(y[i]);
      out.insert(std::move(z));
      if (out.size() > kSetCap) return false;
    }
  }
  return out.size() <= kSetCap;
}

// First_j of every symbol; false when a set grows past the cap.
bool first_j(const Cfg& g, size_t j, std::vector<StrSet>& f) {
  f.assign(g.num_symbols(), {});
  for (int s = 0; s < g.num_terminals; ++s) f[s] = {{s}};
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& p : g.prods) {
      StrSet acc{{}};
      for (int s : p.rhs) {
        StrSet next;
        if (!concat_into(next, acc, f[s], j)) return false;
        acc = std::move(next);
        if (acc.empty()) break;
      }
      for (auto& x : acc)
        if (f[p.lhs].insert(x).second) changed = true;
      if (f[p.lhs].size() > kSetCap) return false;
    }
  }
  return true;
}

bool of_string(const std::vector<StrSet>& f, const std::vector<int>& s, size_t j, StrSet& out) {
  out = {{}};
  for (int x : s) {
    StrSet next;
    if (!concat_into(next, out, f[x], j)) return false;
    out = std::move(next);
  }
  return true;
}

bool is_prefix(const std::vector<int>& a, const std::vector<int>& b) {
  return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

}  // namespace

JoinCheck prefix_free(const Cfg& g, const std::vector<int>& a, const std::vector<int>& b,
                      int depth_bound) {
  JoinCheck out;
  out.tail_a = a;
  out.tail_b = b;
  std::vector<StrSet> f;
  for (int j = 1; j <= depth_bound; ++j) {
    StrSet A, B;
    if (!first_j(g, j, f) || !of_string(f, a, j, A) || !of_string(f, b, j, B)) {
      out.detail = "First_" + std::to_string(j) + " sets too large";
      return out;
    }
    // A complete string of one tail that prefixes a string of the other.
    auto find = [&](const StrSet& X, const StrSet& Y, bool swapped) {
      for (auto& x : X) {
        if (x.size() >= static_cast<size_t>(j)) continue;
        for (auto& y : Y)
          if (is_prefix(x, y)) {
            out.result = JoinCheck::Unsafe;
            out.z = x;
            out.z2.assign(y.begin() + x.size(), y.end());
            out.witness_complete = y.size() < static_cast<size_t>(j);
            if (swapped) std::swap(out.tail_a, out.tail_b);
            out.detail = "prefix witness at depth " + std::to_string(j);
            return true;
          }
      }
      return false;
    };
    if (find(A, B, false) || find(B, A, true)) return out;
    bool clash = false;
    for (auto& x : A)
      if (x.size() == static_cast<size_t>(j) && B.count(x)) {
        clash = true;
        break;
      }
    if (!clash) {
      out.result = JoinCheck::Safe;
      out.detail = "First_" + std::to_string(j) + " sets separate the tails";
      return out;
    }
  }
  out.detail = "undecided within depth " + std::to_string(depth_bound);
  return out;
}

JoinCheck check_join_safe(const Cfg& g, const Nfa& nfa, const ForkPoint& f, int depth_bound) {
  JoinCheck last;
  last.result = JoinCheck::Safe;
  last.detail = "no pairs";
  std::set<std::pair<std::vector<int>, std::vector<int>>> done;
  for (size_t i = 0; i < f.classes.size(); ++i)
    for (size_t j = i + 1; j < f.classes.size(); ++j)
      for (int x : f.classes[i])
        for (int y : f.classes[j]) {
          const auto& ta = g.prods[nfa.vertices[x].prod].rhs;
          const auto& tb = g.prods[nfa.vertices[y].prod].rhs;
          if (!done.insert({ta, tb}).second) continue;
          JoinCheck c = prefix_free(g, ta, tb, depth_bound);
          if (c.result != JoinCheck::Safe) return c;
          last = c;
        }
  return last;
}

namespace {

long long sat_mul(long long a, long long b) {
  constexpr long long kCap = 1LL << 60;
  if (a > kCap / std::max(b, 1LL)) return kCap;
  return a * b;
}

long long max_path_product(const Nfa& nfa, const std::vector<long long>& deg) {
  auto succ = successors(nfa);
  int nc = 0;
  auto comp = scc(succ, &nc);
  std::vector<long long> mult(nc, 1);
  for (int v = 0; v < nfa.size(); ++v) mult[comp[v]] = sat_mul(mult[comp[v]], deg[v]);
  std::vector<long long> best(nc, -1);
  best[comp[nfa.start]] = mult[comp[nfa.start]];
  long long out = best[comp[nfa.start]];
  // Tarjan numbers sinks first, so sources come last: walk components downwards.
  std::vector<std::vector<int>> members(nc);
  for (int v = 0; v < nfa.size(); ++v) members[comp[v]].push_back(v);
  for (int c = nc - 1; c >= 0; --c) {
    if (best[c] < 0) continue;
    out = std::max(out, best[c]);
    for (int v : members[c])
      for (int w : succ[v])
        if (comp[w] != c) best[comp[w]] = std::max(best[comp[w]], sat_mul(best[c], mult[comp[w]]));
  }
  return out;
}

}  // namespace

long long fork_degree(const Nfa& nfa, const std::vector<std::vector<ForkPoint>>& candidates,
                      std::vector<int>* choice) {
  if (candidates.empty()) {
    if (choice) choice->clear();
    return 1;
  }
  for (auto& c : candidates)
    if (c.empty()) return kInfiniteDegree;
  size_t combos = 1;
  for (auto& c : candidates) {
    combos *= c.size();
    if (combos > 4096) break;
  }
  long long best = kInfiniteDegree;
  std::vector<int> pick(candidates.size(), 0), best_pick;
  auto evaluate = [&] {
    std::vector<long long> deg(nfa.size(), 1);
    for (size_t i = 0; i < candidates.size(); ++i) {
      const ForkPoint& f = candidates[i][pick[i]];
      if (f.on_cycle) return;
      deg[f.vertex] = std::max<long long>(deg[f.vertex], f.degree);
    }
    long long t = max_path_product(nfa, deg);
    if (best == kInfiniteDegree || t < best) {
      best = t;
      best_pick = pick;
    }
  };
  if (combos > 4096) {
    // Too many assignments: take the first acyclic candidate of each conflict.
    for (size_t i = 0; i < candidates.size(); ++i) {
      pick[i] = 0;
      for (size_t j = 0; j < candidates[i].size(); ++j)
        if (!candidates[i][j].on_cycle) {
          pick[i] = static_cast<int>(j);
          break;
        }
    }
    evaluate();
  } else {
    for (;;) {
      evaluate();
      size_t i = 0;
      while (i < pick.size() && ++pick[i] == static_cast<int>(candidates[i].size())) pick[i++] = 0;
      if (i == pick.size()) break;
    }
  }
  if (choice) *choice = best_pick;
  return best;
}

std::string XlrCertificate::str(const Cfg& g, const Nfa& nfa) const {
  std::ostringstream os;
  if (certified) os << "certified XLR(" << k << ", " << t << ")\n";
  else os << "not certified: " << reason << "\n";
  for (size_t i = 0; i < conflicts.size(); ++i) {
    const Conflict& c = conflicts[i];
    os << "conflict " << i + 1 << ": state " << c.state << " on " << kstr::str(g, c.lookahead) << ":";
    for (auto& a : c.actions) os << " [" << a.str(g) << "]";
    os << "\n";
    if (i < forks.size() && forks[i].vertex >= 0) {
      const ForkPoint& f = forks[i];
      os << "  fork point: " << nfa.vertex_str(g, f.vertex) << " degree " << f.degree << "\n";
      for (size_t j = 0; j < f.classes.size(); ++j) {
        os << "    branch " << j + 1 << ":";
        for (int x : f.classes[j]) os << " " << nfa.vertex_str(g, x);
        os << "\n";
      }
    }
    if (i < evidence.size()) {
      const JoinCheck& e = evidence[i];
      os << "  join: " << join_result_name(e.result) << " (" << e.detail << ")";
      if (e.result == JoinCheck::Unsafe)
        os << " " << syms_str(g, e.tail_a) << " =>* " << syms_str(g, e.z) << ", " << syms_str(g, e.tail_b)
           << " =>* " << syms_str(g, e.z) << " " << syms_str(g, e.z2) << (e.witness_complete ? "" : " ...");
      os << "\n";
    }
  }
  return os.str();
}

XlrCertificate certify_xlr(const Cfg& g, const Nfa& nfa, const Dfa& dfa, int depth_bound) {
  XlrCertificate cert;
  cert.k = nfa.k;
  cert.conflicts = detect_conflicts(dfa);
  if (cert.conflicts.empty()) {
    cert.certified = true;
    cert.t = 1;
    return cert;
  }
  std::vector<std::vector<ForkPoint>> safe(cert.conflicts.size());
  std::vector<std::vector<JoinCheck>> checks(cert.conflicts.size());
  for (size_t i = 0; i < cert.conflicts.size(); ++i) {
    const Conflict& c = cert.conflicts[i];
    auto forks = find_fork_points(nfa, dfa, c);
    JoinCheck failed;
    failed.detail = "no fork point";
    for (auto& f : forks) {
      JoinCheck j = check_join_safe(g, nfa, f, depth_bound);
      if (j.result == JoinCheck::Safe) {
        safe[i].push_back(f);
        checks[i].push_back(j);
      } else {
        failed = j;
      }
    }
    if (safe[i].empty()) {
      cert.reason = "conflict in state " + std::to_string(c.state) + " on " + kstr::str(g, c.lookahead) +
                    " has no join-safe fork point (" + failed.detail + ")";
      cert.forks.assign(i, ForkPoint{});
      cert.evidence.assign(i, JoinCheck{});
      cert.forks.push_back(forks.empty() ? ForkPoint{} : forks.front());
      cert.evidence.push_back(failed);
      return cert;
    }
  }
  std::vector<int> choice;
  long long t = fork_degree(nfa, safe, &choice);
  if (t == kInfiniteDegree) {
    cert.reason = "fork degree is infinite: every assignment uses a fork point on a cycle";
    for (size_t i = 0; i < safe.size(); ++i) {
      cert.forks.push_back(safe[i].front());
      cert.evidence.push_back(checks[i].front());
    }
    return cert;
  }
  cert.certified = true;
  cert.t = t;
  for (size_t i = 0; i < safe.size(); ++i) {
    cert.forks.push_back(safe[i][choice[i]]);
    cert.evidence.push_back(checks[i][choice[i]]);
  }
  return cert;
}

XlrCertificate certify_xlr(const Cfg& g, int k, int depth_bound) {
  FirstK first(g, k);
  FollowPartition L = canonical_partition(g, first);
  Nfa nfa = build_lr_nfa(g, first, L);
  Dfa dfa = subset_construct(g, nfa);
  return certify_xlr(g, nfa, dfa, depth_bound);
}

}  // namespace xlr
