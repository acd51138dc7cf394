#include "xlr/cps.hpp"

#include <map>

#include "xlr/automata.hpp"

namespace xlr {

namespace {

bool trailing_self(const Production& p, size_t d) {
  return p.rhs[d] == p.lhs && d + 1 == p.rhs.size();
}

}  // namespace

std::set<int> cps_candidates(const Cfg& g) {
  std::vector<int> count(g.num_symbols(), 0);
  for (auto& p : g.prods)
    for (size_t d = 0; d < p.rhs.size(); ++d)
      if (!trailing_self(p, d)) ++count[p.rhs[d]];
  std::set<int> out;
  for (int s = g.num_terminals; s < g.num_symbols(); ++s)
    if (g.cps_eligible[s] && count[s] == 1 && s != g.start) out.insert(s);
  return out;
}

std::set<int> select_cps_triggering(const Cfg& g, CpsMode mode) {
  if (mode == CpsMode::Off) return {};
  std::set<int> cand = cps_candidates(g);
  if (mode == CpsMode::AllEligible) return cand;
  FirstK first(g, 1);
  Nfa nfa = build_lr_nfa(g, first, coarsest_partition(g, first));
  Dfa dfa = subset_construct(g, nfa);
  std::set<int> labels;
  for (auto& c : detect_conflicts(dfa))
    for (auto& a : c.actions)
      if (a.kind == Action::Reduce) labels.insert(a.label);
  std::set<int> out;
  for (int s : cand)
    if (labels.count(g.label[s])) out.insert(s);
  return out;
}

namespace {

struct Transformer {
  const Cfg& g;
  const std::set<int>& trig;
  Cfg out;
  CpsMap map;
  std::vector<Tail> tail_sym;
  std::vector<std::vector<Tail>> tail_item;

  bool is_trig(int s) const { return trig.count(s) > 0; }

  void prod(int p, int dot, Tail tau) {
    const Production& src = g.prods[p];
    for (;;) {
      tail_item[p][dot] = tau;
      if (dot == 0) {
        Production np;
        np.lhs = map.hat[src.lhs];
        for (auto& [s, mark] : tau) {
          np.rhs.push_back(s);
          np.unfold.push_back(mark);
        }
        np.prov = src.prov;
        np.tree = src.tree;
        np.arity = src.arity;
        out.prods.push_back(np);
        map.prods.push_back({p, static_cast<int>(src.rhs.size()), static_cast<int>(tau.size())});
        return;
      }
      int a = src.rhs[dot - 1];
      if (!is_trig(a)) {
        char mark = dot - 1 < static_cast<int>(src.unfold.size()) ? src.unfold[dot - 1] : 0;
        tau.insert(tau.begin(), {map.hat[a], mark});
      } else if (a == src.lhs && dot == static_cast<int>(src.rhs.size())) {
        tau = {{map.hat[a], 1}};
      } else {
        sym(a, tau);
        tau = {{map.hat[a], 1}};
      }
      --dot;
    }
  }

  void sym(int x, const Tail& tau) {
    if (map.invocations[x]++ > 0)
      throw Error("cps", "CPSSym invoked twice on " + g.names[x]);
    tail_sym[x] = tau;
    for (int p : g.by_lhs[x]) prod(p, static_cast<int>(g.prods[p].rhs.size()), tau);
  }
};

}  // namespace

Cfg cps_transform(const Cfg& g, const std::set<int>& triggering, CpsMap* map_out) {
  for (int s : triggering)
    if (s < g.num_terminals || !g.cps_eligible[s] || s == g.start)
      throw Error("cps", "symbol " + g.names[s] + " cannot be CPS-triggering");
  Transformer t{g, triggering, {}, {}, {}, {}};
  t.out.labels = g.labels;
  t.out.num_terminals = g.num_terminals;
  std::map<int, int> hat_label;
  for (int s = 0; s < g.num_symbols(); ++s) {
    int lbl = g.label[s];
    std::string name = g.names[s];
    if (triggering.count(s)) {
      auto it = hat_label.find(lbl);
      if (it == hat_label.end()) {
        Label h = g.labels[lbl];
        h.name += "^";
        h.hat = true;
        t.out.labels.push_back(h);
        it = hat_label.emplace(lbl, static_cast<int>(t.out.labels.size()) - 1).first;
      }
      lbl = it->second;
      name += "^";
    }
    int id = t.out.add_symbol(name, lbl);
    t.out.bound[id] = g.bound[s];
    t.out.cps_eligible[id] = g.cps_eligible[s];
  }
  t.out.start = g.start;
  t.map.hat.resize(g.num_symbols());
  for (int s = 0; s < g.num_symbols(); ++s) t.map.hat[s] = s;
  t.map.invocations.assign(g.num_symbols(), 0);
  t.tail_sym.assign(g.num_symbols(), {});
  t.tail_item.resize(g.prods.size());
  for (size_t p = 0; p < g.prods.size(); ++p) t.tail_item[p].resize(g.prods[p].rhs.size() + 1);

  for (int s = g.num_terminals; s < g.num_symbols(); ++s)
    if (!triggering.count(s)) t.sym(s, {});
  for (int s : triggering)
    if (t.map.invocations[s] != 1)
      throw Error("cps", "triggering symbol " + g.names[s] + " is unreachable from the CPS roots");
  t.out.index();

  if (map_out) {
    auto strip = [](const Tail& tau) {
      std::vector<int> v;
      for (auto& e : tau) v.push_back(e.first);
      return v;
    };
    t.map.tail_symbol.resize(g.num_symbols());
    for (int s = 0; s < g.num_symbols(); ++s) t.map.tail_symbol[s] = strip(t.tail_sym[s]);
    t.map.tail_item.resize(g.prods.size());
    for (size_t p = 0; p < g.prods.size(); ++p)
      for (auto& tau : t.tail_item[p]) t.map.tail_item[p].push_back(strip(tau));
    *map_out = std::move(t.map);
  }
  return std::move(t.out);
}

}  // namespace xlr
