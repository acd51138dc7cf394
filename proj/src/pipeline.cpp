#include "xlr/pipeline.hpp"

#include <algorithm>

#include "xlr/flatten.hpp"

namespace xlr {

const char* partition_name(PartitionMode m) {
  switch (m) {
    case PartitionMode::Optimized: return "optimized";
    case PartitionMode::Canonical: return "canonical";
    case PartitionMode::Coarsest: return "coarsest";
  }
  return "optimized";
}

BnfGrammar load_grammar(const std::string& source, const PipelineConfig& c,
                        std::vector<Diagnostic>* diags) {
  if (c.k < 0 || c.k > kMaxK) throw Error("config", "k must be between 0 and " + std::to_string(kMaxK));
  BnfGrammar bnf = parse_grammar_source(source);
  auto ds = validate_grammar(bnf);
  for (auto& d : ds)
    if (d.is_error()) throw Error("validate", d.message, d.line, d.col);
  // After validation so that an inserted start wrapper is marked too.
  if (c.rd && (c.all_unfold || !c.unfold_names.empty()))
    mark_unfoldable(bnf, c.all_unfold, c.unfold_names);
  if (diags) *diags = ds;
  return apply_precedence(bnf);
}

std::unique_ptr<Compiled> compile(const std::string& source, const PipelineConfig& c) {
  auto out = std::make_unique<Compiled>();
  out->config = c;
  out->bnf = load_grammar(source, c, &out->diags);
  out->flat = flatten(out->bnf);
  out->inst = instantiate_attributes(out->flat);
  out->triggering = select_cps_triggering(out->inst, c.cps);
  out->g = out->triggering.empty() && c.cps == CpsMode::Off
               ? out->inst
               : cps_transform(out->inst, out->triggering, &out->cmap);
  const Cfg& g = out->g;
  out->first = std::make_unique<FirstK>(g, c.k);
  PartitionMode pm = c.xlr ? PartitionMode::Canonical : c.partition;
  switch (pm) {
    case PartitionMode::Optimized: out->partition = optimize(g, *out->first, &out->pstats); break;
    case PartitionMode::Canonical: out->partition = canonical_partition(g, *out->first); break;
    case PartitionMode::Coarsest: out->partition = coarsest_partition(g, *out->first); break;
  }
  out->nfa = c.rd ? build_rd_nfa(g, *out->first, out->partition)
                  : build_lr_nfa(g, *out->first, out->partition);
  out->dfa = subset_construct(g, out->nfa);
  out->conflicts = detect_conflicts(out->dfa);
  if (c.rd) check_recur_cycles(g, out->dfa);
  return out;
}

ParseTable make_table(const Compiled& c, int xlr_t) {
  const Cfg& g = c.g;
  ParseTable t;
  t.mode = c.config.xlr ? ParseTable::XLR : c.config.rd ? ParseTable::RD : ParseTable::LR;
  t.k = c.config.k;
  t.xlr_t = xlr_t;
  t.start_label = g.label[g.start];
  t.num_terminals = g.num_terminals;
  t.tokens = c.bnf.tokens;
  for (auto& l : g.labels) {
    TableLabel tl;
    tl.name = l.name;
    tl.terminal = l.terminal;
    for (auto& d : l.domain) {
      tl.keys.push_back(d.key);
      tl.ranges.push_back(d.type.range);
    }
    t.labels.push_back(std::move(tl));
  }
  const Cfg& f = c.flat;
  for (auto& p : f.prods) {
    TreeProd tp;
    tp.lhs = f.label[p.lhs];
    tp.len = static_cast<int>(p.rhs.size());
    tp.splice = f.cps_eligible[p.lhs] != 0;
    tp.wrapper = p.prov.role == Provenance::Wrapper;
    if (p.prov.rule >= 0 && !tp.splice) {
      const BnfRule& r = c.bnf.rules[p.prov.rule];
      tp.name = r.variant.empty() ? r.lhs : r.variant;
    } else {
      tp.name = f.names[p.lhs];
    }
    const Label& l = f.labels[f.label[p.lhs]];
    auto key_of = [](const Label& lb, const std::string& k) {
      for (size_t j = 0; j < lb.domain.size(); ++j)
        if (lb.domain[j].key == k) return static_cast<int>(j);
      return -1;
    };
    for (auto& d : l.domain) tp.caps.push_back(d.type.range - 1);
    for (auto& k : p.constraints) {
      if (k.form == FlatConstraint::LhsLeq) {
        int a = key_of(l, k.key);
        if (a >= 0) tp.caps[a] = std::min(tp.caps[a], k.bound);
      } else if (k.form == FlatConstraint::LhsLeqRhsI) {
        const Label& cl = f.labels[f.label[p.rhs[k.i - 1]]];
        int a = key_of(l, k.key), b = key_of(cl, k.key2);
        if (a >= 0 && b >= 0) tp.rels.push_back({k.i - 1, a, b});
      }
    }
    t.prods.push_back(std::move(tp));
  }
  t.states.reserve(c.dfa.states.size());
  for (auto& s : c.dfa.states) {
    DfaState d;
    d.edges = s.edges;
    d.actions = s.actions;
    t.states.push_back(std::move(d));
  }
  return t;
}

}  // namespace xlr
