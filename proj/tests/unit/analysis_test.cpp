// First/follow sets, CPS, partitions and automata, checked against enumeration oracles.
#include <gtest/gtest.h>

#include "corpus.hpp"
#include "xlr/cps.hpp"
#include "xlr/first.hpp"
#include "xlr/follow.hpp"
#include "xlr/partition.hpp"

using namespace xlr;
using namespace xlr::testing;

namespace {

std::unique_ptr<Compiled> compile_src(const std::string& src, PipelineConfig cfg = {}) { return compile(src, cfg); }

void collect_follows(const Tree& t, const std::vector<int>& w, int k, std::vector<KSet>& out) {
  if (t.prod < 0) return;
  std::vector<int> la;
  for (int j = 0; j < k; ++j) la.push_back(t.end + j < static_cast<int>(w.size()) ? w[t.end + j] : 0);
  out[t.prod].push_back(kstr::make(la));
  for (auto& kid : t.kids) collect_follows(kid, w, k, out);
}

// Follow strings per production read off the oracle trees of every member up to max_len.
std::vector<KSet> follows_by_enumeration(const Cfg& g, int k, int max_len) {
  std::vector<KSet> out(g.prods.size());
  for (auto& w : enumerate(g, max_len)) {
    OracleResult r = earley(g, w);
    if (r.tree) collect_follows(*r.tree, w, k, out);
  }
  for (auto& s : out) normalize(s);
  return out;
}

}  // namespace

TEST(FirstK, OptionalBeforeTerminal) {
  auto c = compile_src("start S;\ntokens { A = \"a\"; B = \"b\"; }\nrules { S -> X B; X -> A?; }\n",
                       PipelineConfig{.cps = CpsMode::Off});
  const Cfg& g = c->flat;
  FirstK f(g, 1);
  int x = g.find("X"), a = g.find("A"), b = g.find("B");
  // Oracle: first tokens of every member.
  KSet want;
  for (auto& w : enumerate(g, 4)) want.push_back(kstr::make({w.empty() ? 0 : w[0]}));
  normalize(want);
  EXPECT_EQ(f.of({x, b}), want);
  EXPECT_EQ(want, (KSet{kstr::make({a}), kstr::make({b})}));
}

TEST(FirstK, KZeroIsEmptyString) {
  auto c = compile_named("g3");
  FirstK f(c->g, 0);
  for (int s = 0; s < c->g.num_symbols(); ++s) EXPECT_EQ(f.of({s}), KSet{kstr::empty()});
}

TEST(Follow, G3MatchesEnumeration) {
  auto c = compile_named("g3");
  FirstK f(c->g, 1);
  auto rf = forward_reachable(c->g, f);
  EXPECT_EQ(rf, follows_by_enumeration(c->g, 1, 6));
  int x_prod = c->g.by_lhs[c->g.find("X")][0];
  EXPECT_EQ(rf[x_prod], KSet{kstr::make({c->g.find("C")})});
}

TEST(Follow, CorpusMatchesEnumerationWhereComplete) {
  // Finite or short-context languages: enumeration to length 8 sees every follow string.
  for (std::string name : {"g3", "chain", "dangling_matched", "simple", "opt_chain", "optional"}) {
    auto c = compile_named(name, PipelineConfig{.cps = CpsMode::Off});
    FirstK f(c->g, 1);
    EXPECT_EQ(forward_reachable(c->g, f), follows_by_enumeration(c->g, 1, 8)) << name;
  }
}

TEST(Cps, FieldAllEligible) {
  auto c = compile_named("field");
  std::set<std::string> trig;
  for (int s : c->triggering) trig.insert(c->inst.names[s]);
  EXPECT_EQ(trig, std::set<std::string>{"_Field_0"});
  EXPECT_EQ(dump(c->g),
            "start Field'\n"
            "0: Field' -> Field\n"
            "1: _Field_0^ -> STAR E  (fresh-opt)\n"
            "2: _Field_0^ -> E  (fresh-opt)\n"
            "3: Field -> _Field_0^\n"
            "4: Field -> E E\n"
            "5: E -> ID\n");
}

TEST(Cps, ArrayAbsorbsTail) {
  auto c = compile_named("array");
  EXPECT_EQ(dump(c->g),
            "start S\n"
            "0: S -> E\n"
            "1: _E_1^ -> COMMA RB  (fresh-opt)\n"
            "2: _E_1^ -> RB  (fresh-opt)\n"
            "3: _E_0^ -> COMMA E _E_0^  (fresh-star)\n"
            "4: _E_0^ -> _E_1^  (fresh-star)\n"
            "5: E -> E LB E _E_0^\n"
            "6: E -> ID\n");
}

TEST(Cps, ChainAllEligible) {
  auto c = compile_named("chain");
  EXPECT_EQ(dump(c->g),
            "start S\n"
            "0: _S_2^ -> E  (fresh-alt)\n"
            "1: _S_2^ -> F  (fresh-alt)\n"
            "2: _S_1^ -> C _S_2^  (fresh-alt)\n"
            "3: _S_1^ -> D _S_2^  (fresh-alt)\n"
            "4: _S_0^ -> A _S_1^  (fresh-alt)\n"
            "5: _S_0^ -> B _S_1^  (fresh-alt)\n"
            "6: S -> _S_0^\n");
  // Arity and visible length per CPS production.
  std::vector<std::pair<int, int>> rm;
  for (auto& e : c->cmap.prods) rm.push_back({e.r, e.m});
  EXPECT_EQ(rm, (std::vector<std::pair<int, int>>{{1, 1}, {1, 1}, {1, 2}, {1, 2}, {1, 2}, {1, 2}, {3, 1}}));
}

TEST(Cps, ChainConflictDrivenSelectsNothing) {
  // Oracle: the SLR(1) automaton of the untransformed grammar has no conflict.
  PipelineConfig slr{.cps = CpsMode::Off, .partition = PartitionMode::Coarsest};
  ASSERT_TRUE(compile_named("chain", slr)->conflicts.empty());
  EXPECT_TRUE(compile_named("chain", PipelineConfig{.cps = CpsMode::ConflictDriven})->triggering.empty());
}

TEST(Cps, ConflictDrivenSelectsFieldAndArray) {
  for (std::string name : {"field", "array"}) {
    PipelineConfig slr{.cps = CpsMode::Off, .partition = PartitionMode::Coarsest};
    ASSERT_FALSE(compile_named(name, slr)->conflicts.empty()) << name;
    EXPECT_FALSE(compile_named(name, PipelineConfig{.cps = CpsMode::ConflictDriven})->triggering.empty()) << name;
  }
}

TEST(Cps, SizeStaysLinear) {
  for (auto& name : corpus_names()) {
    auto c = compile_named(name);
    EXPECT_LE(c->g.prods.size(), 2 * c->inst.prods.size()) << name;
  }
}

TEST(Cps, FieldRemovesConflict) {
  EXPECT_EQ(compile_named("field", PipelineConfig{.cps = CpsMode::Off})->conflicts.size(), 1u);
  EXPECT_TRUE(compile_named("field")->conflicts.empty());
}

TEST(Partition, CanonicalNfaSizeMatchesEnumeration) {
  // Oracle: one vertex per (dotted production, follow string) with follow strings read
  // off oracle trees.
  for (std::string name : {"g3", "dangling_matched", "chain"}) {
    PipelineConfig cfg{.cps = CpsMode::Off, .partition = PartitionMode::Canonical};
    auto c = compile_named(name, cfg);
    auto fol = follows_by_enumeration(c->g, 1, 8);
    int want = 0;
    for (auto& p : c->g.prods) want += static_cast<int>(fol[p.id].size() * (p.rhs.size() + 1));
    EXPECT_EQ(c->nfa.size(), want) << name;
  }
}

TEST(Partition, G3SplitsOnlyWhereCompatibilityDiffers) {
  auto c = compile_named("g3");
  FirstK f(c->g, 1);
  // G3 has one follow string per production, so every partition is the canonical one.
  EXPECT_EQ(optimize(c->g, f).total_blocks(), canonical_partition(c->g, f).total_blocks());
  EXPECT_TRUE(optimize(c->g, f).valid());
}

TEST(Partition, DanglingElseOptimizedIsSmaller) {
  for (std::string name : {"dangling_matched", "dangling_block"}) {
    auto opt = compile_named(name);
    auto can = compile_named(name, PipelineConfig{.partition = PartitionMode::Canonical});
    EXPECT_TRUE(opt->conflicts.empty());
    EXPECT_TRUE(can->conflicts.empty());
    EXPECT_LT(opt->nfa.size(), can->nfa.size()) << name;
    EXPECT_LT(opt->dfa.size(), can->dfa.size()) << name;
  }
  // Attribute instances of the two-branch grammar already have one follow string each.
  auto opt = compile_named("dangling_else");
  auto can = compile_named("dangling_else", PipelineConfig{.partition = PartitionMode::Canonical});
  EXPECT_EQ(opt->dfa.size(), can->dfa.size());
  EXPECT_EQ(opt->dfa.size(), 13);
}

TEST(Partition, PotentiallyConflictingAtElseItems) {
  auto can = compile_named("dangling_plain", PipelineConfig{.cps = CpsMode::Off, .partition = PartitionMode::Canonical});
  const Cfg& g = can->g;
  ItemIndex idx(g);
  // Oracle: items of canonical DFA states that have a conflicting action.
  std::set<int> want;
  for (auto& cf : can->conflicts)
    for (int v : can->dfa.states[cf.state].nfa) {
      auto& vx = can->nfa.vertices[v];
      auto it = can->nfa.actions[v].find(cf.lookahead);
      if (it != can->nfa.actions[v].end() && !it->second.empty()) want.insert(idx.id(vx.prod, vx.dot));
    }
  FirstK f(g, 1), f0(g, 0);
  Nfa lr0 = build_lr_nfa(g, f0, coarsest_partition(g, f0));
  Dfa lr0_dfa = subset_construct(g, lr0);
  auto cl = potentially_conflicting(g, f, forward_reachable(g, f), lr0, lr0_dfa);
  std::set<int> got;
  for (int i = 0; i < idx.count; ++i)
    if (!cl[i].empty()) got.insert(i);
  EXPECT_EQ(got, want);
  EXPECT_EQ(want.size(), 2u);
}

TEST(Partition, BlocksAreValidAcrossCorpus) {
  for (auto& name : corpus_names()) {
    auto c = compile_named(name);
    EXPECT_TRUE(c->partition.valid()) << name;
  }
}

TEST(Automata, DanglingElseConflicts) {
  EXPECT_TRUE(compile_named("dangling_else")->conflicts.empty());
  auto c = compile_named("dangling_plain");
  ASSERT_EQ(c->conflicts.size(), 1u);
  EXPECT_EQ(kstr::str(c->g, c->conflicts[0].lookahead), "ELSE");
  ASSERT_EQ(c->conflicts[0].actions.size(), 2u);
  EXPECT_EQ(c->conflicts[0].actions[0].kind, Action::Shift);
  EXPECT_EQ(c->conflicts[0].actions[1].kind, Action::Reduce);
}

TEST(Automata, LrZeroNeedsLookaheadForEmptyProduction) {
  EXPECT_FALSE(compile_named("optional", PipelineConfig{.k = 0})->conflicts.empty());
  EXPECT_TRUE(compile_named("optional", PipelineConfig{.k = 1})->conflicts.empty());
}

TEST(Automata, TwoTokensResolveG3) {
  EXPECT_EQ(compile_named("g3")->conflicts.size(), 1u);
  EXPECT_TRUE(compile_named("g3", PipelineConfig{.k = 2})->conflicts.empty());
}

TEST(Automata, RdRecurOnNonUnfoldableOccurrence) {
  std::string src = "start S;\ntokens { SEMI = \";\"; NUM = /[0-9]+/; }\nrules { S -> E SEMI; E -> NUM; }\n";
  auto c = compile_src(src, PipelineConfig{.rd = true});
  const Cfg& g = c->g;
  int e = g.find("E");
  int s_prod = g.by_lhs[g.find("S")][0];
  bool found = false;
  for (int v = 0; v < c->nfa.size(); ++v) {
    auto& vx = c->nfa.vertices[v];
    if (vx.is_hash() || vx.prod != s_prod || vx.dot != 0) continue;
    found = true;
    bool recur = false;
    for (auto& [la, acts] : c->nfa.actions[v])
      for (auto& a : acts) recur |= a.kind == Action::Recur && a.label == e;
    EXPECT_TRUE(recur);
    ASSERT_EQ(c->nfa.steps[v].size(), 2u);
    const NfaEdge* rs = nullptr;
    for (auto& ed : c->nfa.steps[v])
      if (ed.recur) rs = &ed;
    ASSERT_NE(rs, nullptr);
    EXPECT_EQ(rs->sym, e);
    auto& t = c->nfa.vertices[rs->target];
    EXPECT_EQ(t.hash, e);
    EXPECT_EQ(t.dot, 0);
    EXPECT_EQ(t.rtag, e);
  }
  EXPECT_TRUE(found);
  EXPECT_NO_THROW(check_recur_cycles(g, c->dfa));
}

TEST(Automata, MutualLeftRecursionIsInfinite) {
  try {
    compile_named("mutual", PipelineConfig{.rd = true});
    FAIL() << "expected InfiniteRecursion";
  } catch (const Error& e) {
    EXPECT_EQ(e.stage(), "automata");
    EXPECT_NE(std::string(e.what()).find("InfiniteRecursion"), std::string::npos);
  }
  EXPECT_NO_THROW(compile_named("mutual"));
}

TEST(Automata, DumpIsStable) {
  auto a = compile_named("json");
  auto b = compile_named("json");
  EXPECT_EQ(dump(a->g, a->nfa, a->dfa), dump(b->g, b->nfa, b->dfa));
}
