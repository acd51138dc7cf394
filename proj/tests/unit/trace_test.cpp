#include <gtest/gtest.h>

#include "corpus.hpp"
#include "xlr/trace.hpp"

using namespace xlr;
using namespace xlr::testing;

namespace {

std::vector<int> syms(const Cfg& g, std::initializer_list<const char*> names) {
  std::vector<int> out;
  for (auto* n : names) out.push_back(g.find(n));
  return out;
}

}  // namespace

TEST(GenTable, ShortestStringsOfG3) {
  auto c = compile_named("g3");
  const Cfg& g = c->g;
  GenTable gen = gen_table(g);
  EXPECT_EQ(gen[g.find("X")].str, syms(g, {"C"}));
  EXPECT_EQ(gen[g.find("S")].len, 3);
  EXPECT_EQ(gen[g.find("A")].len, 1);
  // Oracle: shortest member.
  size_t shortest = 99;
  for (auto& w : enumerate(g, 5)) shortest = std::min(shortest, w.size());
  EXPECT_EQ(gen[g.start].len, static_cast<int>(shortest));
}

TEST(GenTable, EveryCorpusSymbolMatchesEnumeration) {
  for (std::string name : {"expr", "json", "optional", "array"}) {
    auto c = compile_named(name);
    GenTable gen = gen_table(c->g);
    size_t shortest = 99;
    for (auto& w : enumerate(c->g, 6)) shortest = std::min(shortest, w.size());
    EXPECT_EQ(gen[c->g.start].len, static_cast<int>(shortest)) << name;
    EXPECT_EQ(gen[c->g.start].str.size(), shortest) << name;
  }
}

TEST(PrefixMatch, ShortestStringWithLookahead) {
  auto c = compile("start S;\ntokens { A = \"a\"; B = \"b\"; }\nrules { S -> X; X.One -> A; X.Two -> A B; }\n",
                   PipelineConfig{.cps = CpsMode::Off});
  const Cfg& g = c->g;
  int a = g.find("A"), b = g.find("B"), x = g.find("X");
  PrefixTables pt = prefix_tables(g, 1);
  auto r = prefix_match(pt, kstr::make({a}), {x, 0});
  ASSERT_TRUE(r.has_value());
  // Oracle: members of X followed by the sentinel, shortest one starting with a.
  std::vector<int> best;
  for (auto& w : enumerate(g, 4)) {
    auto s = w;
    s.push_back(0);
    if (s[0] == a && (best.empty() || s.size() < best.size())) best = s;
  }
  EXPECT_EQ(*r, best);
  EXPECT_EQ(*r, (std::vector<int>{a, 0}));
  auto rb = prefix_match(pt, kstr::make({b}), {x, 0});
  EXPECT_FALSE(rb.has_value());
}

TEST(PrefixMatch, EmptyTailIsEmptyString) {
  auto c = compile_named("g3");
  PrefixTables pt = prefix_tables(c->g, 1);
  for (size_t p = 0; p < c->g.prods.size(); ++p) {
    int item = pt.items.id(static_cast<int>(p), static_cast<int>(c->g.prods[p].rhs.size()));
    ASSERT_EQ(pt.tail[item].size(), 1u);
    EXPECT_EQ(pt.tail[item].begin()->first, kstr::empty());
    EXPECT_TRUE(pt.tail[item].begin()->second.empty());
  }
}

TEST(Trace, G3ConfusingInputs) {
  auto c = compile_named("g3");
  auto traces = trace_conflicts(c->g, c->nfa, c->dfa, c->conflicts);
  ASSERT_EQ(traces.size(), 1u);
  auto& t = traces[0];
  ASSERT_TRUE(t.complete);
  EXPECT_EQ(t.prefix, syms(c->g, {"C"}));
  std::set<std::vector<int>> inputs{t.display_a(), t.display_b()};
  EXPECT_EQ(inputs, (std::set<std::vector<int>>{syms(c->g, {"C", "C", "A"}), syms(c->g, {"C", "C", "B"})}));
  EXPECT_EQ(kstr::str(c->g, t.lookahead), "C");
}

TEST(Trace, DanglingElseInputsAreNestings) {
  auto c = compile_named("dangling_plain");
  auto traces = trace_conflicts(c->g, c->nfa, c->dfa, c->conflicts);
  ASSERT_EQ(traces.size(), 1u);
  auto& t = traces[0];
  ASSERT_TRUE(t.complete);
  // Ambiguous: one string, two nestings.
  EXPECT_EQ(t.display_a(), t.display_b());
  EXPECT_GE(earley(c->inst, t.display_a()).count, 2);
  for (auto w : {t.display_a(), t.display_b()}) {
    EXPECT_TRUE(earley(c->inst, w).member);
    ASSERT_GE(w.size(), t.prefix.size());
    EXPECT_TRUE(std::equal(t.prefix.begin(), t.prefix.end(), w.begin()));
  }
  // Both share "if if x" and differ in where the else goes.
  EXPECT_EQ(t.prefix, syms(c->g, {"IF", "IF", "X"}));
}

TEST(Trace, ReplaysReachConflictAcrossCorpus) {
  for (auto& name : corpus_names()) {
    auto c = compile_named(name, PipelineConfig{.cps = CpsMode::Off});
    if (c->conflicts.empty()) continue;
    ParseTable t = make_table(*c);
    for (auto& tr : trace_conflicts(c->g, c->nfa, c->dfa, c->conflicts)) {
      ASSERT_TRUE(tr.complete) << name << ": " << tr.note;
      EXPECT_TRUE(replay_to_conflict(t, tr.input_a, tr.prefix.size(), tr.state, tr.lookahead).reached) << name;
      EXPECT_TRUE(replay_to_conflict(t, tr.input_b, tr.prefix.size(), tr.state, tr.lookahead).reached) << name;
      EXPECT_TRUE(earley(c->inst, tr.display_a(), 1).member) << name;
      EXPECT_TRUE(earley(c->inst, tr.display_b(), 1).member) << name;
    }
  }
}

TEST(Trace, RendersDeterministically) {
  auto c = compile_named("field", PipelineConfig{.cps = CpsMode::Off});
  auto a = trace_conflicts(c->g, c->nfa, c->dfa, c->conflicts);
  auto b = trace_conflicts(c->g, c->nfa, c->dfa, c->conflicts);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].str(c->g, c->nfa), b[0].str(c->g, c->nfa));
}
