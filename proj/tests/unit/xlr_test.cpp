#include <gtest/gtest.h>

#include "corpus.hpp"
#include "xlr/xlr_analysis.hpp"

using namespace xlr;
using namespace xlr::testing;

namespace {

std::unique_ptr<Compiled> canonical(const std::string& name) {
  return compile_named(name, PipelineConfig{.xlr = true});
}

}  // namespace

TEST(ForkPoints, G3StartItem) {
  auto c = canonical("g3");
  ASSERT_EQ(c->conflicts.size(), 1u);
  auto forks = find_fork_points(c->nfa, c->dfa, c->conflicts[0]);
  ASSERT_FALSE(forks.empty());
  bool found = false;
  for (auto& f : forks) {
    if (c->nfa.vertex_str(c->g, f.vertex) != "(S' -> . S, {$})") continue;
    found = true;
    EXPECT_EQ(f.degree, 2);
    EXPECT_EQ(f.degree, static_cast<int>(c->conflicts[0].actions.size()));
    EXPECT_FALSE(f.on_cycle);
  }
  EXPECT_TRUE(found);
}

TEST(ForkPoints, ShiftReduceInExpressionHasNone) {
  auto c = canonical("expr_ambig");
  ASSERT_FALSE(c->conflicts.empty());
  EXPECT_TRUE(find_fork_points(c->nfa, c->dfa, c->conflicts[0]).empty());
}

TEST(JoinSafety, G3TailsAreSafe) {
  auto c = canonical("g3");
  auto forks = find_fork_points(c->nfa, c->dfa, c->conflicts[0]);
  ASSERT_FALSE(forks.empty());
  EXPECT_EQ(check_join_safe(c->g, c->nfa, forks[0], 16).result, JoinCheck::Safe);
}

TEST(JoinSafety, PrefixWitness) {
  auto c = compile_named("rr_conflict");
  const Cfg& g = c->g;
  int a = g.find("A"), b = g.find("B");
  JoinCheck r = prefix_free(g, {a}, {a, b}, 16);
  EXPECT_EQ(r.result, JoinCheck::Unsafe);
  EXPECT_EQ(r.z, std::vector<int>{a});
  EXPECT_EQ(r.z2, std::vector<int>{b});
  EXPECT_EQ(prefix_free(g, {a, b}, {b}, 16).result, JoinCheck::Safe);
}

TEST(JoinSafety, UnboundedCommonPrefixIsUnknown) {
  auto c = compile("start S;\ntokens { A = \"a\"; C = \"c\"; D = \"d\"; }\n"
                   "rules { S -> L | R; L -> A L | C; R -> A R | D; }\n",
                   PipelineConfig{.cps = CpsMode::Off});
  const Cfg& g = c->g;
  int l = g.find("L"), r = g.find("R");
  EXPECT_EQ(prefix_free(g, {l}, {r}, 6).result, JoinCheck::Unknown);
}

TEST(ForkDegree, CycleIsInfinite) {
  auto c = canonical("fork_cycle");
  ASSERT_FALSE(c->conflicts.empty());
  XlrCertificate cert = certify_xlr(c->g, c->nfa, c->dfa);
  EXPECT_FALSE(cert.certified);
  EXPECT_EQ(cert.t, kInfiniteDegree);
  // Graph-search oracle: the chosen fork vertex reaches itself.
  auto forks = find_fork_points(c->nfa, c->dfa, c->conflicts[0]);
  ASSERT_FALSE(forks.empty());
  for (auto& f : forks) {
    std::vector<char> seen(c->nfa.size());
    std::vector<int> stack;
    auto push_succ = [&](int v) {
      for (int w : c->nfa.eps[v]) stack.push_back(w);
      for (auto& e : c->nfa.steps[v]) stack.push_back(e.target);
    };
    push_succ(f.vertex);
    bool cyc = false;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      if (v == f.vertex) cyc = true;
      if (seen[v]) continue;
      seen[v] = 1;
      push_succ(v);
    }
    EXPECT_EQ(cyc, f.on_cycle);
  }
}

TEST(ForkDegree, NoConflictsIsOne) {
  EXPECT_EQ(fork_degree(Nfa{}, {}), 1);
}

TEST(Certify, G3IsXlr12) {
  XlrCertificate cert = certify_xlr(canonical("g3")->g, 1);
  EXPECT_TRUE(cert.certified);
  EXPECT_EQ(cert.k, 1);
  EXPECT_EQ(cert.t, 2);
  ASSERT_EQ(cert.forks.size(), 1u);
  ASSERT_EQ(cert.evidence.size(), 1u);
  EXPECT_EQ(cert.evidence[0].result, JoinCheck::Safe);
}

TEST(Certify, NotCertifiedCarriesReason) {
  for (std::string name : {"ambiguous", "expr_ambig", "dangling_plain", "rr_conflict"}) {
    auto c = canonical(name);
    XlrCertificate cert = certify_xlr(c->g, c->nfa, c->dfa);
    EXPECT_FALSE(cert.certified) << name;
    EXPECT_FALSE(cert.reason.empty()) << name;
  }
}

TEST(Certify, OneExactlyWhenConflictFree) {
  for (auto& name : corpus_names()) {
    auto c = canonical(name);
    XlrCertificate cert = certify_xlr(c->g, c->nfa, c->dfa);
    EXPECT_EQ(cert.certified && cert.t == 1, c->conflicts.empty()) << name;
  }
}

TEST(Certify, InstanceBoundHoldsOnShortInputs) {
  for (auto& name : corpus_names()) {
    auto c = canonical(name);
    XlrCertificate cert = certify_xlr(c->g, c->nfa, c->dfa);
    if (!cert.certified) continue;
    ParseTable t = make_table(*c, static_cast<int>(cert.t));
    auto alphabet = test_alphabet(c->inst);
    int len = alphabet.size() <= 3 ? 10 : 7;
    for (auto& w : all_strings(alphabet, len)) {
      ParseStats st;
      bool member = earley(c->inst, w, 1).member;
      try {
        xlr_parse(t, tokens_of(w), static_cast<int>(cert.t), &st);
        EXPECT_TRUE(member) << name;
      } catch (const ParseFailure& e) {
        EXPECT_FALSE(member) << name;
        EXPECT_EQ(e.kind(), ParseFailure::Syntax) << name << ": " << e.what();
      }
      EXPECT_LE(st.peak_instances, cert.t) << name;
    }
  }
}

TEST(XlrParse, AmbiguityAndBranchLimit) {
  auto c = compile_named("ambiguous", PipelineConfig{.xlr = true});
  ParseTable t = make_table(*c, 2);
  t.mode = ParseTable::XLR;
  auto toks = tokens_of({c->g.find("A")});
  try {
    xlr_parse(t, toks, 4);
    FAIL();
  } catch (const ParseFailure& e) {
    EXPECT_EQ(e.kind(), ParseFailure::Ambiguity);
  }
  try {
    xlr_parse(t, toks, 1);
    FAIL();
  } catch (const ParseFailure& e) {
    EXPECT_EQ(e.kind(), ParseFailure::BranchLimit);
  }
}
