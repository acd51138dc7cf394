#include <gtest/gtest.h>

#include "corpus.hpp"
#include "xlr/flatten.hpp"
#include "xlr/grammar.hpp"

using namespace xlr;
using namespace xlr::testing;

TEST(GrammarSource, RenderRoundTripsEveryCorpusGrammar) {
  for (auto& name : corpus_names()) {
    BnfGrammar g = parse_grammar_source(read_text(corpus_path(name)));
    EXPECT_EQ(parse_grammar_source(render(g)), g) << name;
  }
}

TEST(GrammarSource, SyntaxErrorCarriesPosition) {
  try {
    parse_grammar_source("start S;\ntokens { A = \"a\"; }\nrules { S -> ; }\n");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.stage(), "parse");
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(GrammarSource, UndeclaredSymbolIsRejected) {
  try {
    parse_grammar_source("start S;\ntokens { A = \"a\"; }\nrules { S -> A Missing; }\n");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("Missing"), std::string::npos);
  }
}

TEST(GrammarValidate, StartInRhsGetsWrapper) {
  BnfGrammar g = parse_grammar_source(read_text(corpus_path("prec")));
  auto ds = validate_grammar(g);
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_FALSE(ds[0].is_error());
  EXPECT_EQ(g.start, "E'");
  EXPECT_NE(g.find_rule("E'"), -1);
}

TEST(GrammarValidate, ValidGrammarHasNoDiagnostics) {
  BnfGrammar g = parse_grammar_source(read_text(corpus_path("chain")));
  EXPECT_TRUE(validate_grammar(g).empty());
}

TEST(GrammarValidate, PipelineRejectsInvalidGrammar) {
  EXPECT_THROW(compile("start S;\ntokens { A = \"a\"; }\nrules { S -> B; }\n", {}), Error);
}

TEST(Flatten, ArrayRule) {
  auto c = compile_named("array");
  EXPECT_EQ(dump(c->flat),
            "start S\n"
            "0: S -> E\n"
            "1: E -> E LB E _E_0 _E_1 RB\n"
            "2: _E_0 -> COMMA E _E_0  (fresh-star)\n"
            "3: _E_0 -> ε  (fresh-star)\n"
            "4: _E_1 -> COMMA  (fresh-opt)\n"
            "5: _E_1 -> ε  (fresh-opt)\n"
            "6: E -> ID\n");
}

TEST(Flatten, ChainOfAlternatives) {
  auto c = compile_named("chain");
  EXPECT_EQ(dump(c->flat),
            "start S\n"
            "0: S -> _S_0 _S_1 _S_2\n"
            "1: _S_0 -> A  (fresh-alt)\n"
            "2: _S_0 -> B  (fresh-alt)\n"
            "3: _S_1 -> C  (fresh-alt)\n"
            "4: _S_1 -> D  (fresh-alt)\n"
            "5: _S_2 -> E  (fresh-alt)\n"
            "6: _S_2 -> F  (fresh-alt)\n");
}

TEST(Flatten, PreservesLanguage) {
  // The BNF-level language is checked by hand-written members of a few grammars.
  auto c = compile_named("star");
  auto members = enumerate(c->flat, 4);
  int a = c->flat.find("A"), b = c->flat.find("B"), cc = c->flat.find("C");
  std::set<std::vector<int>> want = {{b}, {a, b}, {a, a, b}, {a, a, a, b}, {b, cc, a}, {a, b, cc, a}};
  EXPECT_EQ(members, want);
}

TEST(Precedence, ProducesOneTreePerInput) {
  auto c = compile_named("prec");
  ParseTable t = make_table(*c);
  for (std::string in : {"1+2*3", "1*2+3*4", "1+2+3+4", "1*2*3"}) {
    auto toks = tokenize(t, in);
    std::vector<int> w;
    for (auto& tk : toks) w.push_back(tk.sym);
    EXPECT_EQ(earley(c->inst, w).count, 1) << in;
    EXPECT_EQ(earley(c->flat, w).count > 1, in.size() > 3) << in;
  }
}

TEST(Precedence, RightAssociativeAndPrefix) {
  auto c = compile_named("right_assoc");
  ASSERT_TRUE(c->conflicts.empty());
  ParseTable t = make_table(*c);
  auto toks = tokenize(t, "-2^3^4");
  EXPECT_EQ(dump_sexpr(t, parse(t, toks), toks), "(Neg (Pow 2 (Pow 3 4)))");
}
