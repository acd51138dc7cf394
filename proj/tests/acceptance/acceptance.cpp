// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "xlr/trace.hpp"
#include "xlr/xlr_analysis.hpp"

using namespace xlr;
using namespace xlr::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> failures;

  void fail(const std::string& why) {
    pass = false;
    if (failures.size() < 12) failures.push_back(why);
  }
};

std::string join(const Cfg& g, const std::vector<int>& w) {
  if (w.empty()) return "ε";
  std::string s;
  for (size_t i = 0; i < w.size(); ++i) s += (i ? " " : "") + g.names[w[i]];
  return s;
}

// 1. enumerate(g, 8) == enumerate(CPS(g), 8) with every eligible symbol transformed.
Outcome cps_equivalence() {
  Outcome o;
  auto t0 = Clock::now();
  int grammars = 0, transformed = 0;
  size_t strings = 0;
  for (auto& name : corpus_names()) {
    if (name == "json") continue;  // 17 terminals: length-8 enumeration is out of budget
    PipelineConfig cfg;
    cfg.cps = CpsMode::AllEligible;
    auto c = compile_named(name, cfg);
    auto before = enumerate(c->inst, 8);
    auto after = enumerate(c->g, 8);
    ++grammars;
    if (!c->triggering.empty()) ++transformed;
    strings += before.size();
    if (before != after) o.fail(name + ": languages differ up to length 8");
  }
  for (std::string req : {"field", "array", "chain"})
    if (!std::filesystem::exists(corpus_path(req))) o.fail("missing required grammar " + req);
  double secs = seconds_since(t0);
  if (grammars < 20) o.fail("only " + std::to_string(grammars) + " grammars");
  if (secs >= 60) o.fail("took " + std::to_string(secs) + " s");
  o.summary = std::to_string(grammars) + " grammars (" + std::to_string(transformed) + " CPS-transformed), " +
              std::to_string(strings) + " strings, " + std::to_string(secs).substr(0, 5) + " s";
  return o;
}

// 2. Optimized partition conflicts iff canonical does; optimized DFA no larger.
Outcome partition_correctness() {
  Outcome o;
  auto t0 = Clock::now();
  int checked = 0, conflicting = 0, total = 0, smaller = 0;
  for (auto& name : corpus_names()) {
    for (CpsMode mode : {CpsMode::AllEligible, CpsMode::ConflictDriven, CpsMode::Off}) {
      PipelineConfig opt;
      opt.cps = mode;
      PipelineConfig can = opt;
      can.partition = PartitionMode::Canonical;
      auto a = compile_named(name, opt);
      auto b = compile_named(name, can);
      ++total;
      std::string tag = name + (mode == CpsMode::Off ? " (cps off)" : mode == CpsMode::ConflictDriven ? " (cps conflict)" : "");
      if (a->dfa.size() > b->dfa.size())
        o.fail(tag + ": optimized " + std::to_string(a->dfa.size()) + " states > canonical " +
               std::to_string(b->dfa.size()));
      if (a->dfa.size() < b->dfa.size()) ++smaller;
      if (a->flat.prods.size() > 12) continue;
      ++checked;
      if (!b->conflicts.empty()) ++conflicting;
      if (a->conflicts.empty() != b->conflicts.empty()) o.fail(tag + ": conflict status differs");
    }
  }
  double secs = seconds_since(t0);
  if (secs >= 120) o.fail("took " + std::to_string(secs) + " s");
  o.summary = std::to_string(checked) + " configurations with <= 12 productions (" + std::to_string(conflicting) +
              " conflicting); optimized DFA smaller on " + std::to_string(smaller) + "/" + std::to_string(total);
  return o;
}

// 3. lr_parse agrees with the Earley oracle on every string of length <= 8.
Outcome parser_oracle() {
  Outcome o;
  int grammars = 0;
  size_t strings = 0, accepted = 0;
  for (auto& name : corpus_names()) {
    auto c = compile_named(name);
    if (!c->conflicts.empty()) continue;
    ++grammars;
    ParseTable t = make_table(*c);
    auto alphabet = test_alphabet(c->inst);
    for (auto& w : all_strings(alphabet, 8)) {
      ++strings;
      OracleResult r = earley(c->inst, w, 2);
      bool ok = false;
      ParseTree tree;
      try {
        tree = lr_parse(t, tokens_of(w));
        ok = true;
      } catch (const ParseFailure& e) {
        if (e.kind() != ParseFailure::Syntax) o.fail(name + ": " + join(c->inst, w) + ": " + e.what());
      }
      if (ok != r.member) {
        o.fail(name + ": " + join(c->inst, w) + (ok ? " accepted, oracle rejects" : " rejected, oracle accepts"));
        continue;
      }
      if (!ok) continue;
      ++accepted;
      if (r.count != 1) {
        o.fail(name + ": " + join(c->inst, w) + " has " + std::to_string(r.count) + " oracle trees");
        continue;
      }
      if (tree.to_tree() != to_tree_ids(c->inst, *r.tree))
        o.fail(name + ": " + join(c->inst, w) + ": tree differs from the oracle");
    }
  }
  o.summary = std::to_string(grammars) + " conflict-free grammars, " + std::to_string(strings) + " strings, " +
              std::to_string(accepted) + " accepted";
  return o;
}

// 4. Traces: both inputs are members, share the prefix, and replay to the conflict.
Outcome trace_validity() {
  Outcome o;
  struct Case {
    std::string name;
    CpsMode cps;
  };
  std::vector<Case> cases = {{"g3", CpsMode::ConflictDriven},        {"field", CpsMode::Off},
                             {"ambiguous", CpsMode::ConflictDriven}, {"expr_ambig", CpsMode::ConflictDriven},
                             {"dangling_plain", CpsMode::ConflictDriven}, {"rr_conflict", CpsMode::ConflictDriven},
                             {"fork_cycle", CpsMode::ConflictDriven}, {"array", CpsMode::Off}};
  int grammars = 0, traces = 0;
  for (auto& cs : cases) {
    PipelineConfig cfg;
    cfg.cps = cs.cps;
    auto c = compile_named(cs.name, cfg);
    if (c->conflicts.empty()) {
      o.fail(cs.name + ": expected a conflict");
      continue;
    }
    ++grammars;
    ParseTable t = make_table(*c);
    for (auto& tr : trace_conflicts(c->g, c->nfa, c->dfa, c->conflicts)) {
      ++traces;
      std::string tag = cs.name + " state " + std::to_string(tr.state);
      if (!tr.complete) {
        o.fail(tag + ": incomplete trace (" + tr.note + ")");
        continue;
      }
      for (auto* w : {&tr.input_a, &tr.input_b}) {
        std::vector<int> shown(w->begin(), w->end());
        while (!shown.empty() && shown.back() == 0) shown.pop_back();
        if (!earley(c->inst, shown, 1).member) o.fail(tag + ": " + join(c->inst, shown) + " is not a member");
        if (w->size() < tr.prefix.size() || !std::equal(tr.prefix.begin(), tr.prefix.end(), w->begin()))
          o.fail(tag + ": input does not start with the prefix");
        Replay r = replay_to_conflict(t, *w, tr.prefix.size(), tr.state, tr.lookahead);
        if (!r.reached) o.fail(tag + ": replay of " + join(c->inst, shown) + ": " + r.detail);
      }
    }
  }
  if (grammars < 5) o.fail("fewer than 5 conflicting grammars");
  o.summary = std::to_string(traces) + " traces over " + std::to_string(grammars) + " conflicting grammars";
  return o;
}

// 5. G3 is XLR(1, 2); the XLR driver peaks at 2 instances and rejects non-members cleanly.
Outcome g3_reproduction() {
  Outcome o;
  PipelineConfig cfg;
  cfg.xlr = true;
  auto c = compile_named("g3", cfg);
  XlrCertificate cert = certify_xlr(c->g, c->nfa, c->dfa);
  if (!cert.certified || cert.k != 1 || cert.t != 2)
    o.fail("certificate: " + (cert.certified ? "t = " + std::to_string(cert.t) : cert.reason));
  ParseTable t = make_table(*c, static_cast<int>(cert.t));
  int a = c->g.find("A"), b = c->g.find("B"), cc = c->g.find("C");
  for (auto& w : {std::vector<int>{cc, cc, a}, std::vector<int>{cc, cc, b}}) {
    ParseStats st;
    try {
      xlr_parse(t, tokens_of(w), 2, &st);
      if (st.peak_instances != 2)
        o.fail(join(c->g, w) + ": peak " + std::to_string(st.peak_instances) + " instances");
    } catch (const ParseFailure& e) {
      o.fail(join(c->g, w) + ": " + e.what());
    }
  }
  int rejected = 0;
  for (auto& w : all_strings({a, b, cc}, 6)) {
    if (earley(c->inst, w, 1).member) continue;
    try {
      xlr_parse(t, tokens_of(w), 2);
      o.fail(join(c->g, w) + " accepted");
    } catch (const ParseFailure& e) {
      if (e.kind() != ParseFailure::Syntax) o.fail(join(c->g, w) + ": " + e.what());
      else ++rejected;
    }
  }
  o.summary = "certified XLR(" + std::to_string(cert.k) + ", " + std::to_string(cert.t) + "), " +
              std::to_string(rejected) + " non-members rejected";
  return o;
}

std::string parse_dump(const ParseTable& t, const std::string& text) {
  auto toks = tokenize(t, text);
  return dump_sexpr(t, parse(t, toks), toks);
}

// 6. Precedence and associativity, including postfix call and member access.
Outcome precedence() {
  Outcome o;
  auto prec = compile_named("prec");
  auto mixed = compile_named("mixed_assoc");
  if (!prec->conflicts.empty() || !mixed->conflicts.empty()) o.fail("precedence grammars have conflicts");
  ParseTable pt = make_table(*prec), mt = make_table(*mixed);
  struct Case {
    const ParseTable* t;
    std::string in, want;
  };
  std::vector<Case> cases = {{&pt, "1+2*3", "(Add 1 (Mul 2 3))"},
                             {&pt, "1+2+3", "(Add (Add 1 2) 3)"},
                             {&pt, "1*2+3", "(Add (Mul 1 2) 3)"},
                             {&mt, "x().y", "(S (Dot (Call x) y))"},
                             {&mt, "x.y()", "(S (Call (Dot x y)))"},
                             {&mt, "a.b().c()", "(S (Call (Dot (Call (Dot a b)) c)))"}};
  for (auto& cs : cases) {
    try {
      std::string got = parse_dump(*cs.t, cs.in);
      if (got != cs.want) o.fail(cs.in + " -> " + got + ", want " + cs.want);
    } catch (const Error& e) {
      o.fail(cs.in + ": " + e.what());
    }
  }
  o.summary = std::to_string(cases.size()) + " inputs";
  return o;
}

// Structural DFA comparison from the start states. The RD automaton may have one extra
// state reached from the start on the start label whose only actions are Return.
bool rd_isomorphic(const Dfa& lr, const Dfa& rd, int start_label, std::string* why) {
  std::vector<int> map_lr(lr.size(), -1), map_rd(rd.size(), -1);
  std::queue<std::pair<int, int>> q;
  q.push({0, 0});
  map_lr[0] = 0;
  map_rd[0] = 0;
  int return_states = 0;
  while (!q.empty()) {
    auto [a, b] = q.front();
    q.pop();
    const DfaState& sa = lr.states[a];
    const DfaState& sb = rd.states[b];
    if (sa.actions != sb.actions) {
      *why = "actions differ in state " + std::to_string(a);
      return false;
    }
    std::vector<std::pair<EdgeKey, int>> eb;
    for (auto& e : sb.edges) {
      if (edge::is_recur(e.first)) {
        *why = "RecurStep edge with every occurrence unfoldable";
        return false;
      }
      if (b == 0 && edge::label(e.first) == start_label && lr.states[0].next(e.first) < 0) {
        for (auto& [la, acts] : rd.states[e.second].actions)
          for (auto& act : acts)
            if (act.kind != Action::Return) {
              *why = "start goto state has a non-Return action";
              return false;
            }
        if (!rd.states[e.second].edges.empty()) {
          *why = "start goto state has edges";
          return false;
        }
        ++return_states;
        continue;
      }
      eb.push_back(e);
    }
    if (sa.edges.size() != eb.size()) {
      *why = "edge count differs in state " + std::to_string(a);
      return false;
    }
    for (size_t i = 0; i < eb.size(); ++i) {
      if (sa.edges[i].first != eb[i].first) {
        *why = "edge labels differ in state " + std::to_string(a);
        return false;
      }
      int x = sa.edges[i].second, y = eb[i].second;
      if (map_lr[x] < 0 && map_rd[y] < 0) {
        map_lr[x] = y;
        map_rd[y] = x;
        q.push({x, y});
      } else if (map_lr[x] != y || map_rd[y] != x) {
        *why = "state correspondence is not a bijection";
        return false;
      }
    }
  }
  int seen = 0;
  for (int v : map_lr) seen += v >= 0;
  if (seen != lr.size() || rd.size() != lr.size() + return_states || return_states > 1) {
    *why = "state counts differ (" + std::to_string(lr.size()) + " vs " + std::to_string(rd.size()) + ")";
    return false;
  }
  return true;
}

// 7. RD with every occurrence unfoldable matches LR; mutual left recursion is rejected.
Outcome rd_equivalence() {
  Outcome o;
  int grammars = 0;
  for (auto& name : corpus_names()) {
    auto lr = compile_named(name);
    PipelineConfig cfg;
    cfg.rd = true;
    cfg.all_unfold = true;
    std::unique_ptr<Compiled> rd;
    try {
      rd = compile_named(name, cfg);
    } catch (const Error& e) {
      o.fail(name + ": " + e.what());
      continue;
    }
    ++grammars;
    std::string why;
    if (!rd_isomorphic(lr->dfa, rd->dfa, lr->g.label[lr->g.start], &why)) o.fail(name + ": " + why);
  }
  PipelineConfig cfg;
  cfg.rd = true;
  bool rejected = false;
  try {
    compile_named("mutual", cfg);
  } catch (const Error& e) {
    rejected = std::string(e.what()).find("InfiniteRecursion") != std::string::npos;
  }
  if (!rejected) o.fail("mutual: not rejected with InfiniteRecursion");
  o.summary = std::to_string(grammars) + " grammars isomorphic; mutual.g " +
              (rejected ? "rejected with InfiniteRecursion" : "accepted");
  return o;
}

// 8. Dangling else with attributes: conflict-free, else binds to the nearest if.
Outcome dangling_else() {
  Outcome o;
  auto c = compile_named("dangling_else");
  if (!c->conflicts.empty()) o.fail(std::to_string(c->conflicts.size()) + " conflicts");
  ParseTable t = make_table(*c);
  struct Case {
    std::string in, want;
  };
  std::vector<Case> cases = {{"if if x else x", "(P (If (IfElse (Other) (Other))))"},
                             {"if x else if x else x", "(P (IfElse (Other) (IfElse (Other) (Other))))"},
                             {"if if if x else x else x", "(P (If (IfElse (IfElse (Other) (Other)) (Other))))"},
                             {"if if x else if x else x", "(P (If (IfElse (Other) (IfElse (Other) (Other)))))"}};
  for (auto& cs : cases) {
    try {
      auto toks = tokenize(t, cs.in);
      ParseTree tree = parse(t, toks);
      std::string got = dump_sexpr(t, tree, toks);
      if (got != cs.want) o.fail(cs.in + " -> " + got + ", want " + cs.want);
      std::vector<int> w;
      for (auto& tk : toks) w.push_back(tk.sym);
      OracleResult r = earley(c->inst, w);
      if (r.count != 1) o.fail(cs.in + ": oracle has " + std::to_string(r.count) + " trees");
      else if (to_tree_ids(c->inst, *r.tree) != tree.to_tree()) o.fail(cs.in + ": tree differs from the oracle");
    } catch (const Error& e) {
      o.fail(cs.in + ": " + e.what());
    }
  }
  o.summary = "k=1, " + std::to_string(c->conflicts.size()) + " conflicts, " + std::to_string(cases.size()) +
              " nested inputs";
  return o;
}

std::string run_capture(const std::string& cmd, int* status) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    *status = -1;
    return out;
  }
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  *status = pclose(p);
  return out;
}

// 9. Two compile runs give identical tables and reports.
Outcome determinism() {
  Outcome o;
  auto dir = std::filesystem::temp_directory_path() / ("xlr_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  int runs = 0;
  for (auto& name : corpus_names()) {
    for (std::string flags : {"", " --format json", " --xlr", " --rd --all-unfoldable"}) {
      std::string out = (dir / (name + ".xlrtab")).string();
      std::string cmd = std::string(XLRGEN_PATH) + " compile " + corpus_path(name) + flags + " -o " + out + " 2>&1";
      std::string tables[2], reports[2];
      int status[2];
      for (int r = 0; r < 2; ++r) {
        std::filesystem::remove(out);
        reports[r] = run_capture(cmd, &status[r]);
        tables[r] = std::filesystem::exists(out) ? read_text(out) : "";
      }
      ++runs;
      if (reports[0].empty()) o.fail(name + flags + ": empty report");
      if (status[0] != status[1] || reports[0] != reports[1]) o.fail(name + flags + ": reports differ");
      if (tables[0] != tables[1]) o.fail(name + flags + ": tables differ");
    }
  }
  std::filesystem::remove_all(dir);
  o.summary = std::to_string(runs) + " compile pairs";
  return o;
}

std::string json_input(size_t bytes, unsigned seed) {
  std::mt19937 rng(seed);
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };
  static const char* scalars[] = {"1", "-2.5e3", "\"s\\\"x\"", "'q'", "true", "null", "0x1F", "Infinity", "false"};
  std::function<void(std::string&, int)> value = [&](std::string& s, int depth) {
    int r = pick(10);
    if (depth > 4 || r < 4) {
      s += scalars[pick(9)];
    } else if (r < 7) {
      int n = pick(5);
      s += '[';
      for (int i = 0; i < n; ++i) {
        if (i) s += ", ";
        value(s, depth + 1);
      }
      if (n && pick(5) == 0) s += ',';
      s += ']';
    } else {
      static const char* keys[] = {"\"key\"", "ident", "7"};
      int n = 1 + pick(4);
      s += '{';
      for (int i = 0; i < n; ++i) {
        if (i) s += ", ";
        s += keys[pick(3)];
        s += ": ";
        value(s, depth + 1);
      }
      s += '}';
    }
  };
  std::string s = "[\n";
  bool first = true;
  while (s.size() < bytes) {
    if (!first) s += ",\n";
    first = false;
    value(s, 0);
  }
  s += "\n]\n";
  return s;
}

// 10. JSON-like grammar: fast compile, 1 MB parse under a second, linear tree size.
Outcome scaling() {
  Outcome o;
  auto t0 = Clock::now();
  auto c = compile_named("json");
  double compile_s = seconds_since(t0);
  if (!c->conflicts.empty()) o.fail("json grammar has conflicts");
  if (compile_s >= 10) o.fail("compile took " + std::to_string(compile_s) + " s");
  ParseTable t = make_table(*c);
  double parse_s = 0;
  double per_byte[2] = {0, 0};
  size_t sizes[2] = {1 << 19, 1 << 20};
  for (int i = 0; i < 2; ++i) {
    std::string text = json_input(sizes[i], 7);
    auto t1 = Clock::now();
    try {
      auto toks = tokenize(t, text);
      ParseTree tree = parse(t, toks);
      double s = seconds_since(t1);
      if (i == 1) parse_s = s;
      per_byte[i] = static_cast<double>(tree.nodes.size() + tree.kids.size()) / static_cast<double>(text.size());
    } catch (const Error& e) {
      o.fail(std::string("parse failed: ") + e.what());
      return o;
    }
  }
  if (parse_s >= 1) o.fail("1 MB parse took " + std::to_string(parse_s) + " s");
  double ratio = per_byte[1] / per_byte[0];
  if (ratio > 1.1 || ratio < 0.9) o.fail("tree size per byte grew by " + std::to_string(ratio));
  o.summary = std::to_string(c->flat.prods.size()) + " productions, compile " + std::to_string(compile_s).substr(0, 5) +
              " s, 1 MB parse " + std::to_string(parse_s).substr(0, 5) + " s, tree cells/byte " +
              std::to_string(per_byte[0]).substr(0, 5) + " -> " + std::to_string(per_byte[1]).substr(0, 5);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
  };
  const Criterion all[] = {
      {1, "CPS equivalence", cps_equivalence},     {2, "partition correctness", partition_correctness},
      {3, "parser/oracle equivalence", parser_oracle}, {4, "conflict-trace validity", trace_validity},
      {5, "G3 XLR(1, 2)", g3_reproduction},         {6, "precedence semantics", precedence},
      {7, "RD equivalence", rd_equivalence},       {8, "dangling else", dangling_else},
      {9, "determinism", determinism},             {10, "scaling smoke test", scaling},
  };
  int failed = 0;
  for (auto& c : all) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.summary
              << "\n";
    for (auto& f : o.failures) std::cout << "    " << f << "\n";
    std::cout.flush();
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
