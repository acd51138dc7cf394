// Grammar source to parse table: every stage wired together.
#ifndef XLR_PIPELINE_HPP
#define XLR_PIPELINE_HPP

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "xlr/automata.hpp"
#include "xlr/cps.hpp"
#include "xlr/grammar.hpp"
#include "xlr/partition.hpp"
#include "xlr/runtime.hpp"

namespace xlr {

enum class PartitionMode { Optimized, Canonical, Coarsest };
const char* partition_name(PartitionMode m);

struct PipelineConfig {
  int k = 1;
  CpsMode cps = CpsMode::AllEligible;
  bool rd = false;
  bool all_unfold = false;             // RD: every occurrence unfoldable
  std::set<std::string> unfold_names;  // RD: occurrences of these symbols unfoldable
  bool xlr = false;
  int t_max = 64;
  int depth_bound = 16;
  PartitionMode partition = PartitionMode::Optimized;
};

/// Every intermediate product of one compilation.
struct Compiled {
  PipelineConfig config;
  BnfGrammar bnf;  // validated, precedence applied
  std::vector<Diagnostic> diags;
  Cfg flat;
  Cfg inst;
  std::set<int> triggering;
  CpsMap cmap;
  Cfg g;  // final grammar the automaton is built on
  std::unique_ptr<FirstK> first;
  FollowPartition partition;
  OptimizeStats pstats;
  Nfa nfa;
  Dfa dfa;
  std::vector<Conflict> conflicts;
};

/// Parses, validates and lowers the source. Throws Error tagged with the failing stage.
BnfGrammar load_grammar(const std::string& source, const PipelineConfig& c,
                        std::vector<Diagnostic>* diags = nullptr);

/// Runs the whole pipeline up to conflict detection (and the RecurStep cycle check in RD mode).
std::unique_ptr<Compiled> compile(const std::string& source, const PipelineConfig& c);

/// Runtime table for a compiled grammar. xlr_t is the certified fork degree (XLR mode).
ParseTable make_table(const Compiled& c, int xlr_t = 0);

}  // namespace xlr

#endif
