// xlrgen: compile grammars to parse tables, parse inputs, report stats, trace and certify.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "xlr/flatten.hpp"
#include "xlr/oracle.hpp"
#include "xlr/pipeline.hpp"
#include "xlr/trace.hpp"
#include "xlr/xlr_analysis.hpp"

using nlohmann::json;
using namespace xlr;

namespace {

enum Exit { kOk = 0, kConflicts = 2, kParseError = 3, kIoError = 4 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw IoError("cannot write " + path);
}

void setup_logging() {
  auto log = spdlog::stderr_color_mt("xlrgen");
  spdlog::set_default_logger(log);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* v = std::getenv("XLRGEN_LOG")) spdlog::set_level(spdlog::level::from_str(v));
}

struct Options {
  std::string grammar, table, input, out, dump = "sexpr", format = "text", cps = "all",
                                           partition = "optimized";
  std::vector<std::string> unfold;
  PipelineConfig config;
  bool no_trace = false;
  bool log_rd = false;
  int enumerate = -1;
};

void add_pipeline_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("grammar", o.grammar, "grammar source file")->required();
  cmd->add_option("-k", o.config.k, "lookahead length")->check(CLI::Range(0, kMaxK));
  cmd->add_option("--cps", o.cps, "CPS triggering: all, conflict or off")
      ->check(CLI::IsMember({"all", "conflict", "off"}));
  cmd->add_option("--partition", o.partition, "follow partition: optimized, canonical or coarsest")
      ->check(CLI::IsMember({"optimized", "canonical", "coarsest"}));
  cmd->add_flag("--rd", o.config.rd, "build an RD automaton (Recur/Return actions)");
  cmd->add_flag("--all-unfoldable", o.config.all_unfold, "RD: every occurrence unfoldable");
  cmd->add_option("--unfold", o.unfold, "RD: symbols whose occurrences are unfoldable")->delimiter(',');
  cmd->add_flag("--xlr", o.config.xlr, "allow conflicts resolved by XLR parsing");
  cmd->add_option("--t-max", o.config.t_max, "XLR instance bound")->check(CLI::PositiveNumber);
  cmd->add_option("--depth-bound", o.config.depth_bound, "join-safety search depth")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--format", o.format, "report format")->check(CLI::IsMember({"text", "json"}));
}

void finish_config(Options& o) {
  o.config.cps = o.cps == "all" ? CpsMode::AllEligible : o.cps == "off" ? CpsMode::Off : CpsMode::ConflictDriven;
  o.config.partition = o.partition == "canonical" ? PartitionMode::Canonical
                       : o.partition == "coarsest" ? PartitionMode::Coarsest
                                                   : PartitionMode::Optimized;
  o.config.unfold_names.insert(o.unfold.begin(), o.unfold.end());
}

std::unique_ptr<Compiled> run_pipeline(const Options& o) {
  std::string src = read_file(o.grammar);
  spdlog::info("compiling {} (k={}, cps={}, partition={})", o.grammar, o.config.k, o.cps,
               partition_name(o.config.partition));
  auto c = compile(src, o.config);
  for (auto& d : c->diags) spdlog::info("{}", d.str());
  spdlog::info("{} productions, {} NFA vertices, {} DFA states, {} conflicts", c->g.prods.size(),
               c->nfa.size(), c->dfa.size(), c->conflicts.size());
  return c;
}

std::string terminals(const Cfg& g, const std::vector<int>& s) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) out += (i ? " " : "") + g.names[s[i]];
  return out;
}

json trace_json(const Cfg& g, const Nfa& nfa, const ConflictTrace& t) {
  json j;
  j["state"] = t.state;
  j["lookahead"] = kstr::str(g, t.lookahead);
  j["actions"] = {t.a.str(g), t.b.str(g)};
  auto path = [&](const std::vector<int>& p) {
    json a = json::array();
    for (int v : p) a.push_back(nfa.vertex_str(g, v));
    return a;
  };
  j["path_a"] = path(t.path_a);
  j["path_b"] = path(t.path_b);
  j["prefix"] = terminals(g, t.prefix);
  j["complete"] = t.complete;
  if (t.complete) {
    j["input_a"] = terminals(g, t.display_a());
    j["input_b"] = terminals(g, t.display_b());
    j["raw_a"] = terminals(g, t.input_a);
    j["raw_b"] = terminals(g, t.input_b);
  } else {
    j["error"] = "CompletionNotFound: " + t.note;
  }
  return j;
}

json summary_json(const Compiled& c) {
  json j;
  j["terminals"] = c.g.num_terminals;
  j["symbols"] = c.g.num_symbols();
  j["flat_productions"] = c.flat.prods.size();
  j["productions"] = c.g.prods.size();
  json trig = json::array();
  for (int s : c.triggering) trig.push_back(c.inst.names[s]);
  j["cps_triggering"] = trig;
  j["partition"] = partition_name(c.config.xlr ? PartitionMode::Canonical : c.config.partition);
  j["follow_blocks"] = c.partition.total_blocks();
  j["nfa_vertices"] = c.nfa.size();
  j["dfa_states"] = c.dfa.size();
  j["conflicts"] = c.conflicts.size();
  json notes = json::array();
  for (auto& d : c.diags) notes.push_back(d.str());
  j["notes"] = notes;
  return j;
}

void print_summary(const Compiled& c) {
  for (auto& d : c.diags) std::cout << d.str() << "\n";
  std::cout << "terminals: " << c.g.num_terminals << "\n";
  std::cout << "productions: " << c.flat.prods.size() << " flat, " << c.g.prods.size() << " final\n";
  std::cout << "cps triggering:";
  if (c.triggering.empty()) std::cout << " none";
  for (int s : c.triggering) std::cout << " " << c.inst.names[s];
  std::cout << "\n";
  std::cout << "partition: " << partition_name(c.config.xlr ? PartitionMode::Canonical : c.config.partition)
            << ", " << c.partition.total_blocks() << " blocks\n";
  std::cout << "nfa vertices: " << c.nfa.size() << "\n";
  std::cout << "dfa states: " << c.dfa.size() << "\n";
  std::cout << "conflicts: " << c.conflicts.size() << "\n";
}

std::vector<std::string> conflict_lines(const Compiled& c) {
  std::vector<std::string> out;
  for (auto& cf : c.conflicts) {
    std::string line = "conflict in state " + std::to_string(cf.state) + " on " + kstr::str(c.g, cf.lookahead) + ":";
    for (auto& a : cf.actions) line += " [" + a.str(c.g) + "]";
    out.push_back(line);
  }
  return out;
}

// Traces use the LR automaton; RD conflicts are traced on the LR automaton of the same grammar.
std::vector<ConflictTrace> traces_for(const Compiled& c, const Nfa** nfa_out, std::unique_ptr<Compiled>& lr,
                                      const std::string& src) {
  if (!c.config.rd) {
    *nfa_out = &c.nfa;
    return trace_conflicts(c.g, c.nfa, c.dfa, c.conflicts);
  }
  PipelineConfig pc = c.config;
  pc.rd = false;
  lr = compile(src, pc);
  *nfa_out = &lr->nfa;
  return trace_conflicts(lr->g, lr->nfa, lr->dfa, lr->conflicts);
}

int cmd_compile(Options& o) {
  finish_config(o);
  auto c = run_pipeline(o);
  json report = summary_json(*c);
  int code = kOk;
  int xlr_t = 0;
  std::string trace_text, cert_text;
  if (o.config.xlr) {
    XlrCertificate cert = certify_xlr(c->g, c->nfa, c->dfa, o.config.depth_bound);
    cert_text = cert.str(c->g, c->nfa);
    report["certified"] = cert.certified;
    report["t"] = cert.t;
    if (!cert.certified) {
      report["reason"] = cert.reason;
      code = kConflicts;
    } else if (cert.t > o.config.t_max) {
      report["reason"] = "fork degree " + std::to_string(cert.t) + " exceeds --t-max";
      code = kConflicts;
    } else {
      xlr_t = static_cast<int>(cert.t);
    }
  } else if (!c->conflicts.empty()) {
    code = kConflicts;
    if (!o.no_trace) {
      std::unique_ptr<Compiled> lr;
      const Nfa* nfa = nullptr;
      auto traces = traces_for(*c, &nfa, lr, read_file(o.grammar));
      const Cfg& g = lr ? lr->g : c->g;
      json arr = json::array();
      for (auto& t : traces) {
        trace_text += t.str(g, *nfa);
        arr.push_back(trace_json(g, *nfa, t));
      }
      report["traces"] = arr;
    }
    if (o.config.rd) {
      report["rd_conflicts"] = conflict_lines(*c);
      for (auto& l : conflict_lines(*c)) trace_text += "rd " + l + "\n";
    }
  }
  if (code == kOk) {
    std::string out = o.out;
    if (out.empty()) {
      auto dot = o.grammar.find_last_of('.');
      auto slash = o.grammar.find_last_of('/');
      out = (dot != std::string::npos && (slash == std::string::npos || dot > slash) ? o.grammar.substr(0, dot)
                                                                                     : o.grammar) +
            ".xlrtab";
    }
    write_file(out, serialize(make_table(*c, xlr_t)));
    report["table"] = out;
  }
  if (o.format == "json") {
    std::cout << report.dump(2) << "\n";
  } else {
    print_summary(*c);
    std::cout << cert_text << trace_text;
    if (report.contains("reason")) std::cout << "error: " << report["reason"].get<std::string>() << "\n";
    if (report.contains("table")) std::cout << "table: " << report["table"].get<std::string>() << "\n";
  }
  return code;
}

int cmd_parse(Options& o) {
  ParseTable t;
  try {
    t = deserialize(read_file(o.table));
  } catch (const IoError&) {
    throw;
  }
  std::string text = read_file(o.input);
  auto toks = tokenize(t, text);
  ParseStats stats;
  stats.log = o.log_rd;
  ParseTree tree = parse(t, toks, o.config.t_max, &stats);
  for (auto& e : stats.events) spdlog::info("{}", e);
  spdlog::info("{} tokens, {} steps, peak {} instances", toks.size(), stats.steps, stats.peak_instances);
  if (o.dump == "sexpr") std::cout << dump_sexpr(t, tree, toks) << "\n";
  else if (o.dump == "json") std::cout << dump_json(t, tree, toks) << "\n";
  return kOk;
}

int cmd_stats(Options& o) {
  finish_config(o);
  std::string src = read_file(o.grammar);
  json report;
  std::string text;
  for (PartitionMode m : {PartitionMode::Canonical, PartitionMode::Optimized, PartitionMode::Coarsest}) {
    PipelineConfig pc = o.config;
    pc.partition = m;
    pc.xlr = false;
    auto c = compile(src, pc);
    json j;
    j["follow_blocks"] = c->partition.total_blocks();
    j["nfa_vertices"] = c->nfa.size();
    j["dfa_states"] = c->dfa.size();
    j["conflicts"] = c->conflicts.size();
    report[partition_name(m)] = j;
    text += std::string(partition_name(m)) + ": " + std::to_string(c->partition.total_blocks()) +
            " blocks, " + std::to_string(c->nfa.size()) + " NFA vertices, " + std::to_string(c->dfa.size()) +
            " DFA states, " + std::to_string(c->conflicts.size()) + " conflicts\n";
    if (m == PartitionMode::Optimized) {
      report["productions"] = c->g.prods.size();
      text = "productions: " + std::to_string(c->g.prods.size()) + "\n" + text;
    }
  }
  if (o.format == "json") std::cout << report.dump(2) << "\n";
  else std::cout << text;
  return kOk;
}

int cmd_trace(Options& o) {
  finish_config(o);
  auto c = run_pipeline(o);
  std::unique_ptr<Compiled> lr;
  const Nfa* nfa = nullptr;
  auto traces = traces_for(*c, &nfa, lr, read_file(o.grammar));
  const Cfg& g = lr ? lr->g : c->g;
  if (o.format == "json") {
    json arr = json::array();
    for (auto& t : traces) arr.push_back(trace_json(g, *nfa, t));
    std::cout << arr.dump(2) << "\n";
  } else {
    std::cout << "conflicts: " << c->conflicts.size() << "\n";
    for (auto& t : traces) std::cout << t.str(g, *nfa);
    if (c->config.rd)
      for (auto& l : conflict_lines(*c)) std::cout << "rd " << l << "\n";
  }
  return traces.empty() && c->conflicts.empty() ? kOk : kConflicts;
}

int cmd_certify(Options& o) {
  finish_config(o);
  o.config.xlr = true;
  o.config.rd = false;
  auto c = run_pipeline(o);
  XlrCertificate cert = certify_xlr(c->g, c->nfa, c->dfa, o.config.depth_bound);
  if (o.format == "json") {
    json j;
    j["certified"] = cert.certified;
    j["k"] = cert.k;
    j["t"] = cert.t;
    if (!cert.certified) j["reason"] = cert.reason;
    json arr = json::array();
    for (size_t i = 0; i < cert.conflicts.size(); ++i) {
      json x;
      x["state"] = cert.conflicts[i].state;
      x["lookahead"] = kstr::str(c->g, cert.conflicts[i].lookahead);
      if (i < cert.forks.size() && cert.forks[i].vertex >= 0) {
        x["fork_point"] = c->nfa.vertex_str(c->g, cert.forks[i].vertex);
        x["degree"] = cert.forks[i].degree;
      }
      if (i < cert.evidence.size()) x["join"] = join_result_name(cert.evidence[i].result);
      arr.push_back(x);
    }
    j["conflicts"] = arr;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << cert.str(c->g, c->nfa);
  }
  return cert.certified ? kOk : kConflicts;
}

int cmd_oracle(Options& o) {
  finish_config(o);
  o.config.xlr = false;
  o.config.cps = CpsMode::Off;
  o.config.partition = PartitionMode::Coarsest;
  auto c = run_pipeline(o);
  if (o.enumerate >= 0) {
    for (auto& s : enumerate(c->flat, o.enumerate)) std::cout << (s.empty() ? "ε" : terminals(c->flat, s)) << "\n";
    return kOk;
  }
  ParseTable t = make_table(*c);
  auto toks = tokenize(t, read_file(o.input));
  std::vector<int> w;
  for (auto& tk : toks) w.push_back(tk.sym);
  OracleResult r = earley(c->flat, w);
  std::cout << "member: " << (r.member ? "yes" : "no") << "\n";
  std::cout << "parses: " << r.count << "\n";
  if (r.tree) std::cout << tree_str(c->flat, *r.tree) << "\n";
  return r.member ? kOk : kParseError;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"xlrgen: LR/RD/XLR parser table generator"};
  app.require_subcommand(1);
  Options o;

  auto* compile_cmd = app.add_subcommand("compile", "compile a grammar to a parse table");
  add_pipeline_flags(compile_cmd, o);
  compile_cmd->add_option("-o,--output", o.out, "table path (default: grammar path with .xlrtab)");
  compile_cmd->add_flag("--no-trace", o.no_trace, "do not trace conflicts");

  auto* parse_cmd = app.add_subcommand("parse", "parse an input with a table");
  parse_cmd->add_option("table", o.table, "table file")->required();
  parse_cmd->add_option("input", o.input, "input file, - for stdin")->required();
  parse_cmd->add_option("--dump", o.dump, "tree dump")->check(CLI::IsMember({"sexpr", "json", "none"}));
  parse_cmd->add_option("--t-max", o.config.t_max, "XLR instance bound")->check(CLI::PositiveNumber);
  parse_cmd->add_flag("--log-rd", o.log_rd, "log Recur/Return events (XLRGEN_LOG=info)");

  auto* stats_cmd = app.add_subcommand("stats", "automaton sizes per partition");
  add_pipeline_flags(stats_cmd, o);
  auto* trace_cmd = app.add_subcommand("trace", "trace every conflict");
  add_pipeline_flags(trace_cmd, o);
  auto* certify_cmd = app.add_subcommand("certify", "certify the grammar XLR(k, t)");
  add_pipeline_flags(certify_cmd, o);
  auto* oracle_cmd = app.add_subcommand("oracle", "Earley membership and enumeration");
  add_pipeline_flags(oracle_cmd, o);
  oracle_cmd->add_option("input", o.input, "input file, - for stdin");
  oracle_cmd->add_option("--enumerate", o.enumerate, "list members up to this length")->check(CLI::Range(0, 12));
  oracle_cmd->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kIoError;
  }

  try {
    if (compile_cmd->parsed()) return cmd_compile(o);
    if (parse_cmd->parsed()) return cmd_parse(o);
    if (stats_cmd->parsed()) return cmd_stats(o);
    if (trace_cmd->parsed()) return cmd_trace(o);
    if (certify_cmd->parsed()) return cmd_certify(o);
    if (oracle_cmd->parsed()) return cmd_oracle(o);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const ParseFailure& e) {
    std::cerr << "error[" << e.stage() << "]: " << e.what() << "\n";
    return kParseError;
  } catch (const Error& e) {
    std::cerr << "error[" << e.stage() << "]: " << e.what() << "\n";
    std::string msg = e.what();
    return msg.rfind("InfiniteRecursion", 0) == 0 ? kConflicts : kIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  }
  return kOk;
}
