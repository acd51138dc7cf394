// xlrgen exit codes and outputs.
#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>

#include <json.hpp>

#include "corpus.hpp"

using namespace xlr::testing;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run xlrgen(const std::string& args) {
  Run r;
  FILE* p = popen((std::string(XLRGEN_PATH) + " " + args + " 2>&1").c_str(), "r");
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("xlrgen_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string path(const std::string& f) const { return (dir_ / f).string(); }
  void write(const std::string& f, const std::string& text) const {
    std::ofstream(path(f), std::ios::binary) << text;
  }
  std::filesystem::path dir_;
};

}  // namespace

TEST_F(Cli, CompileAndParse) {
  auto c = xlrgen("compile " + corpus_path("prec") + " -o " + path("p.tab"));
  EXPECT_EQ(c.code, 0) << c.out;
  EXPECT_NE(c.out.find("conflicts: 0"), std::string::npos);
  write("in.txt", "1+2*3");
  auto p = xlrgen("parse " + path("p.tab") + " " + path("in.txt"));
  EXPECT_EQ(p.code, 0);
  EXPECT_EQ(p.out, "(Add 1 (Mul 2 3))\n");
  auto j = xlrgen("parse " + path("p.tab") + " " + path("in.txt") + " --dump json");
  EXPECT_EQ(j.code, 0);
  EXPECT_NO_THROW(nlohmann::json::parse(j.out));
}

TEST_F(Cli, ConflictsExitTwoWithTrace) {
  auto c = xlrgen("compile " + corpus_path("g3") + " -o " + path("g.tab"));
  EXPECT_EQ(c.code, 2);
  EXPECT_NE(c.out.find("input a: C C A"), std::string::npos) << c.out;
  EXPECT_FALSE(std::filesystem::exists(path("g.tab")));
  auto t = xlrgen("trace " + corpus_path("g3") + " --format json");
  EXPECT_EQ(t.code, 2);
  auto v = nlohmann::json::parse(t.out);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0]["prefix"], "C");
}

TEST_F(Cli, XlrCompileAndParse) {
  auto c = xlrgen("compile " + corpus_path("g3") + " --xlr -o " + path("g.tab"));
  EXPECT_EQ(c.code, 0) << c.out;
  EXPECT_NE(c.out.find("certified XLR(1, 2)"), std::string::npos);
  write("in.txt", "c c b");
  auto p = xlrgen("parse " + path("g.tab") + " " + path("in.txt"));
  EXPECT_EQ(p.code, 0) << p.out;
  write("bad.txt", "c c c");
  EXPECT_EQ(xlrgen("parse " + path("g.tab") + " " + path("bad.txt")).code, 3);
  auto low = xlrgen("compile " + corpus_path("g3") + " --xlr --t-max 1 -o " + path("h.tab"));
  EXPECT_EQ(low.code, 2);
}

TEST_F(Cli, Certify) {
  EXPECT_EQ(xlrgen("certify " + corpus_path("g3")).code, 0);
  EXPECT_EQ(xlrgen("certify " + corpus_path("fork_cycle")).code, 2);
  auto j = xlrgen("certify " + corpus_path("g3") + " --format json");
  auto v = nlohmann::json::parse(j.out);
  EXPECT_EQ(v["t"], 2);
  EXPECT_EQ(v["certified"], true);
}

TEST_F(Cli, ErrorCodes) {
  EXPECT_EQ(xlrgen("compile " + path("missing.g")).code, 4);
  write("bad.g", "start S;\nrules { S -> ; }\n");
  EXPECT_EQ(xlrgen("compile " + path("bad.g")).code, 4);
  auto m = xlrgen("compile --rd " + corpus_path("mutual") + " -o " + path("m.tab"));
  EXPECT_EQ(m.code, 2);
  EXPECT_NE(m.out.find("InfiniteRecursion"), std::string::npos);
  write("junk.tab", "not a table");
  write("in.txt", "x");
  EXPECT_EQ(xlrgen("parse " + path("junk.tab") + " " + path("in.txt")).code, 4);
  EXPECT_EQ(xlrgen("frobnicate").code, 4);
}

TEST_F(Cli, StatsListsPartitions) {
  auto s = xlrgen("stats " + corpus_path("dangling_matched") + " --format json");
  EXPECT_EQ(s.code, 0);
  auto v = nlohmann::json::parse(s.out);
  EXPECT_LT(v["optimized"]["dfa_states"].get<int>(), v["canonical"]["dfa_states"].get<int>());
}

TEST_F(Cli, DefaultOutputPath) {
  std::filesystem::copy_file(corpus_path("simple"), path("simple.g"));
  EXPECT_EQ(xlrgen("compile " + path("simple.g")).code, 0);
  EXPECT_TRUE(std::filesystem::exists(path("simple.xlrtab")));
}

TEST_F(Cli, OracleEnumerate) {
  auto e = xlrgen("oracle " + corpus_path("g3") + " --enumerate 3");
  EXPECT_EQ(e.code, 0);
  EXPECT_EQ(e.out, "C C A\nC C B\n");
}
