#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hsmoney/cli/app.hpp"
#include "hsmoney/cli/experiments.hpp"

namespace hsm::cli {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hsmoney");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hsmoney_test_" + name);
  fs::remove_all(p);
  return p;
}

TEST(Catalog, AnchorsForKnownEntries) {
  EXPECT_EQ(find_experiment("innerprod-progress")->anchor, "Lemma \"innerprod\"");
  EXPECT_EQ(find_experiment("hybrid-search-budget")->anchor, "Theorem \"combined\"");
  EXPECT_NE(find_experiment("explicit-mint-verify")->anchor.find("explicit mini-scheme E"), std::string::npos);
  EXPECT_EQ(find_experiment("nope"), nullptr);
}

TEST(Catalog, EveryAnchorIsAKnownLabel) {
  const std::vector<std::string> labels = {
      "Lemma \"testworks\"", "hidden-subspace mini-scheme", "Theorem \"combined\"", "Lemma \"fixedpoint\"",
      "Theorem \"miniamp\"", "Lemma \"innerprod\"", "cloning experiments", "explicit mini-scheme E",
      "Lemma \"unique\"", "degree-1 attack", "Wiesner scheme", "Theorem \"wiesnerfix\"", "Theorem \"ampcomp\"",
      "Theorem \"compose\""};
  for (const auto& e : catalog()) {
    bool known = false;
    for (const auto& l : labels) known = known || e.anchor.rfind(l, 0) == 0;
    EXPECT_TRUE(known) << e.id << ": " << e.anchor;
  }
  const CliRun r = cli({"catalog"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("innerprod-progress  [Lemma \"innerprod\"]"), std::string::npos);
}

TEST(Cli, RoundtripHsmini) {
  const CliRun r = cli({"verify-roundtrip", "--scheme", "hsmini", "--n", "10", "--trials", "100", "--seed", "7"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("accepts  100/100"), std::string::npos) << r.out;
}

TEST(Cli, RoundtripOtherSchemes) {
  for (const char* s : {"money", "wiesner", "keyed"}) {
    const CliRun r = cli({"verify-roundtrip", "--scheme", s, "--n", "6", "--trials", "10"});
    EXPECT_EQ(r.code, kExitOk) << s << r.err;
  }
  const CliRun r = cli({"verify-roundtrip", "--scheme", "explicit", "--n", "8", "--beta", "10", "--trials", "5"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli({"--bogus"}).code, kExitUsage);
  EXPECT_EQ(cli({"run", "no-such-experiment"}).code, kExitUsage);
  EXPECT_EQ(cli({"run", "duality", "--n", "40"}).code, kExitUsage);
  EXPECT_EQ(cli({"run", "money-end-to-end", "--n", "7"}).code, kExitUsage);
  EXPECT_EQ(cli({"run", "duality", "--n", "abc"}).code, kExitUsage);
  EXPECT_EQ(cli({"verify-roundtrip", "--scheme", "nope"}).code, kExitUsage);
  EXPECT_EQ(cli({"run", "duality", "--trials", "0"}).code, kExitUsage);
}

TEST(Cli, DeterministicAcrossWorkers) {
  const CliRun a = cli({"run", "duality", "--n", "8", "--trials", "40", "--seed", "3", "--workers", "1"});
  const CliRun b = cli({"run", "duality", "--n", "8", "--trials", "40", "--seed", "3", "--workers", "4"});
  const CliRun c = cli({"run", "duality", "--n", "8", "--trials", "40", "--seed", "4", "--workers", "1"});
  EXPECT_EQ(a.code, kExitOk);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, WritesJsonLines) {
  const fs::path dir = temp_dir("jsonl");
  fs::create_directories(dir);
  const fs::path out = dir / "r.jsonl";
  const CliRun r = cli({"run", "half-vanishing", "--trials", "3", "--out", out.string()});
  EXPECT_EQ(r.code, kExitOk);
  std::ifstream in(out);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    EXPECT_NO_THROW((void)Json::parse(line));
    ++lines;
  }
  EXPECT_EQ(lines, 4);  // three trials and the summary record
  EXPECT_EQ(cli({"run", "half-vanishing", "--trials", "1", "--out", "/nonexistent/dir/x"}).code, kExitIo);
}

TEST(Cli, ConfigFileFlagsWin) {
  const fs::path dir = temp_dir("config");
  fs::create_directories(dir);
  const fs::path cfg = dir / "c.toml";
  std::ofstream(cfg) << "n = 6\ntrials = 7\n";
  const fs::path out = dir / "r.jsonl";
  ASSERT_EQ(cli({"--config", cfg.string(), "run", "duality", "--trials", "3", "--out", out.string()}).code, kExitOk);
  std::ifstream in(out);
  std::string line, last;
  int lines = 0;
  while (std::getline(in, line)) {
    last = line;
    ++lines;
  }
  EXPECT_EQ(lines, 4);
  EXPECT_EQ(Json::parse(last)["params"]["n"], 6);
}

TEST(Cli, ExplicitMintVerifyAndLowDegreeRefusal) {
  const fs::path dir = temp_dir("explicit");
  ASSERT_EQ(cli({"mint", "--scheme", "explicit", "--dir", dir.string(), "--n", "8", "--beta", "10"}).code, kExitOk);
  const CliRun v = cli({"verify", "--dir", dir.string()});
  EXPECT_EQ(v.code, kExitOk);
  EXPECT_EQ(v.out, "accept\n");

  const fs::path d1 = temp_dir("degree1");
  EXPECT_EQ(cli({"mint", "--scheme", "explicit", "--dir", d1.string(), "--d", "1"}).code, kExitUsage);
  ASSERT_EQ(cli({"mint", "--scheme", "explicit", "--dir", d1.string(), "--d", "1", "--eps", "0.1", "--beta", "6",
                 "--allow-low-degree"})
                .code,
            kExitOk);
  const CliRun a = cli({"attack-d1", "--dir", d1.string()});
  EXPECT_EQ(a.code, kExitOk);
  EXPECT_NE(a.out.find("\"status\":\"recovered\""), std::string::npos);
}

TEST(Cli, HsminiMintVerify) {
  const fs::path dir = temp_dir("hsmini");
  ASSERT_EQ(cli({"mint", "--scheme", "hsmini", "--dir", dir.string(), "--n", "8"}).code, kExitOk);
  EXPECT_EQ(cli({"verify", "--dir", dir.string()}).code, kExitOk);
  // A basis-state forgery fails the dual projection with probability 1 − 2^{-n/2}.
  std::ofstream(dir / "state.txt") << "n=8\n0 1 0\n";
  int rejects = 0;
  for (int s = 0; s < 10; ++s) rejects += cli({"verify", "--dir", dir.string(), "--seed", std::to_string(s)}).code == kExitFailed;
  EXPECT_GE(rejects, 7);
}

TEST(Cli, MissingNoteIsIoError) {
  EXPECT_EQ(cli({"verify", "--dir", "/nonexistent/note"}).code, kExitIo);
}

}  // namespace
}  // namespace hsm::cli
