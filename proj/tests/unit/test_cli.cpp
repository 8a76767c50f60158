#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "config.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = engage::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, ExpandSingleDoiPrintsEightUrls) {
  auto r = run({"expand", "--doi", "10.1371/journal.pone.0150000"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "https://doi.org/10.1371/journal.pone.0150000\n"
            "http://dx.doi.org/10.1371/journal.pone.0150000\n"
            "http://journals.plos.org/plosone/article?id=10.1371/journal.pone.0150000\n"
            "http://journals.plos.org/plosone/article/authors?id=10.1371/journal.pone.0150000\n"
            "http://journals.plos.org/plosone/article/metrics?id=10.1371/journal.pone.0150000\n"
            "http://journals.plos.org/plosone/article/comments?id=10.1371/journal.pone.0150000\n"
            "http://journals.plos.org/plosone/article/related?id=10.1371/journal.pone.0150000\n"
            "http://journals.plos.org/plosone/article/file?id=10.1371/journal.pone.0150000&type=printable\n");
}

TEST(Cli, UsageErrorsExitTwo) {
  for (std::vector<std::string> args :
       {std::vector<std::string>{}, {"frobnicate"}, {"harvest", "--source", "myspace"},
        {"analyze", "median"}, {"corpus", "--from", "2015-13-01", "--to", "2016-01-01"},
        {"expand", "--doi", "journal.pone.0150000"}}) {
    auto r = run(args);
    EXPECT_EQ(r.code, engage::cli::kExitUsage) << (args.empty() ? "" : args[0]);
    EXPECT_TRUE(r.out.empty());
    EXPECT_FALSE(r.err.empty());
  }
}

TEST(Cli, HelpExitsZero) {
  auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("harvest"), std::string::npos);
}

TEST(Cli, OperationalErrorNamesStage) {
  auto dir = fs::temp_directory_path() / "engage-cli-empty";
  fs::remove_all(dir);
  auto r = run({"--data-dir", dir.string(), "resolve", "--snapshot", "2017-10-09"});
  EXPECT_EQ(r.code, engage::cli::kExitOperational);
  EXPECT_NE(r.err.find("resolve"), std::string::npos);
  auto a = run({"--data-dir", dir.string(), "analyze", "coverage", "--snapshot", "2017-10-09"});
  EXPECT_EQ(a.code, engage::cli::kExitOperational);
}

TEST(Config, DefaultsAndFileOverlay) {
  auto d = engage::cli::Config::defaults();
  EXPECT_EQ(d.binning_k, 5);
  EXPECT_EQ(d.binning_width, 0.11);
  EXPECT_EQ(d.coverage_rule, engage::CoverageRule::shares_only);
  EXPECT_EQ(d.excluded_disciplines, (std::vector<std::string>{"Arts", "Humanities"}));
  EXPECT_EQ(d.parallel, 4);
  EXPECT_EQ(d.source("graph").credentials_env, "FB_GRAPH_TOKEN");

  auto dir = fs::temp_directory_path() / "engage-config";
  fs::create_directories(dir);
  std::ofstream(dir / "c.json") << R"({"data_dir": "d", "binning": {"k": 3},
    "sources": {"graph": {"mode": "mock", "path": "w.json"}}, "retry": {"base_delay_ms": 7}})";
  auto c = engage::cli::Config::load(dir / "c.json");
  EXPECT_EQ(c.data_dir, dir / "d");
  EXPECT_EQ(c.binning_k, 3);
  EXPECT_EQ(c.binning_width, 0.11);
  EXPECT_EQ(c.source("graph").mode, engage::cli::SourceMode::mock);
  EXPECT_EQ(c.source("graph").path, (dir / "w.json").string());
  EXPECT_EQ(c.retry.base_delay.count(), 7);
  EXPECT_NE(c.hash(), d.hash());
  EXPECT_EQ(c.hash(), engage::cli::Config::load(dir / "c.json").hash());
  std::ofstream(dir / "bad.json") << R"({"coverage_rule": "vibes"})";
  EXPECT_THROW(engage::cli::Config::load(dir / "bad.json"), engage::Error);
  fs::remove_all(dir);
}
