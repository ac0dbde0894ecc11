#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <unistd.h>

#include "cli.hpp"
#include "mineig/fixtures.hpp"
#include "mineig/io.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = mineig::cli::cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("mineig-cli-" + std::to_string(::getpid()));
    fs::create_directories(dir_);
    const CliRun r = run({"fixtures", dir_.string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }
  static std::string path(const std::string& name) { return (dir_ / name).string(); }
  static void write(const std::string& name, const std::string& text) { std::ofstream(path(name)) << text; }

  static fs::path dir_;
};

fs::path Cli::dir_;

}  // namespace

TEST_F(Cli, BruteOnIntegralityGapInstance) {
  const CliRun r = run({"brute", path("appendix-a.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["value"].get<double>(), 0.0);
  EXPECT_EQ(j["bases_examined"].get<int>(), 2);
}

TEST_F(Cli, RelaxWithEmptySeed) {
  const CliRun r = run({"relax", path("appendix-a.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["value"].get<double>(), 0.5, 1e-6);
  EXPECT_TRUE(j["converged"].get<bool>());
  // A dependent seed is a usage error.
  EXPECT_EQ(run({"relax", path("appendix-a.json"), "--seed-set", "3,4"}).code, 3);
}

TEST_F(Cli, SolveIsDeterministic) {
  const CliRun a = run({"solve", path("planted-d2-uniform-1.json"), "--seed", "42", "--ell", "1"});
  const CliRun b = run({"solve", path("planted-d2-uniform-1.json"), "--seed", "42", "--ell", "1"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto rep = mineig::parse_report(a.out);
  EXPECT_EQ(rep.rng_seed, 42U);
  const CliRun other = run({"solve", path("planted-d2-uniform-1.json"), "--seed", "42", "--ell", "1", "--threads", "3"});
  EXPECT_EQ(other.out, a.out);
}

TEST_F(Cli, SolveWritesFileAndTrace) {
  const CliRun r = run({"solve", path("appendix-a.json"), "--ell", "2", "--out", path("rep.json"), "--trace",
                     path("trace.jsonl"), "--timing", "--brute"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream rep(path("rep.json"));
  const auto j = nlohmann::json::parse(rep);
  EXPECT_EQ(j["best_value"].get<double>(), 0.0);
  EXPECT_TRUE(j.contains("wall_time_seconds"));
  EXPECT_EQ(j["brute_force_value"].get<double>(), 0.0);
  std::ifstream trace(path("trace.jsonl"));
  std::string line;
  std::size_t lines = 0;
  while (std::getline(trace, line)) {
    EXPECT_NO_THROW((void)nlohmann::json::parse(line));
    ++lines;
  }
  EXPECT_GT(lines, 0U);
}

TEST_F(Cli, RoundAndLocalSearch) {
  write("point.json", R"({"x":[1,1,0.5,0.5]})");
  const CliRun r = run({"round", path("appendix-a.json"), "--point", path("point.json"), "--seed", "5", "--trace",
                     path("est.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["objective_value"].get<double>(), 0.0);
  write("outside.json", R"({"x":[1,1,1,1]})");
  EXPECT_EQ(run({"round", path("appendix-a.json"), "--point", path("outside.json")}).code, 3);

  const CliRun ls = run({"localsearch", path("planted-d3-uniform-1.json"), "--ell", "4"});
  ASSERT_EQ(ls.code, 0) << ls.err;
  EXPECT_EQ(nlohmann::json::parse(ls.out)["seed"].size(), 4U);
}

TEST_F(Cli, SplitInstance) {
  const CliRun r = run({"ks", path("ks-d2.json"), "--ell", "1"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.contains("certificate"));
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, 3);
  EXPECT_EQ(run({"solve"}).code, 3);
  EXPECT_EQ(run({"solve", path("appendix-a.json"), "--no-such-flag"}).code, 3);
  EXPECT_EQ(run({"solve", path("appendix-a.json"), "--epsilon", "1.5"}).code, 3);
  EXPECT_EQ(run({"--help"}).code, 0);
  write("bad.json", R"({"format_version":1,"d":2,"vectors":[],"matroid":{"type":"uniform","rank":1}})");
  const CliRun bad = run({"brute", path("bad.json")});
  EXPECT_EQ(bad.code, 3);
  EXPECT_NE(bad.err.find("/vectors"), std::string::npos);
  // Unreadable input counts as a usage error.
  EXPECT_EQ(run({"brute", path("missing.json")}).code, 3);
  // Not converged within one iteration.
  const mineig::Instance odd = mineig::make_instance(
      mineig::Vectorset({{0.095, 1.25, -0.931}, {0.992, -0.259, -0.262}, {1.9, 0.158, -0.043}, {0.729, 1.127, -0.031}, {0.588, -0.974, -0.367}, {-0.438, -1.332, -1.509}, {-1.627, -0.239, -0.172}, {-0.32, 0.069, -1.336}, {-0.079, 0.238, 0.751}}),
      std::make_shared<mineig::UniformMatroid>(9, 4));
  write("odd.json", mineig::write_instance(odd));
  EXPECT_EQ(run({"relax", path("odd.json"), "--max-iters", "1", "--tol", "1e-12"}).code, 4);
}
