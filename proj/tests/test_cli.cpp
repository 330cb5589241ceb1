#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "resilsim/cli.hpp"

using namespace resilsim;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("resilsim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, RunWritesTraceAndReport) {
  const auto cfg = write("cr.json", scenario_cr().config.dump());
  const auto r = cli({"run", "--config", cfg, "--seed", "42", "--out", (dir_ / "o").string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "o" / "trace.txt"));
  EXPECT_EQ(slurp(dir_ / "o" / "report.txt"), r.out);
  EXPECT_NE(r.out.find("seed: 42"), std::string::npos);
}

TEST_F(CliTest, MetricsReproducesRunReport) {
  const auto cfg = write("x.json", scenario_crosslayer().config.dump());
  for (const auto* fmt : {"text", "structured"}) {
    const auto out = (dir_ / fmt).string();
    ASSERT_EQ(cli({"run", "--config", cfg, "--out", out, "--format", fmt}).code, 0);
    const auto report = std::string(fmt) == "text" ? "report.txt" : "report.json";
    const auto m = cli({"metrics", (fs::path(out) / "trace.txt").string(), "--format", fmt});
    EXPECT_EQ(m.code, 0);
    EXPECT_EQ(m.out, slurp(fs::path(out) / report)) << fmt;
  }
}

TEST_F(CliTest, MetricsRejectsTruncatedLine) {
  const auto trace = render_trace(run(scenario_cr().build()).trace);
  const auto cut = trace.substr(0, trace.find('\n', trace.find('\n') + 1) + 20);
  const auto r = cli({"metrics", write("t.txt", cut)});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos);
}

TEST_F(CliTest, MetricsOnEmptyTraceIsCensored) {
  const auto r = cli({"metrics", write("empty.txt", "")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("mttf_h: >= "), std::string::npos);
}

TEST_F(CliTest, SweepWritesOneReportPerSeedAndSummary) {
  const auto cfg = write("cr.json", scenario_cr().config.dump());
  const auto r = cli({"run", "--config", cfg, "--seeds", "1..5", "--out", (dir_ / "s").string()});
  EXPECT_EQ(r.code, 0);
  for (int s = 1; s <= 5; ++s) EXPECT_TRUE(fs::exists(dir_ / "s" / ("seed-" + std::to_string(s)) / "report.txt"));
  EXPECT_TRUE(fs::exists(dir_ / "s" / "summary.txt"));
  EXPECT_LT(r.out.find("\n1 "), r.out.find("\n5 "));
}

TEST_F(CliTest, EnvSeedIsDefault) {
  const auto cfg = write("cr.json", scenario_cr().config.dump());
  ::setenv("RESILSIM_SEED", "77", 1);
  const auto r = cli({"run", "--config", cfg});
  ::unsetenv("RESILSIM_SEED");
  EXPECT_NE(r.out.find("seed: 77"), std::string::npos);
}

TEST_F(CliTest, InputErrorsExitTwo) {
  EXPECT_EQ(cli({"run", "--config", (dir_ / "missing.json").string()}).code, 2);
  EXPECT_EQ(cli({"validate", "--config", write("bad.json", "{ not json")}).code, 2);
  EXPECT_EQ(cli({"run", "--config", write("s.json", R"({"system":{"id":"a","compose":"x"}})")}).code, 2);
  EXPECT_EQ(cli({"run", "--bogus"}).code, 2);
  EXPECT_EQ(cli({}).code, 2);
}

TEST_F(CliTest, ValidateExitCodes) {
  const auto full = cli({"validate", "--config", write("cr.json", scenario_cr().config.dump())});
  EXPECT_EQ(full.code, 0);
  for (const auto* axis : {"capability", "fault_model", "protection_domain", "interfaces", "implementation"}) {
    EXPECT_NE(full.out.find(axis), std::string::npos) << axis;
  }
  const auto partial = cli({"validate", "--config", write("rb.json", scenario_cr().without("heartbeat").dump())});
  EXPECT_EQ(partial.code, 1);
  EXPECT_NE(partial.out.find("missing: detection"), std::string::npos);
  const auto structured =
      cli({"validate", "--config", write("rb2.json", scenario_cr().without("heartbeat").dump()), "--format", "structured"});
  EXPECT_EQ(Json::parse(structured.out)["complete"], false);
}

TEST_F(CliTest, Catalog) {
  const auto r = cli({"catalog"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("requires external detection"), std::string::npos);
  EXPECT_NE(r.out.find("2N+1"), std::string::npos);
  const auto j = Json::parse(cli({"catalog", "--format", "structured"}).out);
  EXPECT_EQ(j.size(), 3u);
}

TEST_F(CliTest, ScenarioListExportRun) {
  const auto list = cli({"scenario"});
  EXPECT_NE(list.out.find("crosslayer"), std::string::npos);
  const auto exported = cli({"scenario", "due_abort", "--export"});
  EXPECT_EQ(Json::parse(exported.out), scenario_due_abort().config);
  const auto ran = cli({"scenario", "cr"});
  EXPECT_EQ(ran.code, 0);
  EXPECT_NE(ran.out.find("PASS"), std::string::npos);
  EXPECT_EQ(cli({"scenario", "nope"}).code, 2);
}
