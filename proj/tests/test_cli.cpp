#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "svito/config.hpp"
#include "svito/runner.hpp"

using namespace svito;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string output;
};

Outcome cli(const std::string& args) {
  const std::string cmd = std::string(SVITO_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  Outcome out;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) out.output += buf;
  const int status = pclose(pipe);
  out.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root = fs::temp_directory_path() / ("svito_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(root);
    fs::create_directories(root);
  }
  void TearDown() override { fs::remove_all(root); }

  fs::path write_config(const std::string& name, const std::string& text) {
    const auto p = root / name;
    std::ofstream(p) << text;
    return p;
  }
  std::vector<fs::path> runs() const {
    std::vector<fs::path> out;
    if (fs::exists(root / "out"))
      for (const auto& e : fs::directory_iterator(root / "out")) out.push_back(e.path());
    return out;
  }
  std::string out_flag() const { return "--out " + (root / "out").string(); }

  fs::path root;
};

}  // namespace

TEST(Config, DefaultsAndHashAreStable) {
  const auto a = ExperimentConfig::make("algebra-check", {{"seed", 1}});
  const auto b = ExperimentConfig::make("algebra-check", {{"seed", 1}, {"trials", 10000}});
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  EXPECT_NE(a.hash(), ExperimentConfig::make("algebra-check", {{"seed", 2}}).hash());
}

TEST(Config, RoundTripsThroughSerialization) {
  const auto a = ExperimentConfig::make("bsde-solve", {{"driver", {{"form", "linear"}, {"b", 0.25}}}, {"N", 32}});
  const auto b = ExperimentConfig::parse(a.canonical());
  EXPECT_EQ(a.canonical(), b.canonical());
  EXPECT_EQ(b.params["driver"]["b"].get<double>(), 0.25);
  EXPECT_EQ(b.params["driver"]["form"], "linear");
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(ExperimentConfig::make("algebra-check", {{"trails", 5}}), UsageError);
  EXPECT_THROW(ExperimentConfig::make("bsde-solve", {{"driver", {{"shape", "x"}}}}), UsageError);
  EXPECT_THROW(ExperimentConfig::make("bsde-solve", {{"tol", 0.0}}), UsageError);
  EXPECT_THROW(ExperimentConfig::make("bsde-solve", {{"N", 0}}), UsageError);
  EXPECT_THROW(ExperimentConfig::make("bsde-solve", {{"N", "64"}}), UsageError);
  EXPECT_THROW(ExperimentConfig::make("teleport", Json::object()), UsageError);
  EXPECT_THROW(ExperimentConfig::parse(R"({"schema_version": 2, "command": "accept-all"})"), UsageError);
  EXPECT_THROW(ExperimentConfig::parse(R"({"command": "accept-all"})"), UsageError);
  EXPECT_THROW(ExperimentConfig::parse(R"({"schema_version": 1, "command": "accept-all", "extra": 1})"), UsageError);
  try {
    ExperimentConfig::parse("{\n  \"schema_version\": 1,\n  \"command\": ,\n}");
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST_F(CliTest, AlgebraCheckPassesAndRerunIsCompared) {
  const auto r = cli("algebra-check --trials 10000 --seed 1 " + out_flag());
  EXPECT_EQ(r.code, 0) << r.output;
  ASSERT_EQ(runs().size(), 1u);
  const auto dir = runs()[0];
  EXPECT_EQ(dir.filename().string().rfind("algebra-check-", 0), 0u);
  EXPECT_EQ(first_line(slurp(dir / "algebra.csv")), "property,trials,failures,worst");
  EXPECT_NE(slurp(dir / "summary.txt").find("verdict: pass"), std::string::npos);
  const auto before = slurp(dir / "algebra.csv");
  const auto again = cli("algebra-check --trials 10000 --seed 1 " + out_flag());
  EXPECT_EQ(again.code, 0) << again.output;
  EXPECT_NE(again.output.find("existing run, compared"), std::string::npos);
  EXPECT_EQ(slurp(dir / "algebra.csv"), before);
  EXPECT_EQ(runs().size(), 1u);
}

TEST_F(CliTest, ZeroToleranceIsUsageErrorWithoutOutput) {
  const auto cfg = write_config("bad.json", R"({"schema_version": 1, "command": "bsde-solve", "params": {"tol": 0}})");
  const auto r = cli("bsde-solve --config " + cfg.string() + " " + out_flag());
  EXPECT_EQ(r.code, 64) << r.output;
  EXPECT_TRUE(runs().empty());
}

TEST_F(CliTest, MalformedConfigReportsLine) {
  const auto cfg = write_config("bad.json", "{\n \"schema_version\": 1,\n \"command\": \"bsde-solve\",\n \"params\": {\"N\": }\n}");
  const auto r = cli("bsde-solve --config " + cfg.string() + " " + out_flag());
  EXPECT_EQ(r.code, 64);
  EXPECT_NE(r.output.find("line 4"), std::string::npos) << r.output;
  EXPECT_TRUE(runs().empty());
}

TEST_F(CliTest, UnknownFieldAndBadFlagsAreUsageErrors) {
  const auto cfg = write_config("bad.json", R"({"schema_version": 1, "command": "bsde-solve", "params": {"driver": {"slope": 1}}})");
  const auto r = cli("bsde-solve --config " + cfg.string() + " " + out_flag());
  EXPECT_EQ(r.code, 64);
  EXPECT_NE(r.output.find("driver.slope"), std::string::npos) << r.output;
  EXPECT_EQ(cli("isometry --paths ten " + out_flag()).code, 64);
  EXPECT_EQ(cli("isometry --bogus 1 " + out_flag()).code, 64);
  EXPECT_EQ(cli("bsde-solve " + out_flag()).code, 64);
  EXPECT_EQ(cli("").code, 64);
  EXPECT_TRUE(runs().empty());
}

TEST_F(CliTest, BsdeSolveWritesReports) {
  const auto cfg = write_config("free.json", R"({"schema_version": 1, "command": "bsde-solve",
    "params": {"terminal": {"generator": "identity", "alpha": 0, "beta": 1}, "N": 16, "M": 2000, "solution_paths": 3}})");
  const auto r = cli("bsde-solve --config " + cfg.string() + " " + out_flag());
  EXPECT_EQ(r.code, 0) << r.output;
  ASSERT_EQ(runs().size(), 1u);
  const auto dir = runs()[0];
  EXPECT_EQ(first_line(slurp(dir / "picard_report.csv")), "iter,u_p,v_p,ratio_u,ratio_v,envelope");
  const auto sol = slurp(dir / "solution.csv");
  EXPECT_EQ(first_line(sol), "node,path,y_lo,y_hi,z_lo,z_hi");
  EXPECT_EQ(std::count(sol.begin(), sol.end(), '\n'), 1 + 17 * 3);
  EXPECT_NE(slurp(dir / "summary.txt").find("picard: converged"), std::string::npos);
  EXPECT_EQ(ExperimentConfig::load((dir / "config.json").string()).hash(), dir.filename().string().substr(11));
}

TEST_F(CliTest, InconclusiveUniquenessExitsThree) {
  const auto cfg = write_config("probe.json", R"({"schema_version": 1, "command": "bsde-solve",
    "params": {"terminal": {"generator": "zero", "alpha": 0, "beta": 0}, "N": 8, "M": 200, "max_iter": 1,
               "uniqueness_inits": ["zero", "brownian"]}})");
  const auto r = cli("bsde-solve --config " + cfg.string() + " " + out_flag());
  EXPECT_EQ(r.code, 3) << r.output;
  EXPECT_NE(r.output.find("uniqueness: inconclusive"), std::string::npos);
}

TEST_F(CliTest, ItoVerifyAndIsometry) {
  const auto r = cli("ito-verify --phi square --x0 0 --f [0.5,1] --g [0,0] --steps 64 --paths 50 --selections 8 --seed 3 " + out_flag());
  EXPECT_EQ(r.code, 0) << r.output;
  const auto i = cli("isometry --set [0,1] --paths 20000 --steps 32 --selections 4 --seed 2 " + out_flag());
  EXPECT_EQ(i.code, 0) << i.output;
  ASSERT_EQ(runs().size(), 2u);
  for (const auto& dir : runs()) {
    if (dir.filename().string().rfind("ito-verify", 0) == 0)
      EXPECT_EQ(first_line(slurp(dir / "ito_report.csv")), "node,max_hausdorff,threshold,pass,rms_hausdorff");
    else
      EXPECT_EQ(first_line(slurp(dir / "report.csv")), "check,node,path,lhs_lo,lhs_hi,rhs_lo,rhs_hi,hausdorff");
  }
}

TEST_F(CliTest, BrownianAndSelectionExports) {
  EXPECT_EQ(cli("brownian --steps 4 --paths 2 --seed 5 " + out_flag()).code, 0);
  EXPECT_EQ(cli("selections --set [0,1]x[-1,1] --steps 4 --paths 2 --selections 4 " + out_flag()).code, 0);
  for (const auto& dir : runs()) {
    if (dir.filename().string().rfind("brownian", 0) == 0) {
      const auto csv = slurp(dir / "increments.csv");
      EXPECT_EQ(first_line(csv), "path,step,dim,dW");
      EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 8);
    } else {
      EXPECT_EQ(first_line(slurp(dir / "selections.csv")), "selection,step,path,value,member?");
    }
  }
}

TEST_F(CliTest, ChangedOutputsAreReportedNotOverwritten) {
  ASSERT_EQ(cli("brownian --steps 4 --paths 2 --seed 5 " + out_flag()).code, 0);
  const auto dir = runs()[0];
  std::ofstream(dir / "increments.csv") << "tampered\n";
  const auto r = cli("brownian --steps 4 --paths 2 --seed 5 " + out_flag());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("increments.csv"), std::string::npos);
  EXPECT_EQ(slurp(dir / "increments.csv"), "tampered\n");
}

TEST(Config, SampleConfigsValidate) {
  std::size_t count = 0;
  for (const auto& e : fs::directory_iterator(SVITO_CONFIG_DIR)) {
    if (e.path().extension() != ".json") continue;
    EXPECT_NO_THROW(ExperimentConfig::load(e.path().string())) << e.path();
    ++count;
  }
  EXPECT_GE(count, 4u);
}
