#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "superspine/io.hpp"

namespace fs = std::filesystem;
using superspine::read_text;
namespace cli = superspine::cli;

namespace {

std::string config(const char* name) { return std::string(SUPERSPINE_CONFIG_DIR) + "/" + name + ".yaml"; }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("superspine_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    unsetenv(cli::kOutputEnv);
  }
  void TearDown() override {
    fs::remove_all(dir);
    unsetenv(cli::kOutputEnv);
  }
  std::string out(const std::string& leaf) const { return (dir / leaf).string(); }
  fs::path dir;
};

}  // namespace

TEST_F(CliTest, VerifyPassExitsZero) {
  EXPECT_EQ(cli::run({"verify", config("quadratic_homogeneous"), "--tests", "closed_form", "--out", out("v")}),
            cli::kPass);
  auto reports = nlohmann::json::parse(read_text(dir / "v" / "reports.json"));
  EXPECT_TRUE(reports[0]["pass"].get<bool>());
  EXPECT_TRUE(fs::exists(dir / "v" / "manifest.json"));
  EXPECT_FALSE(fs::exists(dir / "v.partial"));
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  EXPECT_EQ(cli::run({"verify", config("quadratic_homogeneous"), "--set", "grid.dt=-1", "--out", out("a")}),
            cli::kConfigError);
  EXPECT_EQ(cli::run({"sample", config("quadratic_homogeneous"), "--set", "no.such=1", "--out", out("b")}),
            cli::kConfigError);
  EXPECT_EQ(cli::run({"frobnicate"}), cli::kConfigError);
  // closed_form on a spatial model is not applicable.
  EXPECT_EQ(cli::run({"verify", config("quadratic_spatial"), "--tests", "closed_form", "--out", out("c")}),
            cli::kConfigError);
  EXPECT_FALSE(fs::exists(dir / "a"));
}

TEST_F(CliTest, ExhaustedBudgetExitsThree) {
  EXPECT_EQ(cli::run({"sample", config("quadratic_homogeneous"), "--kind", "conditioned", "--h", "3",
                      "--set", "mc.attempt_budget=2", "--replicas", "5", "--out", out("s")}),
            cli::kInfeasible);
}

TEST_F(CliTest, RerunIsByteIdentical) {
  ASSERT_EQ(cli::run({"sample", config("quadratic_homogeneous"), "--kind", "williams", "--replicas", "4",
                      "--set", "grid.dt=0.01", "--out", out("first")}),
            cli::kPass);
  ASSERT_EQ(cli::run({"rerun", out("first") + "/manifest.json", "--out", out("second")}), cli::kPass);
  for (const char* f : {"trajectories.csv", "events.csv", "spine.csv", "summary.json", "manifest.json"}) {
    EXPECT_EQ(read_text(dir / "first" / f), read_text(dir / "second" / f)) << f;
  }
}

TEST_F(CliTest, WorkerCountDoesNotChangeOutput) {
  ASSERT_EQ(cli::run({"sample", config("quadratic_homogeneous"), "--replicas", "6", "--workers", "1",
                      "--out", out("w1")}),
            cli::kPass);
  ASSERT_EQ(cli::run({"sample", config("quadratic_homogeneous"), "--replicas", "6", "--workers", "3",
                      "--out", out("w3")}),
            cli::kPass);
  EXPECT_EQ(read_text(dir / "w1" / "trajectories.csv"), read_text(dir / "w3" / "trajectories.csv"));
}

TEST_F(CliTest, OutputDirectoryPrecedence) {
  setenv(cli::kOutputEnv, out("env").c_str(), 1);
  ASSERT_EQ(cli::run({"solve", config("quadratic_homogeneous")}), cli::kPass);
  EXPECT_TRUE(fs::exists(dir / "env" / "profile.txt"));
  ASSERT_EQ(cli::run({"solve", config("quadratic_homogeneous"), "--out", out("flag")}), cli::kPass);
  EXPECT_TRUE(fs::exists(dir / "flag" / "profile.txt"));
}

TEST_F(CliTest, StableWilliamsHasOnlyJumpImmigration) {
  ASSERT_EQ(cli::run({"sample", config("stable_homogeneous"), "--kind", "williams", "--replicas", "3",
                      "--out", out("st")}),
            cli::kPass);
  auto events = superspine::read_csv(dir / "st" / "events.csv");
  ASSERT_FALSE(events.rows.empty());
  for (const auto& row : events.rows) EXPECT_EQ(row[events.column("kind")], "jump");
}

TEST_F(CliTest, PlotWritesSvg) {
  ASSERT_EQ(cli::run({"sample", config("quadratic_homogeneous"), "--replicas", "20", "--out", out("p")}),
            cli::kPass);
  ASSERT_EQ(cli::run({"plot", "--input", out("p"), "--out", out("plots")}), cli::kPass);
  EXPECT_TRUE(fs::exists(dir / "plots" / "mass_ecdf.svg"));
  EXPECT_TRUE(fs::exists(dir / "plots" / "dispersion.svg"));
}

TEST_F(CliTest, RuntimeErrorExitsOne) {
  fs::create_directories(dir / "empty");
  EXPECT_EQ(cli::run({"plot", "--input", out("empty"), "--out", out("plots")}), cli::kFail);
  EXPECT_FALSE(fs::exists(dir / "plots"));
}
