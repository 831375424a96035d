#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "floorstitch/io_util.h"
#include "floorstitch/scene.h"

namespace floorstitch {
namespace {

namespace fs = std::filesystem;

int RunCli(const std::string& args) {
  const std::string cmd =
      std::string(FLOORSTITCH_CLI) + " " + args + " > /dev/null 2> /dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) /
           ("floorstitch_cli_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  std::string P(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(Cli, GenerateIsDeterministic) {
  ASSERT_EQ(RunCli("generate -o " + P("a.json") + " --rooms 5 --seed 7"), 0);
  ASSERT_EQ(RunCli("generate -o " + P("b.json") + " --rooms 5 --seed 7"), 0);
  EXPECT_EQ(ReadFile(P("a.json")), ReadFile(P("b.json")));
  const Scene s = LoadScene(P("a.json"));
  EXPECT_GE(s.panoramas.size(), 5u);
  ASSERT_TRUE(s.gt_floorplan);
  EXPECT_EQ(s.gt_floorplan->size(), 5u);
}

TEST_F(Cli, BadArgumentsExitOne) {
  EXPECT_EQ(RunCli("generate -o " + P("x.json") + " --rooms 0"), 1);
  EXPECT_EQ(RunCli("generate"), 1);
  EXPECT_EQ(RunCli("frobnicate"), 1);
  EXPECT_EQ(RunCli("reconstruct --print-config --set robust.bogus=1"), 1);
}

TEST_F(Cli, BadInputFilesExitTwo) {
  WriteFileAtomic(P("broken.json"), "{\"format\": ");
  EXPECT_EQ(RunCli("reconstruct -s " + P("broken.json") + " -o " + P("out")), 2);
  EXPECT_EQ(RunCli("reconstruct -s " + P("missing.json") + " -o " + P("out")), 2);
}

TEST_F(Cli, ReconstructEvaluateRender) {
  ASSERT_EQ(RunCli("generate -o " + P("home.json") + " --rooms 6 --seed 3 --max-panos 2"), 0);
  ASSERT_EQ(RunCli("reconstruct -s " + P("home.json") + " -o " + P("rec") + " --threads 1"), 0);
  EXPECT_TRUE(fs::exists(P("rec/manifest.json")));
  ASSERT_EQ(RunCli("evaluate -s " + P("home.json") + " -r " + P("rec")), 0);
  const std::string report = ReadFile(P("rec/report.json"));
  EXPECT_NE(report.find("\"localization_pct\": 100.0"), std::string::npos) << report;

  ASSERT_EQ(RunCli("reconstruct -s " + P("home.json") + " -o " + P("st") +
                " --mode spanning_tree --no-axis-align --set floorplan.cell_size=0.05"),
            0);
  const std::string manifest = ReadFile(P("st/manifest.json"));
  EXPECT_NE(manifest.find("spanning_tree"), std::string::npos);

  ASSERT_EQ(RunCli("render -s " + P("home.json") + " --pano 0 -o " + P("floor.pgm") + " --mask " +
                P("mask.pgm") + " --dense --resolution 0.05"),
            0);
  EXPECT_EQ(ReadFile(P("floor.pgm")).substr(0, 2), "P5");
  EXPECT_TRUE(fs::exists(P("mask.pgm")));
  EXPECT_EQ(RunCli("render -s " + P("home.json") + " --pano 999 -o " + P("x.pgm")), 2);
}

TEST_F(Cli, EvaluateWithoutGroundTruthExitsTwo) {
  ASSERT_EQ(RunCli("generate -o " + P("home.json") + " --rooms 3 --seed 1"), 0);
  ASSERT_EQ(RunCli("reconstruct -s " + P("home.json") + " -o " + P("rec")), 0);
  Scene s = LoadScene(P("home.json"));
  s.gt_floorplan.reset();
  SaveScene(s, P("nogt.json"));
  EXPECT_EQ(RunCli("evaluate -s " + P("nogt.json") + " -r " + P("rec")), 2);
}

}  // namespace
}  // namespace floorstitch
