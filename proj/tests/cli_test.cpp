#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "thrustwalk/cli.hpp"

namespace thrustwalk {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kScenarios = THRUSTWALK_SCENARIO_DIR;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "thrustwalk");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("thrustwalk_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  json read_json(const fs::path& p) {
    std::ifstream f(p);
    return json::parse(f);
  }

  fs::path dir_;
};

// Plain CSV split, independent of the library's parser.
std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream f(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(f, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

TEST_F(CliTest, BeamWalkExitsZeroAndWritesArtifacts) {
  const CliRun r = cli({"run", kScenarios + "/beam_walk.json", "--out", dir_.string()});
  EXPECT_EQ(r.code, kExitSuccess) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "log.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "plots" / "position.svg"));
  EXPECT_TRUE(fs::exists(dir_ / "plots" / "attitude_thrust.svg"));
  EXPECT_TRUE(fs::exists(dir_ / "plots" / "friction.svg"));
  const json s = read_json(dir_ / "summary.json");
  EXPECT_EQ(s["outcome"], "Success");
  for (double t : s["peak_thrust"]) EXPECT_LE(t, 20.0 + 1e-6);
}

TEST_F(CliTest, SummaryMatchesIndependentRecomputation) {
  ASSERT_EQ(cli({"run", kScenarios + "/flat_trot.json", "--out", dir_.string()}).code, kExitSuccess);
  const auto csv = read_csv(dir_ / "log.csv");
  ASSERT_GT(csv.size(), 2u);
  const auto& head = csv[0];
  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < head.size(); ++i)
      if (head[i] == name) return i;
    ADD_FAILURE() << "missing column " << name;
    return std::size_t{0};
  };
  auto val = [&](std::size_t row, const std::string& name) { return std::stod(csv[row][col(name)]); };

  const std::size_t n = csv.size() - 1;
  double roll = 0.0, lateral = 0.0;
  std::vector<double> thrust(4, 0.0), ratio(4, 0.0);
  for (std::size_t i = 1; i <= n; ++i) {
    roll = std::max(roll, std::abs(val(i, "roll")));
    lateral = std::max(lateral, std::abs(val(i, "y") - val(1, "y")));
    for (int leg = 0; leg < 4; ++leg) {
      thrust[leg] = std::max(thrust[leg], val(i, "thrust" + std::to_string(leg)));
      ratio[leg] = std::max(ratio[leg], val(i, "friction_ratio" + std::to_string(leg)));
    }
  }
  const double span = val(n, "t") - val(1, "t");
  const double speed = (val(n, "x") - val(1, "x")) / span;

  const json s = read_json(dir_ / "summary.json");
  EXPECT_NEAR(s["max_abs_roll"].get<double>(), roll, 1e-9);
  EXPECT_NEAR(s["max_abs_lateral_deviation"].get<double>(), lateral, 1e-9);
  EXPECT_NEAR(s["mean_forward_speed"].get<double>(), speed, 1e-9);
  EXPECT_NEAR(s["duration_logged"].get<double>(), span, 1e-9);
  for (int leg = 0; leg < 4; ++leg) {
    EXPECT_NEAR(s["peak_thrust"][leg].get<double>(), thrust[leg], 1e-9);
    EXPECT_NEAR(s["peak_friction_ratio"][leg].get<double>(), ratio[leg], 1e-9);
  }
  EXPECT_EQ(s["thrust_soft_limit_exceeded"].get<bool>(), *std::max_element(thrust.begin(), thrust.end()) > 7.0);
}

TEST_F(CliTest, PushWithoutThrustExitsTwo) {
  const CliRun r = cli({"run", kScenarios + "/push_no_thrust.json", "--out", dir_.string()});
  EXPECT_EQ(r.code, kExitFailure);
  const json s = read_json(dir_ / "summary.json");
  EXPECT_EQ(s["outcome"], "Failure");
  EXPECT_FALSE(s["failure"].is_null());
  EXPECT_LT(s["failure"]["t"].get<double>(), 3.0);
}

TEST_F(CliTest, MissingConfigExitsOne) {
  const CliRun r = cli({"run", (dir_ / "nope.json").string(), "--out", dir_.string()});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("ConfigInvalid"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir_ / "log.csv"));
}

TEST_F(CliTest, BadArgumentsAndHelp) {
  EXPECT_EQ(cli({}).code, kExitError);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitError);
  EXPECT_EQ(cli({"run", "--seed", "abc", "x.json"}).code, kExitError);
  const CliRun help = cli({"--help"});
  EXPECT_EQ(help.code, kExitSuccess);
  EXPECT_NE(help.out.find("run"), std::string::npos);
}

TEST_F(CliTest, NoThrustersFlagZeroesThrust) {
  std::ofstream(dir_ / "short.json") << R"({"schema_version":1,"name":"short","duration":1.0,
    "terrain":{"type":"flat"},"command":{"v_d":[0.2,0,0],"height":0.25}})";
  ASSERT_EQ(cli({"run", (dir_ / "short.json").string(), "--no-thrusters", "--out", (dir_ / "o").string()}).code,
            kExitSuccess);
  for (double t : read_json(dir_ / "o" / "summary.json")["peak_thrust"]) EXPECT_EQ(t, 0.0);
}

TEST_F(CliTest, OutputDirectoryFromEnvironmentAndSweep) {
  std::ofstream(dir_ / "a.json") << R"({"schema_version":1,"name":"a","duration":0.5})";
  std::ofstream(dir_ / "b.json") << R"({"schema_version":1,"name":"b","duration":0.5})";
  ::setenv("HUSKY_OUT_DIR", (dir_ / "env").string().c_str(), 1);
  const CliRun r = cli({"run", (dir_ / "a.json").string(), (dir_ / "b.json").string(), "--sweep"});
  ::unsetenv("HUSKY_OUT_DIR");
  EXPECT_EQ(r.code, kExitSuccess) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "env" / "a" / "summary.json"));
  EXPECT_TRUE(fs::exists(dir_ / "env" / "b" / "summary.json"));

  // Two scenarios with the same name would overwrite each other.
  const CliRun dup = cli({"run", (dir_ / "a.json").string(), (dir_ / "a.json").string(), "--out", dir_.string()});
  EXPECT_EQ(dup.code, kExitError);
}

TEST_F(CliTest, CompareIdenticalAndPushPair) {
  ASSERT_EQ(cli({"run", kScenarios + "/push_with_thrust.json", "--out", (dir_ / "with").string()}).code,
            kExitSuccess);
  ASSERT_EQ(cli({"run", kScenarios + "/push_no_thrust.json", "--out", (dir_ / "without").string()}).code,
            kExitFailure);
  const std::string a = (dir_ / "with" / "summary.json").string();
  const std::string b = (dir_ / "without" / "summary.json").string();

  const CliRun same = cli({"compare", a, a, "--json", (dir_ / "same.json").string()});
  ASSERT_EQ(same.code, kExitSuccess) << same.err;
  const json d = read_json(dir_ / "same.json")["deltas"];
  for (const auto& [key, v] : d.items()) {
    if (v.is_array()) {
      for (double x : v) EXPECT_EQ(x, 0.0) << key;
    } else if (v.is_number()) {
      EXPECT_EQ(v.get<double>(), 0.0) << key;
    }
  }

  const CliRun pair = cli({"compare", a, b, "--json", (dir_ / "pair.json").string()});
  ASSERT_EQ(pair.code, kExitSuccess) << pair.err;
  const json p = read_json(dir_ / "pair.json");
  EXPECT_TRUE(p["recovered"]["a"].get<bool>());
  EXPECT_FALSE(p["recovered"]["b"].get<bool>());
  EXPECT_NE(pair.out.find("recovered"), std::string::npos);
}

TEST_F(CliTest, CompareRejectsSchemaMismatchAndMissingFiles) {
  ASSERT_EQ(cli({"run", kScenarios + "/flat_trot.json", "--out", dir_.string()}).code, kExitSuccess);
  json s = read_json(dir_ / "summary.json");
  s["schema_version"] = 7;
  std::ofstream(dir_ / "v7.json") << s.dump();
  const CliRun r = cli({"compare", (dir_ / "summary.json").string(), (dir_ / "v7.json").string()});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("version 1"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("version 7"), std::string::npos) << r.err;

  EXPECT_EQ(cli({"compare", (dir_ / "missing.json").string(), (dir_ / "summary.json").string()}).code, kExitError);
}

}  // namespace
}  // namespace thrustwalk
