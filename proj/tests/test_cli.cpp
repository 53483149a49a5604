// Copyright 2026 The topomap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "topomap/cli.hpp"
#include "topomap/experiments.hpp"
#include "topomap/platform.hpp"

namespace
{

namespace fs = std::filesystem;
using topomap::run_cli;

struct Run
{
  int code;
  std::string out;
  std::string err;
};

Run cli(std::initializer_list<std::string> args)
{
  std::vector<std::string> owned{"topomap"};
  owned.insert(owned.end(), args);
  std::vector<const char *> argv;
  for (const auto & a : owned) {
    argv.push_back(a.c_str());
  }
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string & name)
{
  return std::string(TOPOMAP_DATA_DIR) + "/" + name;
}

std::string slurp(const fs::path & p)
{
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test
{
protected:
  void SetUp() override
  {
    dir_ = fs::temp_directory_path() /
      ("topomap_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    ::unsetenv("TOPOMAP_SEED");
  }

  void TearDown() override
  {
    ::unsetenv("TOPOMAP_SEED");
    fs::remove_all(dir_);
  }

  std::string path(const std::string & name) const {return (dir_ / name).string();}

  std::string small_grid()
  {
    const std::string p = path("grid.json");
    std::ofstream(p) << R"({"experiment": "pubsub_grid", "publishers": ["HW", "SW"],
      "sizes": [10000, 1000000], "hw_subscriber_counts": [2, 8], "repetitions": 5,
      "period_us": 1e7, "seed": 7})";
    return p;
  }

  fs::path dir_;
};

TEST_F(CliTest, MapReportsCrossingsByStage)
{
  const auto r = cli({"map", "--graph", data("example_graph.json"), "--out", path("m.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("crossings by stage: all-SMT 10, SMT+HMT 8, final 3"), std::string::npos)
    << r.out;
  const auto j = nlohmann::json::parse(slurp(path("m.json")));
  EXPECT_EQ(j.at("crossings_by_stage").at("all_smt"), 10);
  EXPECT_EQ(j.at("crossings_by_stage").at("smt_hmt"), 8);
  EXPECT_EQ(j.at("crossings_by_stage").at("final"), 3);
}

TEST_F(CliTest, MapWithoutNodeMappingIsInputError)
{
  std::ofstream(path("g.json")) << R"({"nodes": [{"id": "a"}], "topics": [],
    "publishes": [], "subscribes": []})";
  const auto r = cli({"map", "--graph", path("g.json"), "--out", path("m.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("node_mapping"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(path("m.json")));
}

TEST_F(CliTest, InputErrors)
{
  EXPECT_EQ(cli({"map", "--graph", path("missing.json"), "--out", path("m.json")}).code, 2);
  EXPECT_EQ(cli({"map", "--out", path("m.json")}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(
    cli({"map", "--graph", data("example_graph.json"), "--policy", "best", "--out", path("m.json")})
    .code, 2);
  std::ofstream(path("bad.json")) << "{\"nodes\": [";
  EXPECT_EQ(cli({"map", "--graph", path("bad.json"), "--out", path("m.json")}).code, 2);
  EXPECT_EQ(
    cli({"compare", "--scenario", small_grid(), "--policies", "smt", "--out", path("c.csv")})
    .code, 2);
}

TEST_F(CliTest, ValidationErrorExitCode)
{
  // Well formed JSON, but the subscriber does not exist.
  std::ofstream(path("g.json")) << R"({"nodes": [{"id": "a"}],
    "topics": [{"id": "t", "message_size_bytes": 1, "publish_rate_hz": 1}],
    "publishes": [{"node": "a", "topic": "t"}], "subscribes": [{"topic": "t", "node": "ghost"}],
    "node_mapping": {"a": "SW"}})";
  const auto r = cli({"map", "--graph", path("g.json"), "--out", path("m.json")});
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST_F(CliTest, IdenticalPoliciesGiveUnitSpeedup)
{
  const auto r = cli(
    {"compare", "--scenario", small_grid(), "--policies", "smt,smt", "--out", path("c.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = topomap::parse_comparison_csv(slurp(path("c.csv")));
  ASSERT_EQ(rows.size(), 8u);
  for (const auto & row : rows) {
    EXPECT_EQ(row.speedup_hw, 1.0);
    EXPECT_EQ(row.speedup_sw, 1.0);
  }
}

TEST_F(CliTest, CompareIsDeterministicAcrossThreadCounts)
{
  const std::string grid = small_grid();
  ASSERT_EQ(cli({"compare", "--scenario", grid, "--out", path("a.csv"), "--threads", "1"}).code, 0);
  ASSERT_EQ(cli({"compare", "--scenario", grid, "--out", path("b.csv"), "--threads", "4"}).code, 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
}

TEST_F(CliTest, SeedEnvironmentOverride)
{
  const std::string grid = small_grid();
  ::setenv("TOPOMAP_SEED", "7", 1);
  ASSERT_EQ(cli({"compare", "--scenario", grid, "--out", path("a.csv")}).code, 0);
  ::unsetenv("TOPOMAP_SEED");
  ASSERT_EQ(cli({"compare", "--scenario", grid, "--out", path("b.csv")}).code, 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  ::setenv("TOPOMAP_SEED", "8", 1);
  ASSERT_EQ(cli({"compare", "--scenario", grid, "--out", path("c.csv")}).code, 0);
  EXPECT_NE(slurp(path("a.csv")), slurp(path("c.csv")));
  ::setenv("TOPOMAP_SEED", "x", 1);
  EXPECT_EQ(cli({"compare", "--scenario", grid, "--out", path("d.csv")}).code, 2);
}

TEST_F(CliTest, ReportWritesFourSeries)
{
  ASSERT_EQ(cli({"compare", "--scenario", small_grid(), "--out", path("c.csv")}).code, 0);
  const auto r = cli({"report", "--in", path("c.csv"), "--out-dir", path("plots")});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char * name : {"hw_to_hw.csv", "hw_to_sw.csv", "sw_to_hw.csv", "sw_to_sw.csv"}) {
    const std::string csv = slurp(dir_ / "plots" / name);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "size_bytes,speedup_k2,speedup_k8") << name;
    // header plus one row per size
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3) << name;
  }
}

TEST_F(CliTest, SimulateWritesTraceAndStats)
{
  const auto r = cli(
    {"simulate", "--scenario", data("chain_scenario.json"), "--trace", path("t.csv"), "--stats",
      path("s.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(path("t.csv")).rfind("timestamp_us,kind,message_id,endpoint\n", 0), 0u);
  EXPECT_EQ(slurp(path("s.csv")).rfind("topic,subscriber,impl,count,mean_us,max_us\n", 0), 0u);
}

TEST_F(CliTest, ChainCompare)
{
  const auto r = cli(
    {"compare", "--scenario", data("chain_scenario.json"), "--platform",
      data("platform_calibrated.json"), "--out", path("c.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("chain speedup: "), std::string::npos);
  EXPECT_EQ(
    slurp(path("c.csv")).rfind(
      "policy_a,policy_b,samples,mean_a_us,stddev_a_us,mean_b_us,stddev_b_us,speedup\n", 0), 0u);
}

TEST_F(CliTest, FsmExport)
{
  ASSERT_EQ(cli({"fsm-export", "--out", path("fsm.json")}).code, 0);
  const auto j = nlohmann::json::parse(slurp(path("fsm.json")));
  EXPECT_FALSE(j.empty());
}

TEST_F(CliTest, CalibrateResidualThreshold)
{
  // One free parameter cannot meet both a small and a huge speedup.
  std::ofstream(path("t.json")) << R"({"targets": [
      {"label": "a", "publisher": "HW", "path": "hw", "hw_subscribers": 2,
       "size_bytes": 10000, "speedup": 0.2},
      {"label": "b", "publisher": "HW", "path": "hw", "hw_subscribers": 2,
       "size_bytes": 10000, "speedup": 50}],
    "free_parameters": ["osif_roundtrip_us"], "repetitions": 2, "step_tolerance": 0.05})";
  const auto r = cli({"calibrate", "--targets", path("t.json"), "--out", path("p.json")});
  EXPECT_EQ(r.code, 4) << r.err;
  EXPECT_TRUE(fs::exists(path("p.json")));
  EXPECT_TRUE(fs::exists(path("p.json.residuals.json")));
  EXPECT_NO_THROW(topomap::platform_from_json(slurp(path("p.json"))));
}

}  // namespace
