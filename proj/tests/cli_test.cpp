#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli.hpp"

namespace earthworm::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::initializer_list<std::string> args) {
  std::vector<std::string> owned{"earthworm"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : owned) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Drops the walltime column from every data row.
std::string without_walltime(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, res;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#' && line.rfind("dim,", 0) != 0) line = line.substr(0, line.rfind(','));
    res += line + '\n';
  }
  return res;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("earthworm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, SimulateZeroSteps) {
  const auto r = call({"simulate", "--dim", "2", "--steps", "0", "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["s_n"], 1);
  EXPECT_EQ(j["steps"], 0);
}

TEST_F(CliTest, SimulateIsDeterministic) {
  const auto a = call({"simulate", "--steps", "5000", "--seed", "9", "--omit-timing", "--track-visits"});
  const auto b = call({"simulate", "--steps", "5000", "--seed", "9", "--omit-timing", "--track-visits"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const auto j = json::parse(a.out);
  EXPECT_FALSE(j["tan_total"].is_null());
  EXPECT_FALSE(j.contains("walltime_ms"));
}

TEST_F(CliTest, RecordEverySeries) {
  const auto r = call({"simulate", "--steps", "10", "--seed", "1", "--record-every", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  ASSERT_EQ(j["series"].size(), 3u);
  EXPECT_EQ(j["series"][0], json::array({0, 1}));
  EXPECT_EQ(j["series"][2][0], 10);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(call({"simulate", "--dim", "1", "--steps", "10"}).code, 2);
  EXPECT_EQ(call({"simulate", "--dim", "2"}).code, 2);
  EXPECT_EQ(call({"simulate", "--steps", "x"}).code, 2);
  EXPECT_EQ(call({"simulate", "--steps", "5", "--visits-out", path("v.txt")}).code, 2);
  EXPECT_EQ(call({"sweep", "--n-grid", "100,10", "--replicas", "2"}).code, 2);
  EXPECT_EQ(call({"sweep", "--n-grid", "10", "--replicas", "0"}).code, 2);
  EXPECT_EQ(call({"verify", "--suite", "coupling", "--steps", "10", "--restart-at", "20"}).code, 2);
  EXPECT_EQ(call({"nonsense"}).code, 2);
  EXPECT_EQ(call({}).code, 2);
}

TEST_F(CliTest, HolesDumpFreshAndScripted) {
  const auto fresh = call({"holes-dump", "--steps", "0"});
  ASSERT_EQ(fresh.code, 0) << fresh.err;
  EXPECT_EQ(fresh.out, "0 0\n");

  const auto scripted = call({"holes-dump", "--moves", "up,right,right,down,left"});
  ASSERT_EQ(scripted.code, 0) << scripted.err;
  std::istringstream in(scripted.out);
  int dim = 0;
  const auto sites = read_sites(in, dim);
  EXPECT_EQ(dim, 2);
  EXPECT_TRUE(std::is_sorted(sites.begin(), sites.end()));
}

TEST_F(CliTest, HolesDumpLineCountMatchesSummary) {
  const auto summary = json::parse(call({"simulate", "--steps", "3000", "--seed", "4"}).out);
  const auto r = call({"holes-dump", "--steps", "3000", "--seed", "4", "--out", path("h.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("h.txt"));
  int dim = 0;
  EXPECT_EQ(read_sites(in, dim).size(), summary["s_n"].get<std::size_t>());
}

TEST_F(CliTest, SweepParallelismInvariance) {
  const auto one = call({"sweep", "--n-grid", "100,1000", "--replicas", "6", "--seed", "3", "--parallelism", "1",
                         "--track-visits"});
  const auto eight = call({"sweep", "--n-grid", "100,1000", "--replicas", "6", "--seed", "3", "--parallelism", "8",
                           "--track-visits"});
  ASSERT_EQ(one.code, 0) << one.err;
  ASSERT_EQ(eight.code, 0) << eight.err;
  EXPECT_EQ(without_walltime(one.out), without_walltime(eight.out));
  std::istringstream in(one.out);
  const auto table = read_table_csv(in);
  ASSERT_EQ(table.rows.size(), 12u);
  EXPECT_EQ(table.rows.front().n, 100u);
  EXPECT_EQ(table.rows.back().n, 1000u);
}

TEST_F(CliTest, SweepCheckpointResumeMatches) {
  const auto full = call({"sweep", "--n-grid", "200,2000", "--replicas", "4", "--seed", "5"});
  ASSERT_EQ(full.code, 0);
  const auto first = call({"sweep", "--n-grid", "200,2000", "--replicas", "4", "--seed", "5", "--checkpoint",
                           path("sw.json")});
  ASSERT_EQ(first.code, 0) << first.err;
  const auto resumed = call({"sweep", "--n-grid", "200,2000", "--replicas", "4", "--seed", "5", "--checkpoint",
                             path("sw.json"), "--resume"});
  ASSERT_EQ(resumed.code, 0) << resumed.err;
  EXPECT_EQ(without_walltime(full.out), without_walltime(resumed.out));
}

TEST_F(CliTest, SimulateCheckpointResume) {
  const auto plain = call({"simulate", "--steps", "4000", "--seed", "12", "--omit-timing", "--record-every", "1000"});
  ASSERT_EQ(plain.code, 0);

  // State of the same run interrupted after 1500 steps.
  Worm<2> w(12);
  json series = json::array({json::array({0, 1})});
  while (w.step_count() < 1500) {
    w.step();
    if (w.step_count() == 1000) series.push_back(json::array({1000, w.hole_count()}));
  }
  save_worm_checkpoint(path("c.json"), w, json{{"seed", 12}, {"target_steps", 4000}, {"series", series}});

  const auto resumed = call({"simulate", "--steps", "4000", "--seed", "12", "--omit-timing", "--record-every", "1000",
                             "--checkpoint", path("c.json"), "--resume"});
  ASSERT_EQ(resumed.code, 0) << resumed.err;
  EXPECT_EQ(json::parse(resumed.out), json::parse(plain.out));
  EXPECT_EQ(call({"simulate", "--steps", "4000", "--seed", "13", "--checkpoint", path("c.json"), "--resume"}).code,
            1);
}

TEST_F(CliTest, VerifySuites) {
  const auto oracle = call({"verify", "--suite", "oracle", "--seeds", "0..4", "--steps", "500"});
  ASSERT_EQ(oracle.code, 0) << oracle.out << oracle.err;
  EXPECT_TRUE(json::parse(oracle.out)["passed"].get<bool>());

  const auto coupling =
      call({"verify", "--suite", "coupling", "--seeds", "0..4", "--steps", "300", "--restart-at", "1,10,100"});
  ASSERT_EQ(coupling.code, 0) << coupling.out << coupling.err;
  EXPECT_EQ(json::parse(coupling.out)["seeds_checked"], 5);

  const auto faulty = call({"verify", "--suite", "oracle", "--seeds", "0..4", "--steps", "500", "--inject-fault-at", "0"});
  EXPECT_EQ(faulty.code, 1);
  const auto report = json::parse(faulty.out);
  EXPECT_FALSE(report["passed"].get<bool>());
  EXPECT_TRUE(report.contains("first_divergence"));
}

TEST_F(CliTest, StatsOverSweepTable) {
  ASSERT_EQ(call({"sweep", "--n-grid", "1000,3000,10000", "--replicas", "8", "--track-visits", "--out",
                  path("t.csv")})
                .code,
            0);
  const auto reg = call({"stats", "regress", "--input", path("t.csv"), "--plot-out", path("plot.csv")});
  ASSERT_EQ(reg.code, 0) << reg.err;
  const double slope = json::parse(reg.out)["fit"]["slope"].get<double>();
  EXPECT_GT(slope, 0.5);
  EXPECT_LT(slope, 1.0);
  EXPECT_EQ(slurp(path("plot.csv")).rfind("ln_n,ln_value,fitted\n", 0), 0u);

  EXPECT_EQ(call({"stats", "tanpoints", "--input", path("t.csv")}).code, 0);
  EXPECT_EQ(call({"stats", "ks", "--input", path("t.csv"), "--n", "10000"}).code, 0);
  const auto pz = call({"stats", "pz", "--input", path("t.csv"), "--n", "1000", "--theta", "0.25,0.5"});
  ASSERT_EQ(pz.code, 0) << pz.err;
  EXPECT_EQ(json::parse(pz.out)["checks"].size(), 2u);
  const auto thm = call({"stats", "theorem", "--input", path("t.csv"), "--n", "10000"});
  ASSERT_EQ(thm.code, 0) << thm.err;
  EXPECT_GE(json::parse(thm.out)["fraction"].get<double>(), 0.0);
  // Several grid points and no --n is a usage error.
  EXPECT_EQ(call({"stats", "ks", "--input", path("t.csv")}).code, 2);
  EXPECT_EQ(call({"stats", "regress", "--input", path("missing.csv")}).code, 1);
}

TEST_F(CliTest, StatsComponents) {
  ASSERT_EQ(call({"simulate", "--steps", "2000", "--seed", "2", "--track-visits", "--holes-out", path("h.txt"),
                  "--visits-out", path("v.txt")})
                .code,
            0);
  const auto r = call({"stats", "components", "--holes", path("h.txt"), "--visited", path("v.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["dim"], 2);
  EXPECT_TRUE(j.contains("trail_component_sizes"));
}

}  // namespace
}  // namespace earthworm::cli
