#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "earthworm/sweep.hpp"
#include "earthworm/table_io.hpp"

namespace earthworm {
namespace {

std::string csv_without_timing(const SampleTable& t) {
  SampleTable copy = t;
  for (auto& r : copy.rows) r.walltime_ms = 0;
  std::ostringstream os;
  write_table_csv(os, copy);
  return os.str();
}

TEST(ExperimentPlan, Validation) {
  ExperimentPlan p;
  p.n_grid = {10, 10};
  EXPECT_THROW(p.validate(), ParameterError);
  p.n_grid = {};
  EXPECT_THROW(p.validate(), ParameterError);
  p.n_grid = {100, 10};
  EXPECT_THROW(p.validate(), ParameterError);
  p.n_grid = {10};
  p.replicas = 0;
  EXPECT_THROW(p.validate(), ParameterError);
  p.replicas = 1;
  p.dim = 1;
  EXPECT_THROW(p.validate(), InvalidDimension);
}

TEST(RunSweep, ParallelismDoesNotChangeTable) {
  ExperimentPlan p{2, {10}, 3, 42, false};
  EXPECT_EQ(csv_without_timing(run_sweep(p, 1)), csv_without_timing(run_sweep(p, 8)));
  ExperimentPlan q{3, {100, 1000}, 7, 5, true};
  EXPECT_EQ(csv_without_timing(run_sweep(q, 1)), csv_without_timing(run_sweep(q, 4)));
}

TEST(RunSweep, SingleZeroStepRow) {
  const auto t = run_sweep(ExperimentPlan{2, {0}, 1, 0, false}, 1);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].s_n, 1u);
  EXPECT_EQ(t.rows[0].seed, derive_seed(0, 0));
}

TEST(RunSweep, RowsSortedAndBounded) {
  const auto t = run_sweep(ExperimentPlan{2, {10, 100}, 2, 1, true}, 2);
  ASSERT_EQ(t.rows.size(), 4u);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    EXPECT_EQ(r.n, i < 2 ? 10u : 100u);
    EXPECT_EQ(r.replica, i % 2);
    EXPECT_GE(r.s_n, 1u);
    EXPECT_LE(r.s_n, r.n + 1);
    ASSERT_TRUE(r.tan_total.has_value());
    EXPECT_LE(*r.tan_total, r.n);
  }
}

TEST(RunSweep, RowsAreSnapshotsOfTheReplicaTrajectory) {
  const auto t = run_sweep(ExperimentPlan{2, {500, 2000}, 2, 9, false}, 1);
  for (std::uint64_t rep = 0; rep < 2; ++rep) {
    Worm<2> w(derive_seed(9, rep));
    run(w, 500);
    EXPECT_EQ(t.rows[rep].s_n, w.hole_count());
    run(w, 1500);
    EXPECT_EQ(t.rows[2 + rep].s_n, w.hole_count());
  }
}

TEST(RunSweep, MeansIncreaseWithN) {
  const auto t = run_sweep(ExperimentPlan{2, {1000, 10000, 100000}, 10, 2024, false}, 2);
  const auto means = t.means();
  ASSERT_EQ(means.size(), 3u);
  EXPECT_LT(means[0].second, means[1].second);
  EXPECT_LT(means[1].second, means[2].second);
}

TEST(RunSweep, CheckpointResumeMatchesUninterrupted) {
  const auto dir = std::filesystem::temp_directory_path() / "earthworm_sweep_ckpt";
  std::filesystem::create_directories(dir);
  const auto path = dir / "sweep.json";
  std::filesystem::remove(path);
  ExperimentPlan p{2, {100, 1000, 5000}, 4, 77, true};
  const auto reference = run_sweep(p, 1);

  SweepCheckpointOptions opt{path, 1, true};
  const auto first = run_sweep(p, 2, &opt);
  EXPECT_EQ(csv_without_timing(first), csv_without_timing(reference));
  ASSERT_TRUE(std::filesystem::exists(path));
  // Everything is complete: resuming reproduces the table from the file.
  const auto resumed = run_sweep(p, 3, &opt);
  EXPECT_EQ(csv_without_timing(resumed), csv_without_timing(reference));

  // A partial checkpoint: keep only the first grid point and its run states.
  json doc = read_json_file(path);
  json rows = json::array();
  for (const auto& r : doc["rows"]) {
    if (r["n"] == 100) rows.push_back(r);
  }
  doc["rows"] = rows;
  json runs = json::object();
  for (std::uint64_t rep = 0; rep < 4; ++rep) {
    Worm<2> w(derive_seed(77, rep), true);
    run(w, 100);
    runs[std::to_string(rep)] = worm_to_json(w);
  }
  doc["runs"] = runs;
  write_json_file(path, doc);
  const auto continued = run_sweep(p, 2, &opt);
  EXPECT_EQ(csv_without_timing(continued), csv_without_timing(reference));

  ExperimentPlan other = p;
  other.seed_base = 78;
  EXPECT_THROW(run_sweep(other, 1, &opt), FormatError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace earthworm
