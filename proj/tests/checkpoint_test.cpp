#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "earthworm/checkpoint.hpp"

namespace earthworm {
namespace {

class CheckpointTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("earthworm_ckpt_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path file(const char* name) const { return dir_ / name; }

  std::filesystem::path dir_;
};

TEST_F(CheckpointTest, FreshStateRoundTrips) {
  Worm<2> w(3);
  const auto back = checkpoint_roundtrip(w, file("fresh.json"));
  EXPECT_EQ(worm_to_json(back), worm_to_json(w));
}

TEST_F(CheckpointTest, ContinuationIsBitIdentical) {
  for (bool track : {false, true}) {
    Worm<2> uninterrupted(1234, track);
    run(uninterrupted, 10000);
    auto resumed = checkpoint_roundtrip(uninterrupted, file("mid.json"));
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(uninterrupted.step(), resumed.step());
    EXPECT_EQ(resumed.hole_count(), uninterrupted.hole_count());
    EXPECT_EQ(resumed.holes_snapshot(), uninterrupted.holes_snapshot());
    EXPECT_EQ(resumed.tan_total(), uninterrupted.tan_total());
  }
}

TEST_F(CheckpointTest, ThreeDimensionalDrivenWorm) {
  auto w = Worm<3>::driven({1, -2, 3}, 40);
  w.apply_move(Direction{2, -1});
  const auto back = checkpoint_roundtrip(w, file("driven.json"));
  EXPECT_FALSE(back.rng().has_value());
  EXPECT_EQ(worm_to_json(back), worm_to_json(w));
  EXPECT_EQ(checkpoint_dimension(file("driven.json")), 3);
}

TEST_F(CheckpointTest, TruncatedFileIsCorrupt) {
  Worm<2> w(1);
  run(w, 500);
  save_worm_checkpoint(file("t.json"), w);
  const auto size = std::filesystem::file_size(file("t.json"));
  std::filesystem::resize_file(file("t.json"), size / 2);
  EXPECT_THROW(load_worm_checkpoint<2>(file("t.json")), FormatError);
}

TEST_F(CheckpointTest, VersionMismatchNamesField) {
  Worm<2> w(1);
  save_worm_checkpoint(file("v.json"), w);
  json doc = read_json_file(file("v.json"));
  doc["format_version"] = 99;
  write_json_file(file("v.json"), doc);
  try {
    load_worm_checkpoint<2>(file("v.json"));
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("format_version"), std::string::npos);
  }
}

TEST_F(CheckpointTest, BadFieldsAreNamed) {
  Worm<2> w(1);
  run(w, 50);
  const json good = worm_to_json(w);
  auto expect_field = [&](json state, const char* field) {
    json doc{{"format_version", kCheckpointVersion}, {"kind", "run"}, {"run", json::object()}, {"state", state}};
    write_json_file(file("b.json"), doc);
    try {
      load_worm_checkpoint<2>(file("b.json"));
      ADD_FAILURE() << "expected FormatError for " << field;
    } catch (const FormatError& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  json s = good;
  s.erase("holes");
  expect_field(s, "holes");
  s = good;
  s["rng"] = "xyz";
  expect_field(s, "rng");
  s = good;
  s["dim"] = 3;
  expect_field(s, "dim");
  s = good;
  s["created_total"] = 0;
  expect_field(s, "created_total");
  s = good;
  s["position"] = json::array({100, 100});
  expect_field(s, "position");
}

TEST_F(CheckpointTest, RngHexRoundTrip) {
  Xoshiro256pp rng(42);
  rng();
  const std::string hex = rng_to_hex(rng);
  EXPECT_EQ(hex.size(), 64u);
  EXPECT_EQ(rng_from_hex(hex), rng);
}

}  // namespace
}  // namespace earthworm
