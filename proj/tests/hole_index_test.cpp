#include <optional>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "earthworm/hole_index.hpp"

namespace earthworm {
namespace {

constexpr Direction kRight{0, 1};
constexpr Direction kLeft{0, -1};
constexpr Direction kUp{1, 1};

TEST(HoleIndex, NearestAheadOnRow) {
  HoleIndex<2> idx;
  idx.insert({0, 0});
  idx.insert({3, 0});
  EXPECT_EQ(idx.nearest_ahead({1, 0}, kRight), (Site<2>{3, 0}));
  EXPECT_EQ(idx.nearest_ahead({3, 0}, kRight), std::nullopt);
  EXPECT_EQ(idx.nearest_ahead({3, 0}, kLeft), (Site<2>{0, 0}));
  EXPECT_EQ(idx.nearest_ahead({0, 0}, kLeft), std::nullopt);
  EXPECT_EQ(idx.nearest_ahead({1, 0}, kUp), std::nullopt);
  EXPECT_EQ(idx.nearest_ahead({0, -5}, kUp), (Site<2>{0, 0}));
}

TEST(HoleIndex, DropsEmptyLines) {
  HoleIndex<3> idx;
  idx.insert({1, 2, 3});
  EXPECT_EQ(idx.lines(0).size(), 1u);
  EXPECT_TRUE(idx.erase({1, 2, 3}));
  EXPECT_FALSE(idx.erase({1, 2, 3}));
  for (int a = 0; a < 3; ++a) EXPECT_TRUE(idx.lines(a).empty());
  EXPECT_TRUE(idx.consistent());
}

// Random inserts/erases against a plain std::set; nearest-ahead answers are
// compared with a linear scan.
template <int D>
void random_ops_match_plain_set(unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> coord(-4, 4);
  std::uniform_int_distribution<int> code(0, 2 * D - 1);
  HoleIndex<D> idx;
  std::set<Site<D>> plain;
  for (int op = 0; op < 3000; ++op) {
    Site<D> s;
    for (auto& c : s) c = coord(gen);
    if (gen() % 3 == 0) {
      EXPECT_EQ(idx.erase(s), plain.erase(s) == 1);
    } else {
      EXPECT_EQ(idx.insert(s), plain.insert(s).second);
    }
    const Direction dir = Direction::from_code(code(gen));
    std::optional<Site<D>> expected;
    for (const auto& h : plain) {
      bool same_line = true;
      for (int a = 0; a < D; ++a) same_line = same_line && (a == dir.axis || h[a] == s[a]);
      const auto delta = (h[dir.axis] - s[dir.axis]) * dir.sign;
      if (same_line && delta > 0 && (!expected || delta < ((*expected)[dir.axis] - s[dir.axis]) * dir.sign)) {
        expected = h;
      }
    }
    ASSERT_EQ(idx.nearest_ahead(s, dir), expected);
    ASSERT_EQ(idx.size(), plain.size());
  }
  EXPECT_TRUE(idx.consistent());
  const auto sorted = idx.sorted();
  EXPECT_TRUE(std::equal(sorted.begin(), sorted.end(), plain.begin(), plain.end()));
}

TEST(HoleIndex, RandomOpsMatchPlainSet2D) {
  for (unsigned seed = 1; seed <= 5; ++seed) random_ops_match_plain_set<2>(seed);
}

TEST(HoleIndex, RandomOpsMatchPlainSet3D) {
  for (unsigned seed = 1; seed <= 3; ++seed) random_ops_match_plain_set<3>(seed);
}

TEST(VisitIndex, AnyAheadUsesLineExtent) {
  VisitIndex<2> v;
  v.insert({0, 0});
  v.insert({1, 0});
  v.insert({2, 0});
  EXPECT_TRUE(v.any_ahead({2, 0}, kLeft));
  EXPECT_FALSE(v.any_ahead({2, 0}, kRight));
  EXPECT_TRUE(v.any_ahead({-3, 0}, kRight));
  EXPECT_FALSE(v.any_ahead({1, 1}, kRight));
  EXPECT_EQ(v.size(), 3u);
}

}  // namespace
}  // namespace earthworm
