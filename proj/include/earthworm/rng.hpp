#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <limits>

#include "earthworm/site.hpp"

namespace earthworm {

// splitmix64 (Steele, Lea, Flood). Used for seed derivation only.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// xoshiro256++ 1.0 (Blackman, Vigna). State is seeded from four consecutive
// splitmix64 outputs.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;
  using State = std::array<std::uint64_t, 4>;

  explicit constexpr Xoshiro256pp(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm();
  }
  explicit constexpr Xoshiro256pp(const State& state) : s_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr std::uint64_t operator()() {
    const std::uint64_t result = std::rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
  }

  constexpr const State& state() const { return s_; }

  friend constexpr bool operator==(const Xoshiro256pp&, const Xoshiro256pp&) = default;

 private:
  State s_{};
};

// Uniform direction among the 2d choices. When 2d is a power of two the low
// bits are used (plain modulo); otherwise the top ceil(log2(2d)) bits are
// rejection-sampled.
template <class Rng>
constexpr Direction draw_direction(Rng& rng, int dim) {
  const auto choices = static_cast<std::uint64_t>(2 * dim);
  if (std::has_single_bit(choices)) {
    return Direction::from_code(static_cast<int>(rng() & (choices - 1)));
  }
  const int bits = std::bit_width(choices - 1);
  for (;;) {
    const std::uint64_t r = rng() >> (64 - bits);
    if (r < choices) return Direction::from_code(static_cast<int>(r));
  }
}

}  // namespace earthworm
