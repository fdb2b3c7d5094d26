#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>

#include "earthworm/error.hpp"

namespace earthworm {

// Dimensions instantiated by the runtime dispatcher.
inline constexpr int kMinDim = 2;
inline constexpr int kMaxDim = 8;

template <int D>
using Site = std::array<std::int64_t, D>;

// Coordinates of a site with one axis removed; identifies the axis-parallel
// line through the site.
template <int D>
using LineKey = std::array<std::int64_t, D - 1>;

template <int D>
constexpr Site<D> origin() {
  return Site<D>{};
}

template <int D>
constexpr LineKey<D> line_key(const Site<D>& s, int axis) {
  LineKey<D> key{};
  for (int a = 0, k = 0; a < D; ++a) {
    if (a != axis) key[k++] = s[a];
  }
  return key;
}

// One of the 2d unit steps. Encoded axis-major with + before -, so for d=2:
// 0=right(+x), 1=left(-x), 2=up(+y), 3=down(-y).
struct Direction {
  int axis = 0;
  int sign = 1;

  constexpr int code() const { return 2 * axis + (sign < 0 ? 1 : 0); }
  static constexpr Direction from_code(int code) {
    return Direction{code / 2, (code % 2 == 0) ? 1 : -1};
  }
  constexpr Direction reversed() const { return Direction{axis, -sign}; }

  friend constexpr bool operator==(const Direction&, const Direction&) = default;
};

template <int D>
constexpr Site<D> neighbor(Site<D> s, Direction dir) {
  s[dir.axis] += dir.sign;
  return s;
}

inline std::string direction_name(Direction dir) {
  static constexpr const char* kPlanar[] = {"right", "left", "up", "down"};
  if (dir.axis < 2) return kPlanar[dir.code()];
  return std::string(dir.sign > 0 ? "+" : "-") + "e" + std::to_string(dir.axis);
}

namespace detail {

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

struct CoordHash {
  template <std::size_t N>
  std::size_t operator()(const std::array<std::int64_t, N>& c) const noexcept {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL * (N + 1);
    for (std::int64_t v : c) h = detail::mix64(h ^ static_cast<std::uint64_t>(v));
    return static_cast<std::size_t>(h);
  }
};

inline void check_dimension(int dim) {
  if (dim < kMinDim) {
    throw InvalidDimension("dimension must be at least 2 (got " + std::to_string(dim) + ")");
  }
  if (dim > kMaxDim) {
    throw InvalidDimension("dimension above " + std::to_string(kMaxDim) + " is not supported (got " +
                           std::to_string(dim) + ")");
  }
}

namespace detail {

template <int D, class F>
decltype(auto) dispatch(int dim, F&& f) {
  if constexpr (D == kMaxDim) {
    return std::forward<F>(f).template operator()<D>();
  } else {
    if (dim == D) return std::forward<F>(f).template operator()<D>();
    return dispatch<D + 1>(dim, std::forward<F>(f));
  }
}

}  // namespace detail

// Calls f.template operator()<D>() for the runtime dimension `dim`.
// Throws InvalidDimension outside [kMinDim, kMaxDim].
template <class F>
decltype(auto) with_dimension(int dim, F&& f) {
  check_dimension(dim);
  return detail::dispatch<kMinDim>(dim, std::forward<F>(f));
}

}  // namespace earthworm
