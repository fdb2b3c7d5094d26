#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "earthworm/error.hpp"
#include "earthworm/site.hpp"

namespace earthworm {

enum class Connectivity {
  kAxis,  // 2d nearest neighbours (4-connectivity in the plane)
  kFull,  // all 3^d - 1 surrounding sites (8-connectivity in the plane)
};

struct ComponentStats {
  std::vector<std::size_t> hole_sizes;                 // descending
  std::optional<std::vector<std::size_t>> trail_sizes;  // components of trail minus holes, descending
};

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

  std::vector<std::size_t> component_sizes() {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < parent_.size(); ++i) {
      if (find(i) == i) out.push_back(size_[i]);
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

template <int D>
std::vector<Site<D>> neighbour_offsets(Connectivity c) {
  std::vector<Site<D>> out;
  if (c == Connectivity::kAxis) {
    for (int a = 0; a < D; ++a) {
      Site<D> e{};
      e[a] = 1;
      out.push_back(e);
    }
    return out;
  }
  // Half of the 3^D - 1 offsets (the lexicographically positive ones) suffice
  // since union is symmetric.
  Site<D> off{};
  off.fill(-1);
  for (;;) {
    const auto first = std::find_if(off.begin(), off.end(), [](std::int64_t v) { return v != 0; });
    if (first != off.end() && *first > 0) out.push_back(off);
    int a = D - 1;
    while (a >= 0 && off[a] == 1) off[a--] = -1;
    if (a < 0) break;
    ++off[a];
  }
  return out;
}

template <int D>
std::vector<std::size_t> component_sizes(std::span<const Site<D>> sites, Connectivity c) {
  std::unordered_map<Site<D>, std::size_t, CoordHash> index;
  index.reserve(sites.size());
  for (const auto& s : sites) index.try_emplace(s, index.size());
  DisjointSets dsu(index.size());
  const auto offsets = neighbour_offsets<D>(c);
  for (const auto& [s, i] : index) {
    for (const auto& off : offsets) {
      Site<D> t = s;
      for (int a = 0; a < D; ++a) t[a] += off[a];
      if (auto it = index.find(t); it != index.end()) dsu.unite(i, it->second);
    }
  }
  return dsu.component_sizes();
}

}  // namespace detail

// Connected components of the hole set and, when the trail is supplied, of
// the visited-but-filled sites. Duplicate input sites count once.
template <int D>
ComponentStats hole_components(std::span<const Site<D>> holes,
                               std::optional<std::span<const Site<D>>> visited = {},
                               Connectivity c = Connectivity::kAxis) {
  if (holes.empty()) throw ParameterError("hole set is empty");
  ComponentStats stats;
  stats.hole_sizes = detail::component_sizes<D>(holes, c);
  if (visited) {
    std::unordered_map<Site<D>, bool, CoordHash> is_hole;
    for (const auto& h : holes) is_hole[h] = true;
    std::vector<Site<D>> rest;
    std::size_t holes_seen = 0;
    for (const auto& v : *visited) {
      auto it = is_hole.find(v);
      if (it == is_hole.end()) {
        rest.push_back(v);
      } else if (it->second) {
        it->second = false;
        ++holes_seen;
      }
    }
    if (holes_seen != is_hole.size()) throw ConsistencyError("visited sites do not contain every hole");
    stats.trail_sizes = detail::component_sizes<D>(rest, c);
  }
  return stats;
}

// Runtime-dimension entry point over plain coordinate vectors.
inline ComponentStats hole_components(int dim, const std::vector<std::vector<std::int64_t>>& holes,
                                      const std::optional<std::vector<std::vector<std::int64_t>>>& visited,
                                      Connectivity c = Connectivity::kAxis) {
  return with_dimension(dim, [&]<int D>() {
    auto convert = [](const std::vector<std::vector<std::int64_t>>& in) {
      std::vector<Site<D>> out;
      out.reserve(in.size());
      for (const auto& v : in) {
        if (v.size() != static_cast<std::size_t>(D)) throw ParameterError("site of wrong dimension");
        Site<D> s{};
        std::copy(v.begin(), v.end(), s.begin());
        out.push_back(s);
      }
      return out;
    };
    const auto h = convert(holes);
    if (!visited) return hole_components<D>(h, std::nullopt, c);
    const auto v = convert(*visited);
    return hole_components<D>(h, std::span<const Site<D>>(v), c);
  });
}

}  // namespace earthworm
