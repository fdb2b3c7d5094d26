#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "earthworm/site.hpp"

namespace earthworm {

// A set of lattice sites plus, for every axis, the sites grouped by the
// axis-parallel line they lie on. Each line keeps its coordinates along the
// axis sorted, so the nearest member strictly ahead of a site in a given
// direction is a one-sided binary search.
//
// Lines are flat sorted vectors: lines stay short relative to the whole set
// (the points spread over many lines), so insertion by shifting is cheaper
// than a node-based tree in practice.
template <int D>
class HoleIndex {
 public:
  using SiteSet = std::unordered_set<Site<D>, CoordHash>;
  using Line = std::vector<std::int64_t>;
  using LineMap = std::unordered_map<LineKey<D>, Line, CoordHash>;

  bool contains(const Site<D>& s) const { return canonical_.contains(s); }
  std::size_t size() const { return canonical_.size(); }
  bool empty() const { return canonical_.empty(); }
  const SiteSet& sites() const { return canonical_; }
  const LineMap& lines(int axis) const { return lines_[axis]; }

  bool insert(const Site<D>& s) {
    if (!canonical_.insert(s).second) return false;
    for (int a = 0; a < D; ++a) {
      Line& line = lines_[a][line_key<D>(s, a)];
      line.insert(std::lower_bound(line.begin(), line.end(), s[a]), s[a]);
    }
    return true;
  }

  bool erase(const Site<D>& s) {
    if (canonical_.erase(s) == 0) return false;
    for (int a = 0; a < D; ++a) {
      auto it = lines_[a].find(line_key<D>(s, a));
      Line& line = it->second;
      line.erase(std::lower_bound(line.begin(), line.end(), s[a]));
      if (line.empty()) lines_[a].erase(it);
    }
    return true;
  }

  // Closest member on pos's line along dir.axis lying strictly beyond pos in
  // dir.sign. Never returns pos itself.
  std::optional<Site<D>> nearest_ahead(const Site<D>& pos, Direction dir) const {
    const auto it = lines_[dir.axis].find(line_key<D>(pos, dir.axis));
    if (it == lines_[dir.axis].end()) return std::nullopt;
    const Line& line = it->second;
    const std::int64_t c = pos[dir.axis];
    Site<D> hit = pos;
    if (dir.sign > 0) {
      auto ahead = std::upper_bound(line.begin(), line.end(), c);
      if (ahead == line.end()) return std::nullopt;
      hit[dir.axis] = *ahead;
    } else {
      auto ahead = std::lower_bound(line.begin(), line.end(), c);
      if (ahead == line.begin()) return std::nullopt;
      hit[dir.axis] = *std::prev(ahead);
    }
    return hit;
  }

  std::vector<Site<D>> sorted() const {
    std::vector<Site<D>> out(canonical_.begin(), canonical_.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  // True iff every axis index describes exactly the canonical set and no
  // empty line is retained.
  bool consistent() const {
    for (int a = 0; a < D; ++a) {
      std::size_t total = 0;
      for (const auto& [key, line] : lines_[a]) {
        if (line.empty() || !std::is_sorted(line.begin(), line.end()) ||
            std::adjacent_find(line.begin(), line.end()) != line.end()) {
          return false;
        }
        total += line.size();
        for (std::int64_t c : line) {
          Site<D> s{};
          for (int b = 0, k = 0; b < D; ++b) s[b] = (b == a) ? c : key[k++];
          if (!canonical_.contains(s)) return false;
        }
      }
      if (total != canonical_.size()) return false;
    }
    return true;
  }

 private:
  SiteSet canonical_;
  std::array<LineMap, D> lines_;
};

// Visited sites. Sites are never removed, so per line only the extreme
// coordinates matter for "is anything visited strictly ahead" queries.
template <int D>
class VisitIndex {
 public:
  struct Extent {
    std::int64_t lo;
    std::int64_t hi;
  };
  using SiteSet = std::unordered_set<Site<D>, CoordHash>;

  bool contains(const Site<D>& s) const { return canonical_.contains(s); }
  std::size_t size() const { return canonical_.size(); }
  const SiteSet& sites() const { return canonical_; }

  void insert(const Site<D>& s) {
    if (!canonical_.insert(s).second) return;
    for (int a = 0; a < D; ++a) {
      auto [it, fresh] = lines_[a].try_emplace(line_key<D>(s, a), Extent{s[a], s[a]});
      if (!fresh) {
        it->second.lo = std::min(it->second.lo, s[a]);
        it->second.hi = std::max(it->second.hi, s[a]);
      }
    }
  }

  bool any_ahead(const Site<D>& pos, Direction dir) const {
    const auto it = lines_[dir.axis].find(line_key<D>(pos, dir.axis));
    if (it == lines_[dir.axis].end()) return false;
    const std::int64_t c = pos[dir.axis];
    return dir.sign > 0 ? it->second.hi > c : it->second.lo < c;
  }

  std::vector<Site<D>> sorted() const {
    std::vector<Site<D>> out(canonical_.begin(), canonical_.end());
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  SiteSet canonical_;
  std::array<std::unordered_map<LineKey<D>, Extent, CoordHash>, D> lines_;
};

}  // namespace earthworm
