#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "earthworm/rng.hpp"
#include "earthworm/site.hpp"
#include "earthworm/worm.hpp"

namespace earthworm {

// Direct transcription of the dynamics over plain ordered sets. Every query
// scans the whole set; only meant for small n.
template <int D>
struct NaiveState {
  Site<D> position = origin<D>();
  std::uint64_t step_count = 0;
  std::set<Site<D>> holes{origin<D>()};
  std::set<Site<D>> visited{origin<D>()};
};

namespace detail {

// Signed distance from `from` to `to` along dir when both lie on the same
// axis-parallel line and `to` is strictly ahead; nullopt otherwise.
template <int D>
std::optional<std::int64_t> distance_ahead(const Site<D>& from, const Site<D>& to, Direction dir) {
  for (int a = 0; a < D; ++a) {
    if (a != dir.axis && from[a] != to[a]) return std::nullopt;
  }
  const std::int64_t delta = (to[dir.axis] - from[dir.axis]) * dir.sign;
  if (delta <= 0) return std::nullopt;
  return delta;
}

}  // namespace detail

template <int D>
StepOutcome<D> naive_apply_move(NaiveState<D>& state, Direction dir) {
  StepOutcome<D> out;
  out.direction = dir;

  bool visited_ahead = false;
  for (const auto& v : state.visited) {
    if (detail::distance_ahead<D>(state.position, v, dir)) visited_ahead = true;
  }
  out.tan_point = !visited_ahead;

  std::optional<Site<D>> nearest;
  std::int64_t best = 0;
  for (const auto& h : state.holes) {
    if (auto dist = detail::distance_ahead<D>(state.position, h, dir); dist && (!nearest || *dist < best)) {
      nearest = h;
      best = *dist;
    }
  }

  Site<D> dest = state.position;
  dest[dir.axis] += dir.sign;
  if (!nearest) {
    state.holes.insert(dest);
    out.event = Event::kCreated;
  } else if (*nearest == dest) {
    out.event = Event::kNoChange;
  } else {
    state.holes.erase(*nearest);
    state.holes.insert(dest);
    out.event = Event::kTransferred;
    out.transferred_from = nearest;
  }
  state.position = dest;
  ++state.step_count;
  state.visited.insert(dest);
  out.new_position = dest;
  out.hole_count_after = state.holes.size();
  return out;
}

// Corrupts the indexed engine at the first transfer on or after `step` by
// putting the filled hole back. Used as a negative control.
struct FaultInjection {
  std::uint64_t skip_transfer_from_step = 0;
};

struct Divergence {
  std::uint64_t step = 0;  // 1-based index of the offending step
  std::string detail;
};

struct EquivalenceReport {
  bool equal = true;
  std::uint64_t steps_checked = 0;
  std::optional<Divergence> first_divergence;
};

namespace detail {

template <int D>
std::string format_site(const Site<D>& s) {
  std::ostringstream os;
  os << '(';
  for (int a = 0; a < D; ++a) os << (a ? "," : "") << s[a];
  os << ')';
  return os.str();
}

template <int D>
std::string format_outcome(const StepOutcome<D>& o) {
  std::ostringstream os;
  os << direction_name(o.direction) << ' ' << event_name(o.event);
  if (o.transferred_from) os << " from " << format_site<D>(*o.transferred_from);
  os << " to " << format_site<D>(o.new_position) << " S=" << o.hole_count_after;
  if (o.tan_point) os << " tan=" << *o.tan_point;
  return os.str();
}

}  // namespace detail

// Draws `steps` directions from the xoshiro256++ stream of `seed` and feeds
// the identical sequence to both engines, comparing the outcome and the full
// hole set after every step.
template <int D>
EquivalenceReport replay_equivalence(std::uint64_t seed, std::uint64_t steps,
                                     std::optional<FaultInjection> fault = {}) {
  Xoshiro256pp rng(seed);
  std::vector<Direction> moves(steps);
  for (auto& m : moves) m = draw_direction(rng, D);

  Worm<D> fast(seed, true);
  NaiveState<D> naive;
  bool fault_armed = fault.has_value();
  EquivalenceReport report;
  for (std::uint64_t k = 0; k < steps; ++k) {
    const std::uint64_t step_no = k + 1;
    StepOutcome<D> a = fast.apply_move(moves[k]);
    if (fault_armed && step_no >= fault->skip_transfer_from_step && a.event == Event::kTransferred) {
      fast.inject_hole_unchecked(*a.transferred_from);
      fault_armed = false;
    }
    const StepOutcome<D> b = naive_apply_move<D>(naive, moves[k]);
    report.steps_checked = step_no;

    std::string problem;
    if (a != b) {
      problem = "outcome mismatch: indexed [" + detail::format_outcome<D>(a) + "] vs naive [" +
                detail::format_outcome<D>(b) + "]";
    } else if (fast.holes().size() != naive.holes.size() ||
               !std::equal(naive.holes.begin(), naive.holes.end(), fast.holes_snapshot().begin())) {
      problem = "hole sets differ: indexed has " + std::to_string(fast.holes().size()) +
                " holes, naive has " + std::to_string(naive.holes.size());
    }
    if (!problem.empty()) {
      report.equal = false;
      report.first_divergence = Divergence{step_no, problem};
      return report;
    }
  }
  return report;
}

inline EquivalenceReport replay_equivalence(std::uint64_t seed, std::uint64_t steps, int dim,
                                            std::optional<FaultInjection> fault = {}) {
  return with_dimension(dim, [&]<int D>() { return replay_equivalence<D>(seed, steps, fault); });
}

}  // namespace earthworm
