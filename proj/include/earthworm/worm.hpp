#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "earthworm/error.hpp"
#include "earthworm/hole_index.hpp"
#include "earthworm/rng.hpp"
#include "earthworm/site.hpp"

namespace earthworm {

enum class Event { kCreated, kTransferred, kNoChange };

inline const char* event_name(Event e) {
  switch (e) {
    case Event::kCreated:
      return "created";
    case Event::kTransferred:
      return "transferred";
    case Event::kNoChange:
      return "no_change";
  }
  return "?";
}

template <int D>
struct StepOutcome {
  Direction direction;
  Event event = Event::kNoChange;
  std::optional<Site<D>> transferred_from;  // set iff event == kTransferred
  Site<D> new_position{};
  std::uint64_t hole_count_after = 0;
  std::optional<bool> tan_point;  // set iff visits are tracked

  friend bool operator==(const StepOutcome&, const StepOutcome&) = default;
};

struct RunSummary {
  std::uint64_t steps = 0;  // steps applied by this call
  std::uint64_t s_n = 0;
  std::uint64_t created_total = 0;
  std::optional<std::uint64_t> tan_total;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> series;  // (k, S_k)
};

// The earthworm Markov chain (X_n, H_n) on Z^D.
//
// The worm's site is always a hole. A move in direction e first looks up the
// nearest hole strictly ahead of the current site along e, then:
//   - none ahead:            the destination becomes a new hole (created);
//   - it is the destination: nothing changes;
//   - otherwise:             that hole is filled and the destination opens
//                            (transferred).
template <int D>
class Worm {
 public:
  static_assert(D >= kMinDim && D <= kMaxDim);

  explicit Worm(std::uint64_t seed, bool track_visits = false) : Worm(Bare{}, track_visits) {
    rng_.emplace(seed);
  }

  // A worm with no generator of its own, sitting at `position` at time
  // `step_count` with a single hole under it. Moves must be supplied through
  // apply_move.
  static Worm driven(const Site<D>& position, std::uint64_t step_count, bool track_visits = false) {
    Worm w(Bare{}, false);
    w.holes_ = HoleIndex<D>{};
    w.holes_.insert(position);
    w.position_ = position;
    w.step_count_ = step_count;
    if (track_visits) {
      w.visits_.emplace();
      w.visits_->insert(position);
      w.tan_total_ = 0;
    }
    return w;
  }

  // Reassembles a worm from serialized parts. Validates the state invariants.
  static Worm restore(const Site<D>& position, std::uint64_t step_count,
                      std::optional<Xoshiro256pp> rng, std::span<const Site<D>> holes,
                      std::optional<std::span<const Site<D>>> visits, std::uint64_t created_total,
                      std::optional<std::uint64_t> tan_total) {
    Worm w(Bare{}, visits.has_value());
    w.holes_ = HoleIndex<D>{};
    for (const auto& h : holes) {
      if (!w.holes_.insert(h)) throw ConsistencyError("holes: duplicate site");
    }
    if (visits) {
      w.visits_ = VisitIndex<D>{};
      for (const auto& v : *visits) w.visits_->insert(v);
      for (const auto& h : holes) {
        if (!w.visits_->contains(h)) throw ConsistencyError("visits: hole outside the trail");
      }
      if (!w.visits_->contains(position)) throw ConsistencyError("visits: position not visited");
    }
    if (!w.holes_.contains(position)) throw ConsistencyError("position: not a hole");
    if (created_total != w.holes_.size()) {
      throw ConsistencyError("created_total: does not match hole count");
    }
    if (w.holes_.size() > step_count + 1) throw ConsistencyError("step_count: fewer steps than holes");
    if (tan_total.has_value() != visits.has_value()) {
      throw ConsistencyError("tan_total: present iff visits are tracked");
    }
    w.position_ = position;
    w.step_count_ = step_count;
    w.rng_ = rng;
    w.created_total_ = created_total;
    w.tan_total_ = tan_total;
    return w;
  }

  static constexpr int dim() { return D; }
  const Site<D>& position() const { return position_; }
  std::uint64_t step_count() const { return step_count_; }
  std::uint64_t hole_count() const { return holes_.size(); }
  std::uint64_t created_total() const { return created_total_; }
  std::optional<std::uint64_t> tan_total() const { return tan_total_; }
  bool tracks_visits() const { return visits_.has_value(); }
  const HoleIndex<D>& holes() const { return holes_; }
  const VisitIndex<D>* visits() const { return visits_ ? &*visits_ : nullptr; }
  const std::optional<Xoshiro256pp>& rng() const { return rng_; }

  std::optional<Site<D>> nearest_hole_ahead(Direction dir) const {
    return holes_.nearest_ahead(position_, dir);
  }

  // True iff no visited site lies strictly ahead of the worm along dir.
  bool is_tan_point(Direction dir) const {
    if (!visits_) throw TrackingDisabled("is_tan_point requires visit tracking");
    return !visits_->any_ahead(position_, dir);
  }

  StepOutcome<D> apply_move(Direction dir) {
    StepOutcome<D> out;
    out.direction = dir;
    if (visits_) {
      const bool tan = !visits_->any_ahead(position_, dir);
      out.tan_point = tan;
      if (tan) ++*tan_total_;
    }
    const std::optional<Site<D>> ahead = holes_.nearest_ahead(position_, dir);
    const Site<D> dest = neighbor<D>(position_, dir);
    if (!ahead) {
      holes_.insert(dest);
      ++created_total_;
      out.event = Event::kCreated;
    } else if (*ahead == dest) {
      out.event = Event::kNoChange;
    } else {
      holes_.erase(*ahead);
      holes_.insert(dest);
      out.event = Event::kTransferred;
      out.transferred_from = *ahead;
    }
    position_ = dest;
    ++step_count_;
    if (visits_) visits_->insert(dest);
    out.new_position = dest;
    out.hole_count_after = holes_.size();
    return out;
  }

  Direction draw() {
    if (!rng_) throw Error("worm has no generator; drive it with apply_move");
    return draw_direction(*rng_, D);
  }

  StepOutcome<D> step() { return apply_move(draw()); }

  std::vector<Site<D>> holes_snapshot() const { return holes_.sorted(); }

  // Test-only: reinserts a hole without touching counters, to build negative
  // controls for the equivalence checks.
  void inject_hole_unchecked(const Site<D>& s) { holes_.insert(s); }

 private:
  struct Bare {};

  Worm(Bare, bool track_visits) {
    holes_.insert(position_);
    if (track_visits) {
      visits_.emplace();
      visits_->insert(position_);
      tan_total_ = 0;
    }
  }

  Site<D> position_ = origin<D>();
  std::uint64_t step_count_ = 0;
  HoleIndex<D> holes_;
  std::optional<VisitIndex<D>> visits_;
  std::optional<Xoshiro256pp> rng_;
  std::uint64_t created_total_ = 1;
  std::optional<std::uint64_t> tan_total_;
};

// Applies `steps` random steps. Records (k, S_k) whenever k is a multiple of
// record_every, including the starting time.
template <int D>
RunSummary run(Worm<D>& worm, std::uint64_t steps, std::optional<std::uint64_t> record_every = {}) {
  if (record_every && *record_every == 0) throw ParameterError("record_every must be positive");
  RunSummary summary;
  auto record = [&] {
    if (record_every && worm.step_count() % *record_every == 0) {
      summary.series.emplace_back(worm.step_count(), worm.hole_count());
    }
  };
  record();
  for (std::uint64_t k = 0; k < steps; ++k) {
    worm.step();
    record();
  }
  summary.steps = steps;
  summary.s_n = worm.hole_count();
  summary.created_total = worm.created_total();
  summary.tan_total = worm.tan_total();
  return summary;
}

}  // namespace earthworm
