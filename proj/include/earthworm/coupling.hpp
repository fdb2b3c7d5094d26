#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "earthworm/error.hpp"
#include "earthworm/rng.hpp"
#include "earthworm/worm.hpp"

namespace earthworm {

// The restarted process: same site and clock as `main`, every earlier hole
// erased except the one under the worm. It has no generator; moves are fed
// through apply_move.
template <int D>
Worm<D> restart(const Worm<D>& main) {
  return Worm<D>::driven(main.position(), main.step_count());
}

struct CouplingViolation {
  std::uint64_t step = 0;
  std::string kind;  // "subset", "indicator" or "count"
  std::string detail;
};

struct CouplingReport {
  bool subset_ok = true;     // H'_k is contained in H_k
  bool indicator_ok = true;  // main creates => restarted creates
  bool count_ok = true;      // S'_k <= S_k
  std::optional<CouplingViolation> first_violation;
  std::uint64_t strict_steps = 0;  // steps where only the restarted worm created
  bool identical = true;           // H'_k == H_k at every checked k

  bool ok() const { return subset_ok && indicator_ok && count_ok; }
};

// Runs the worm of `seed` for n steps, restarts a copy at time i, and checks
// the pathwise domination at every k in [i, n].
template <int D>
CouplingReport verify_coupling(std::uint64_t seed, std::uint64_t n, std::uint64_t i) {
  if (i > n) throw ParameterError("restart time must not exceed the horizon");
  Xoshiro256pp rng(seed);
  std::vector<Direction> moves(n);
  for (auto& m : moves) m = draw_direction(rng, D);

  Worm<D> main(seed);
  for (std::uint64_t k = 0; k < i; ++k) main.apply_move(moves[k]);
  Worm<D> restarted = restart(main);

  CouplingReport report;
  auto flag = [&](std::uint64_t k, const char* kind, std::string detail) {
    if (!report.first_violation) report.first_violation = CouplingViolation{k, kind, std::move(detail)};
  };
  auto check_sets = [&](std::uint64_t k) {
    for (const auto& h : restarted.holes().sites()) {
      if (!main.holes().contains(h)) {
        report.subset_ok = false;
        flag(k, "subset", "restarted hole missing from main hole set");
        break;
      }
    }
    if (restarted.hole_count() > main.hole_count()) {
      report.count_ok = false;
      flag(k, "count", "S'=" + std::to_string(restarted.hole_count()) +
                           " > S=" + std::to_string(main.hole_count()));
    }
    if (restarted.hole_count() != main.hole_count()) report.identical = false;
  };

  check_sets(i);
  for (std::uint64_t k = i; k < n; ++k) {
    const auto a = main.apply_move(moves[k]);
    const auto b = restarted.apply_move(moves[k]);
    const bool main_created = a.event == Event::kCreated;
    const bool restarted_created = b.event == Event::kCreated;
    if (main_created && !restarted_created) {
      report.indicator_ok = false;
      flag(k + 1, "indicator", "main created a hole but the restarted worm did not");
    }
    if (restarted_created && !main_created) ++report.strict_steps;
    check_sets(k + 1);
  }
  return report;
}

inline CouplingReport verify_coupling(std::uint64_t seed, std::uint64_t n, std::uint64_t i, int dim) {
  return with_dimension(dim, [&]<int D>() { return verify_coupling<D>(seed, n, i); });
}

}  // namespace earthworm
