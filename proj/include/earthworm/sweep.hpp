#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <new>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "earthworm/checkpoint.hpp"
#include "earthworm/error.hpp"
#include "earthworm/rng.hpp"
#include "earthworm/worm.hpp"

namespace earthworm {

// replica_index-th output (0-based) of the splitmix64 sequence started at
// seed_base.
constexpr std::uint64_t derive_seed(std::uint64_t seed_base, std::uint64_t replica_index) {
  std::uint64_t z = seed_base + (replica_index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct ExperimentPlan {
  int dim = 2;
  std::vector<std::uint64_t> n_grid;
  std::uint64_t replicas = 1;
  std::uint64_t seed_base = 0;
  bool track_visits = false;

  void validate() const {
    check_dimension(dim);
    if (n_grid.empty()) throw ParameterError("n grid is empty");
    if (!std::is_sorted(n_grid.begin(), n_grid.end()) ||
        std::adjacent_find(n_grid.begin(), n_grid.end()) != n_grid.end()) {
      throw ParameterError("n grid must be strictly increasing");
    }
    if (replicas < 1) throw ParameterError("replicas must be at least 1");
  }

  friend bool operator==(const ExperimentPlan&, const ExperimentPlan&) = default;
};

struct SampleRow {
  int dim = 2;
  std::uint64_t n = 0;
  std::uint64_t replica = 0;
  std::uint64_t seed = 0;
  std::uint64_t s_n = 0;
  std::uint64_t created_total = 0;
  std::optional<std::uint64_t> tan_total;
  double walltime_ms = 0.0;
  std::optional<std::string> error;  // set when the run failed (e.g. out of memory)
};

struct SampleTable {
  std::vector<SampleRow> rows;

  std::vector<std::uint64_t> grid() const {
    std::vector<std::uint64_t> ns;
    for (const auto& r : rows) ns.push_back(r.n);
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    return ns;
  }

  std::vector<double> s_values(std::uint64_t n) const {
    std::vector<double> out;
    for (const auto& r : rows) {
      if (r.n == n && !r.error) out.push_back(static_cast<double>(r.s_n));
    }
    return out;
  }

  // (n, mean S_n) for every grid point, ignoring failed rows.
  std::vector<std::pair<double, double>> means() const {
    std::vector<std::pair<double, double>> out;
    for (std::uint64_t n : grid()) {
      const auto s = s_values(n);
      if (s.empty()) continue;
      double sum = 0;
      for (double v : s) sum += v;
      out.emplace_back(static_cast<double>(n), sum / static_cast<double>(s.size()));
    }
    return out;
  }

  std::size_t failed_rows() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.error.has_value(); }));
  }
};

inline json plan_to_json(const ExperimentPlan& p) {
  return json{{"dim", p.dim},
              {"n_grid", p.n_grid},
              {"replicas", p.replicas},
              {"seed_base", p.seed_base},
              {"track_visits", p.track_visits}};
}

inline ExperimentPlan plan_from_json(const json& j) {
  ExperimentPlan p;
  p.dim = detail::require_as<int>(j, "dim");
  p.n_grid = detail::require_as<std::vector<std::uint64_t>>(j, "n_grid");
  p.replicas = detail::require_as<std::uint64_t>(j, "replicas");
  p.seed_base = detail::require_as<std::uint64_t>(j, "seed_base");
  p.track_visits = detail::require_as<bool>(j, "track_visits");
  return p;
}

inline json row_to_json(const SampleRow& r) {
  return json{{"dim", r.dim},
              {"n", r.n},
              {"replica", r.replica},
              {"seed", r.seed},
              {"s_n", r.s_n},
              {"created_total", r.created_total},
              {"tan_total", r.tan_total ? json(*r.tan_total) : json(nullptr)},
              {"walltime_ms", r.walltime_ms}};
}

inline SampleRow row_from_json(const json& j) {
  SampleRow r;
  r.dim = detail::require_as<int>(j, "dim");
  r.n = detail::require_as<std::uint64_t>(j, "n");
  r.replica = detail::require_as<std::uint64_t>(j, "replica");
  r.seed = detail::require_as<std::uint64_t>(j, "seed");
  r.s_n = detail::require_as<std::uint64_t>(j, "s_n");
  r.created_total = detail::require_as<std::uint64_t>(j, "created_total");
  if (!detail::require(j, "tan_total").is_null()) r.tan_total = detail::require_as<std::uint64_t>(j, "tan_total");
  r.walltime_ms = detail::require_as<double>(j, "walltime_ms");
  return r;
}

struct SweepCheckpointOptions {
  std::filesystem::path path;
  std::uint64_t every_rows = 1;  // save after this many newly completed rows
  bool resume = false;
};

namespace detail {

// Progress shared between sweep workers; only touched under `mu`.
struct SweepProgress {
  std::mutex mu;
  std::map<std::pair<std::uint64_t, std::uint64_t>, SampleRow> done;  // keyed by (n, replica)
  std::map<std::uint64_t, json> in_flight;                             // replica -> worm state
  std::uint64_t since_save = 0;
};

inline void save_sweep_checkpoint(const SweepCheckpointOptions& opt, const ExperimentPlan& plan,
                                  const SweepProgress& progress) {
  json doc;
  doc["format_version"] = kCheckpointVersion;
  doc["kind"] = "sweep";
  doc["plan"] = plan_to_json(plan);
  json rows = json::array();
  for (const auto& [key, row] : progress.done) {
    if (!row.error) rows.push_back(row_to_json(row));
  }
  doc["rows"] = std::move(rows);
  json runs = json::object();
  for (const auto& [replica, state] : progress.in_flight) runs[std::to_string(replica)] = state;
  doc["runs"] = std::move(runs);
  write_json_file(opt.path, doc);
}

inline void load_sweep_checkpoint(const SweepCheckpointOptions& opt, const ExperimentPlan& plan,
                                  SweepProgress& progress) {
  const json doc = read_json_file(opt.path);
  check_checkpoint_header(doc, "sweep");
  if (!(plan_from_json(require(doc, "plan")) == plan)) {
    throw FormatError("checkpoint field 'plan': does not match the requested sweep");
  }
  for (const auto& r : require(doc, "rows")) {
    SampleRow row = row_from_json(r);
    progress.done[{row.n, row.replica}] = row;
  }
  const json& runs = require(doc, "runs");
  if (!runs.is_object()) throw FormatError("checkpoint field 'runs': expected object");
  for (const auto& [key, state] : runs.items()) progress.in_flight[std::stoull(key)] = state;
}

template <int D>
void run_replica(const ExperimentPlan& plan, std::uint64_t replica, SweepProgress& progress,
                 const SweepCheckpointOptions* ckpt) {
  using clock = std::chrono::steady_clock;
  const std::uint64_t seed = derive_seed(plan.seed_base, replica);

  std::optional<Worm<D>> worm;
  double elapsed_ms = 0.0;
  std::size_t first_pending = 0;
  {
    std::lock_guard lock(progress.mu);
    while (first_pending < plan.n_grid.size() && progress.done.contains({plan.n_grid[first_pending], replica})) {
      elapsed_ms = progress.done.at({plan.n_grid[first_pending], replica}).walltime_ms;
      ++first_pending;
    }
    if (first_pending == plan.n_grid.size()) return;
    if (auto it = progress.in_flight.find(replica); it != progress.in_flight.end()) {
      Worm<D> restored = worm_from_json<D>(it->second);
      const std::uint64_t expected = first_pending == 0 ? 0 : plan.n_grid[first_pending - 1];
      if (restored.step_count() == expected) worm.emplace(std::move(restored));
    }
  }
  if (!worm) {
    worm.emplace(seed, plan.track_visits);
    first_pending = 0;
    elapsed_ms = 0.0;
  }

  for (std::size_t g = first_pending; g < plan.n_grid.size(); ++g) {
    const std::uint64_t n = plan.n_grid[g];
    SampleRow row;
    row.dim = D;
    row.n = n;
    row.replica = replica;
    row.seed = seed;
    try {
      const auto t0 = clock::now();
      run(*worm, n - worm->step_count());
      elapsed_ms += std::chrono::duration<double, std::milli>(clock::now() - t0).count();
      row.s_n = worm->hole_count();
      row.created_total = worm->created_total();
      row.tan_total = worm->tan_total();
      row.walltime_ms = elapsed_ms;
    } catch (const std::bad_alloc&) {
      // Remaining grid points of this replica cannot be reached either.
      std::lock_guard lock(progress.mu);
      for (std::size_t h = g; h < plan.n_grid.size(); ++h) {
        SampleRow failed = row;
        failed.n = plan.n_grid[h];
        failed.error = "out of memory";
        progress.done[{failed.n, replica}] = failed;
      }
      progress.in_flight.erase(replica);
      return;
    }

    std::lock_guard lock(progress.mu);
    if (!progress.done.contains({n, replica})) progress.done[{n, replica}] = row;
    if (!ckpt) continue;
    if (g + 1 < plan.n_grid.size()) {
      progress.in_flight[replica] = worm_to_json(*worm);
    } else {
      progress.in_flight.erase(replica);
    }
    if (++progress.since_save >= ckpt->every_rows) {
      save_sweep_checkpoint(*ckpt, plan, progress);
      progress.since_save = 0;
    }
  }
}

}  // namespace detail

// Runs every replica of the plan across the whole n grid and returns one row
// per (n, replica), sorted by (n, replica).
//
// Replica r draws from a xoshiro256++ stream seeded with derive_seed(seed_base,
// r), and its rows for successive grid points are snapshots of one trajectory.
// Table contents do not depend on `parallelism`; only walltime_ms does.
inline SampleTable run_sweep(const ExperimentPlan& plan, unsigned parallelism,
                             const SweepCheckpointOptions* ckpt = nullptr) {
  plan.validate();
  if (parallelism < 1) throw ParameterError("parallelism must be at least 1");

  detail::SweepProgress progress;
  if (ckpt && ckpt->resume && std::filesystem::exists(ckpt->path)) {
    detail::load_sweep_checkpoint(*ckpt, plan, progress);
  }

  std::atomic<std::uint64_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (std::uint64_t r = next++; r < plan.replicas; r = next++) {
      try {
        with_dimension(plan.dim, [&]<int D>() { detail::run_replica<D>(plan, r, progress, ckpt); });
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  {
    const auto threads = static_cast<unsigned>(std::min<std::uint64_t>(parallelism, plan.replicas));
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  if (first_error) std::rethrow_exception(first_error);
  if (ckpt) detail::save_sweep_checkpoint(*ckpt, plan, progress);

  SampleTable table;
  table.rows.reserve(progress.done.size());
  for (auto& [key, row] : progress.done) table.rows.push_back(std::move(row));
  return table;
}

}  // namespace earthworm
