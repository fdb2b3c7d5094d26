#pragma once

// Command-line front end. Kept in a header so tests can drive it in-process.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "earthworm/earthworm.hpp"

namespace earthworm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& msg) : Error(msg) {}
};

inline unsigned default_parallelism() {
  if (const char* env = std::getenv("EARTHWORM_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline std::vector<std::uint64_t> parse_u64_list(const std::string& text, const char* what) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      if (tok.empty() || tok[0] == '-') throw std::invalid_argument(tok);
      out.push_back(std::stoull(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": bad value '" + tok + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(what) + ": empty list");
  return out;
}

// "a..b" (inclusive), "a" or "a,b,c".
inline std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const auto lo = parse_u64_list(text.substr(0, dots), "--seeds");
    const auto hi = parse_u64_list(text.substr(dots + 2), "--seeds");
    if (lo.size() != 1 || hi.size() != 1 || lo[0] > hi[0]) throw UsageError("--seeds: bad range '" + text + "'");
    std::vector<std::uint64_t> out;
    for (std::uint64_t s = lo[0];; ++s) {
      out.push_back(s);
      if (s == hi[0]) break;
    }
    return out;
  }
  return parse_u64_list(text, "--seeds");
}

// Comma-separated direction names (right,left,up,down) or integer codes.
inline std::vector<Direction> parse_moves(const std::string& text, int dim) {
  std::vector<Direction> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    int code = -1;
    if (tok == "right") code = 0;
    else if (tok == "left") code = 1;
    else if (tok == "up") code = 2;
    else if (tok == "down") code = 3;
    else {
      try {
        std::size_t used = 0;
        code = std::stoi(tok, &used);
        if (used != tok.size()) code = -1;
      } catch (const std::exception&) {
        code = -1;
      }
    }
    if (code < 0 || code >= 2 * dim) throw UsageError("--moves: bad direction '" + tok + "'");
    out.push_back(Direction::from_code(code));
  }
  return out;
}

// Output target: a file path, or the provided stream when empty or "-".
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      os_ = &fallback;
    } else {
      file_.open(path, std::ios::trunc);
      if (!file_) throw Error("cannot write " + path);
      os_ = &file_;
    }
  }
  std::ostream& stream() { return *os_; }
  void finish() {
    os_->flush();
    if (!*os_) throw Error("write failed");
  }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error("cannot write " + path);
  f << text;
  if (!f) throw Error("write failed for " + path);
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return in;
}

inline SampleTable load_table(const std::string& path) {
  auto in = open_input(path);
  return read_table_csv(in);
}

struct SimulateOptions {
  int dim = 2;
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  bool track_visits = false;
  std::string out;
  std::string holes_out;
  std::string visits_out;
  std::optional<std::uint64_t> record_every;
  std::string checkpoint;
  std::uint64_t checkpoint_every = 0;
  bool resume = false;
  bool omit_timing = false;
  bool holes_to_stream = false;  // write the hole set to the output stream instead of a summary
  std::string moves;
};

template <int D>
int simulate(const SimulateOptions& o, std::ostream& out) {
  using clock = std::chrono::steady_clock;
  std::vector<Direction> moves;
  if (!o.moves.empty()) moves = parse_moves(o.moves, D);
  const std::uint64_t target = moves.empty() ? o.steps : moves.size();

  std::optional<Worm<D>> worm;
  json series = json::array();
  if (o.resume && !o.checkpoint.empty() && std::filesystem::exists(o.checkpoint)) {
    json info;
    worm.emplace(load_worm_checkpoint<D>(o.checkpoint, &info));
    if (detail::require_as<std::uint64_t>(info, "seed") != o.seed ||
        detail::require_as<std::uint64_t>(info, "target_steps") != target) {
      throw Error("checkpoint " + o.checkpoint + " belongs to a different run");
    }
    series = detail::require(info, "series");
  } else {
    worm.emplace(o.seed, o.track_visits);
  }

  auto record = [&] {
    if (o.record_every && worm->step_count() % *o.record_every == 0) {
      series.push_back(json::array({worm->step_count(), worm->hole_count()}));
    }
  };
  auto save = [&] {
    json info{{"seed", o.seed}, {"target_steps", target}, {"series", series}};
    save_worm_checkpoint(o.checkpoint, *worm, info);
  };

  const auto t0 = clock::now();
  if (worm->step_count() == 0 && series.empty()) record();
  while (worm->step_count() < target) {
    if (moves.empty()) {
      worm->step();
    } else {
      worm->apply_move(moves[worm->step_count()]);
    }
    record();
    if (!o.checkpoint.empty() && o.checkpoint_every > 0 && worm->step_count() % o.checkpoint_every == 0) save();
  }
  const double wall = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  if (!o.checkpoint.empty()) save();

  json summary;
  summary["dim"] = D;
  summary["seed"] = o.seed;
  summary["steps"] = worm->step_count();
  summary["s_n"] = worm->hole_count();
  summary["created_total"] = worm->created_total();
  summary["tan_total"] = worm->tan_total() ? json(*worm->tan_total()) : json(nullptr);
  summary["position"] = worm->position();
  if (o.record_every) summary["series"] = series;
  if (!o.omit_timing) summary["walltime_ms"] = wall;

  if (!o.holes_out.empty() && !o.holes_to_stream) {
    std::ostringstream ss;
    write_sites<D>(ss, worm->holes_snapshot());
    write_text_file(o.holes_out, ss.str());
  }
  if (!o.visits_out.empty() && worm->visits()) {
    std::ostringstream ss;
    write_sites<D>(ss, worm->visits()->sorted());
    write_text_file(o.visits_out, ss.str());
  }
  if (o.holes_to_stream) {
    write_sites<D>(out, worm->holes_snapshot());
    out.flush();
    return kExitOk;
  }
  Sink sink(o.out, out);
  sink.stream() << summary.dump(2) << '\n';
  sink.finish();
  return kExitOk;
}

struct SweepOptions {
  int dim = 2;
  std::string n_grid;
  std::uint64_t replicas = 1;
  std::uint64_t seed = 0;
  unsigned parallelism = 1;
  bool track_visits = false;
  std::string out;
  std::string checkpoint;
  std::uint64_t checkpoint_every = 1;
  bool resume = false;
};

inline int sweep(const SweepOptions& o, std::ostream& out, std::ostream& err) {
  ExperimentPlan plan;
  plan.dim = o.dim;
  plan.n_grid = parse_u64_list(o.n_grid, "--n-grid");
  plan.replicas = o.replicas;
  plan.seed_base = o.seed;
  plan.track_visits = o.track_visits;
  plan.validate();

  std::optional<SweepCheckpointOptions> ckpt;
  if (!o.checkpoint.empty()) ckpt = SweepCheckpointOptions{o.checkpoint, o.checkpoint_every, o.resume};
  const SampleTable table = run_sweep(plan, o.parallelism, ckpt ? &*ckpt : nullptr);

  Sink sink(o.out, out);
  write_table_csv(sink.stream(), table);
  sink.finish();
  if (const auto failed = table.failed_rows(); failed > 0) {
    err << failed << " rows failed\n";
    return kExitFailure;
  }
  return kExitOk;
}

struct VerifyOptions {
  std::string suite;
  std::string seeds = "1..10";
  std::uint64_t steps = 1000;
  int dim = 2;
  std::string restart_at = "1,10,100";
  std::optional<std::uint64_t> inject_fault_at;
  std::string out;
};

inline int verify(const VerifyOptions& o, std::ostream& out) {
  check_dimension(o.dim);
  const auto seeds = parse_seed_range(o.seeds);
  json report;
  report["suite"] = o.suite;
  report["dim"] = o.dim;
  report["steps"] = o.steps;
  report["seeds_checked"] = 0;
  bool ok = true;

  if (o.suite == "oracle") {
    std::optional<FaultInjection> fault;
    if (o.inject_fault_at) fault = FaultInjection{*o.inject_fault_at};
    for (std::uint64_t seed : seeds) {
      const auto r = replay_equivalence(seed, o.steps, o.dim, fault);
      report["seeds_checked"] = report["seeds_checked"].get<std::uint64_t>() + 1;
      if (!r.equal) {
        ok = false;
        report["first_divergence"] = {
            {"seed", seed}, {"step", r.first_divergence->step}, {"detail", r.first_divergence->detail}};
        break;
      }
    }
  } else if (o.suite == "coupling") {
    const auto restarts = parse_u64_list(o.restart_at, "--restart-at");
    for (std::uint64_t i : restarts) {
      if (i > o.steps) throw UsageError("--restart-at: restart time beyond --steps");
    }
    std::uint64_t strict = 0;
    for (std::uint64_t seed : seeds) {
      for (std::uint64_t i : restarts) {
        const auto r = verify_coupling(seed, o.steps, i, o.dim);
        strict += r.strict_steps;
        if (!r.ok()) {
          ok = false;
          report["first_violation"] = {{"seed", seed},
                                       {"restart_at", i},
                                       {"step", r.first_violation->step},
                                       {"kind", r.first_violation->kind},
                                       {"detail", r.first_violation->detail}};
          break;
        }
      }
      report["seeds_checked"] = report["seeds_checked"].get<std::uint64_t>() + 1;
      if (!ok) break;
    }
    report["restart_at"] = restarts;
    report["strict_creation_steps"] = strict;
  } else {
    throw UsageError("--suite must be 'oracle' or 'coupling'");
  }
  report["passed"] = ok;
  Sink sink(o.out, out);
  sink.stream() << report.dump(2) << '\n';
  sink.finish();
  return ok ? kExitOk : kExitFailure;
}

inline json fit_to_json(const RegressionFit& f) {
  json j{{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}, {"points", f.points}};
  j["slope_stderr"] = std::isnan(f.slope_stderr) ? json(nullptr) : json(f.slope_stderr);
  return j;
}

// Plot-ready data: one row per point plus the fitted value, in log space.
inline void write_fit_plot(const std::string& path, const std::vector<std::pair<double, double>>& pts,
                           const RegressionFit& fit) {
  std::ostringstream ss;
  ss << "ln_n,ln_value,fitted\n";
  char buf[96];
  for (const auto& [n, v] : pts) {
    const double x = std::log(n);
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", x, std::log(v), fit.intercept + fit.slope * x);
    ss << buf;
  }
  write_text_file(path, ss.str());
}

// Samples of S_n at grid point n, or at the table's only grid point.
inline std::vector<double> table_samples(const SampleTable& table, std::optional<std::uint64_t> n) {
  const auto grid = table.grid();
  if (!n) {
    if (grid.size() != 1) throw UsageError("table has several n values; pass --n");
    n = grid.front();
  }
  auto s = table.s_values(*n);
  if (s.empty()) throw UsageError("no samples at n=" + std::to_string(*n));
  return s;
}

struct StatsOptions {
  std::string input;
  std::optional<std::uint64_t> n;
  std::vector<double> thetas{0.25, 0.5, 0.75};
  double delta = 0.5;
  std::string plot_out;
  std::string holes;
  std::string visited;
  bool full_connectivity = false;
  std::string out;
};

inline int stats(const std::string& which, const StatsOptions& o, std::ostream& out) {
  json result;
  result["statistic"] = which;
  if (which == "regress") {
    const auto table = load_table(o.input);
    const auto means = table.means();
    const auto fit = ols_loglog(means);
    result["fit"] = fit_to_json(fit);
    json pts = json::array();
    for (const auto& [n, m] : means) pts.push_back({{"n", n}, {"mean_s_n", m}});
    result["points"] = pts;
    if (!o.plot_out.empty()) write_fit_plot(o.plot_out, means, fit);
  } else if (which == "tanpoints") {
    const auto table = load_table(o.input);
    const auto freq = tan_point_frequencies(table);
    const auto fit = ols_loglog(freq);
    result["fit"] = fit_to_json(fit);
    json pts = json::array();
    for (const auto& [n, p] : freq) pts.push_back({{"n", n}, {"tan_frequency", p}});
    result["points"] = pts;
    if (!o.plot_out.empty()) write_fit_plot(o.plot_out, freq, fit);
  } else if (which == "ks") {
    const auto s = table_samples(load_table(o.input), o.n);
    const auto ks = ks_normal(s);
    result["D"] = ks.statistic;
    result["p_value"] = ks.p_value;
    result["m"] = ks.m;
  } else if (which == "pz") {
    const auto s = table_samples(load_table(o.input), o.n);
    json rows = json::array();
    bool all = true;
    for (double theta : o.thetas) {
      const auto pz = paley_zygmund_check(s, theta);
      all = all && pz.holds();
      rows.push_back({{"theta", theta}, {"empirical_prob", pz.empirical_prob}, {"bound", pz.bound}, {"holds", pz.holds()}});
    }
    result["checks"] = rows;
    result["all_hold"] = all;
  } else if (which == "theorem") {
    const auto table = load_table(o.input);
    const auto s = table_samples(table, o.n);
    const std::uint64_t n = o.n ? *o.n : table.grid().front();
    result["n"] = n;
    result["delta"] = o.delta;
    result["fraction"] = theorem_fraction(s, n, o.delta);
  } else if (which == "components") {
    int hdim = 0;
    auto hin = open_input(o.holes);
    const auto holes = read_sites(hin, hdim);
    if (holes.empty()) throw UsageError("holes file is empty");
    std::optional<std::vector<std::vector<std::int64_t>>> visited;
    if (!o.visited.empty()) {
      int vdim = 0;
      auto vin = open_input(o.visited);
      visited = read_sites(vin, vdim);
      if (!visited->empty() && vdim != hdim) throw UsageError("holes and visited files differ in dimension");
    }
    const auto cs = hole_components(hdim, holes, visited,
                                    o.full_connectivity ? Connectivity::kFull : Connectivity::kAxis);
    result["dim"] = hdim;
    result["hole_component_sizes"] = cs.hole_sizes;
    result["hole_components"] = cs.hole_sizes.size();
    if (cs.trail_sizes) {
      result["trail_component_sizes"] = *cs.trail_sizes;
      result["trail_components"] = cs.trail_sizes->size();
    }
  }
  Sink sink(o.out, out);
  sink.stream() << result.dump(2) << '\n';
  sink.finish();
  return kExitOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Earthworm hole dynamics on Z^d: simulation, verification and statistics"};
  app.require_subcommand(1);

  SimulateOptions sim;
  bool sim_has_steps = false;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run one trajectory and write a JSON summary");
  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--dim", sim.dim, "Lattice dimension (>= 2)")->capture_default_str();
    cmd->add_option("--steps", sim.steps, "Number of steps");
    cmd->add_option("--seed", sim.seed, "Run seed")->capture_default_str();
    cmd->add_option("--moves", sim.moves, "Debug: explicit comma-separated moves instead of random steps");
    cmd->add_flag("--track-visits", sim.track_visits, "Track visited sites (tan points, trail)");
    cmd->add_option("--visits-out", sim.visits_out, "Write visited sites (one per line)");
  };
  add_run_flags(simulate_cmd);
  simulate_cmd->add_option("--out", sim.out, "Summary path (default stdout)");
  simulate_cmd->add_option("--holes-out", sim.holes_out, "Also write the hole set");
  simulate_cmd->add_option("--record-every", sim.record_every, "Record (k, S_k) every this many steps")
      ->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--checkpoint", sim.checkpoint, "Checkpoint file");
  simulate_cmd->add_option("--checkpoint-every", sim.checkpoint_every, "Save the checkpoint every this many steps");
  simulate_cmd->add_flag("--resume", sim.resume, "Continue from --checkpoint when it exists");
  simulate_cmd->add_flag("--omit-timing", sim.omit_timing, "Leave walltime_ms out of the summary");

  auto* dump_cmd = app.add_subcommand("holes-dump", "Run one trajectory and write its hole set");
  std::string dump_out;
  add_run_flags(dump_cmd);
  dump_cmd->add_option("--out", dump_out, "Holes file (default stdout)");

  SweepOptions sw;
  sw.parallelism = default_parallelism();
  auto* sweep_cmd = app.add_subcommand("sweep", "Replica sweep over an n grid, written as CSV");
  sweep_cmd->add_option("--dim", sw.dim, "Lattice dimension (>= 2)")->capture_default_str();
  sweep_cmd->add_option("--n-grid", sw.n_grid, "Comma-separated, strictly increasing step counts")->required();
  sweep_cmd->add_option("--replicas", sw.replicas, "Replicas per grid point")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--seed", sw.seed, "Seed base")->capture_default_str();
  sweep_cmd->add_option("--parallelism", sw.parallelism, "Worker threads (default $EARTHWORM_THREADS)")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_flag("--track-visits", sw.track_visits, "Track visits and report tan-point counts");
  sweep_cmd->add_option("--out", sw.out, "CSV path (default stdout)");
  sweep_cmd->add_option("--checkpoint", sw.checkpoint, "Checkpoint file");
  sweep_cmd->add_option("--checkpoint-every", sw.checkpoint_every, "Save after this many completed rows")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_flag("--resume", sw.resume, "Continue from --checkpoint when it exists");

  VerifyOptions vo;
  std::uint64_t inject_fault = 0;
  auto* verify_cmd = app.add_subcommand("verify", "Oracle-equivalence or coupling verification");
  verify_cmd->add_option("--suite", vo.suite, "oracle | coupling")->required()->check(CLI::IsMember({"oracle", "coupling"}));
  verify_cmd->add_option("--seeds", vo.seeds, "Seeds: a..b, a, or a,b,c")->capture_default_str();
  verify_cmd->add_option("--steps", vo.steps, "Steps per seed")->capture_default_str();
  verify_cmd->add_option("--dim", vo.dim, "Lattice dimension (>= 2)")->capture_default_str();
  verify_cmd->add_option("--restart-at", vo.restart_at, "Coupling restart times")->capture_default_str();
  auto* fault_opt = verify_cmd->add_option("--inject-fault-at", inject_fault,
                                           "Testing: skip the first transfer at or after this step (oracle suite)");
  verify_cmd->add_option("--out", vo.out, "Report path (default stdout)");

  auto* stats_cmd = app.add_subcommand("stats", "Estimators over sample tables and hole dumps");
  stats_cmd->require_subcommand(1);
  StatsOptions so;
  std::string stats_which;
  auto add_stats = [&](const char* name, const char* desc) {
    auto* c = stats_cmd->add_subcommand(name, desc);
    c->add_option("--out", so.out, "Result path (default stdout)");
    c->final_callback([&stats_which, name] { stats_which = name; });
    return c;
  };
  auto* regress = add_stats("regress", "Log-log OLS of mean S_n against n");
  regress->add_option("--input", so.input, "Sample table CSV")->required();
  regress->add_option("--plot-out", so.plot_out, "Write points and fitted line as CSV");
  auto* tan = add_stats("tanpoints", "Log-log OLS of tan-point frequency against n");
  tan->add_option("--input", so.input, "Sample table CSV")->required();
  tan->add_option("--plot-out", so.plot_out, "Write points and fitted line as CSV");
  auto* ks = add_stats("ks", "Kolmogorov-Smirnov normality check of S_n");
  ks->add_option("--input", so.input, "Sample table CSV")->required();
  ks->add_option("--n", so.n, "Grid point to test");
  auto* pz = add_stats("pz", "Paley-Zygmund bound check");
  pz->add_option("--input", so.input, "Sample table CSV")->required();
  pz->add_option("--n", so.n, "Grid point to test");
  pz->add_option("--theta", so.thetas, "Thresholds in (0,1)")->delimiter(',');
  auto* thm = add_stats("theorem", "Fraction of samples with S_n >= delta n^{3/4}");
  thm->add_option("--input", so.input, "Sample table CSV")->required();
  thm->add_option("--n", so.n, "Grid point to test");
  thm->add_option("--delta", so.delta, "Threshold constant")->capture_default_str();
  auto* comp = add_stats("components", "Connected-component sizes of a hole dump");
  comp->add_option("--holes", so.holes, "Holes file")->required();
  comp->add_option("--visited", so.visited, "Visited-sites file (enables trail components)");
  comp->add_flag("--full-connectivity", so.full_connectivity, "Use 3^d-1 neighbours instead of 2d");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate_cmd || *dump_cmd) {
      check_dimension(sim.dim);
      if (!sim.visits_out.empty() && !sim.track_visits) throw UsageError("--visits-out requires --track-visits");
      if (!sim.moves.empty() && (!sim.checkpoint.empty() || sim.resume)) {
        throw UsageError("--moves cannot be combined with checkpointing");
      }
      sim_has_steps = simulate_cmd->count("--steps") + dump_cmd->count("--steps") > 0;
      if (!sim_has_steps && sim.moves.empty()) throw UsageError("--steps is required");
      if (*dump_cmd) {
        // Holes go to --out (a summary is then printed) or straight to stdout.
        sim.omit_timing = true;
        sim.holes_out = dump_out;
        sim.holes_to_stream = dump_out.empty() || dump_out == "-";
      }
      return with_dimension(sim.dim, [&]<int D>() { return simulate<D>(sim, out); });
    }
    if (*sweep_cmd) return sweep(sw, out, err);
    if (*verify_cmd) {
      if (fault_opt->count() > 0) vo.inject_fault_at = inject_fault;
      return verify(vo, out);
    }
    if (*stats_cmd) return stats(stats_which, so, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidDimension& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParameterError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace earthworm::cli
