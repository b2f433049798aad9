// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "prap/experiments.hpp"
#include "prap/io.hpp"
#include "prap/validators.hpp"

using namespace prap;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Stalled endpoints collected along the way for the fixed-point criterion.
struct StalledRun {
  Problem problem;
  ComplexVector endpoint;
};
std::vector<StalledRun> g_stalled;

void keep_if_stalled(const Problem& problem, const Trajectory& traj) {
  if (traj.verdict == Verdict::stalled) g_stalled.push_back({problem, traj.final_iterate});
}

GridSpec criterion1_spec() {
  GridSpec spec;
  spec.layout.n_values = {8, 16, 32};
  spec.layout.m_rule = MRule{10.0, 1};
  spec.trials = 100;
  spec.master_seed = kSeed;
  spec.solver.init_mode = InitMode::truncated_spectral;
  return spec;
}

std::string grid_csv(const GridResult& r) {
  std::ostringstream s;
  write_grid_csv(s, r);
  return s.str();
}

Outcome global_convergence() {
  const GridResult r = run_success_grid(criterion1_spec());
  Outcome o{true, ""};
  for (const CellResult& c : r.cells) {
    o.pass = o.pass && c.probability >= 0.95;
    o.detail += fmt::format("n={} m={} p={:.2f}; ", c.n, c.m, c.probability);
  }
  return o;
}

// Longest run of ratios <= 0.95 after the error first drops below 0.1.
int geometric_run(const std::vector<double>& e) {
  std::size_t start = 0;
  while (start < e.size() && e[start] >= 0.1) ++start;
  int best = 0;
  int run = 0;
  for (std::size_t t = start; t + 1 < e.size() && e[t] > 1e-12; ++t) {
    run = (e[t + 1] <= 0.95 * e[t]) ? run + 1 : 0;
    best = std::max(best, run);
  }
  return best;
}

Outcome linear_rate() {
  const GridSpec spec = criterion1_spec();
  int successes = 0;
  int geometric = 0;
  int shortest = 1 << 30;
  for (auto [n, m] : spec.layout.cells()) {
    for (int trial = 0; trial < spec.trials; ++trial) {
      const SeedSpec seed{spec.master_seed, static_cast<std::uint64_t>(n),
                          static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(trial)};
      const Problem problem = make_problem(n, m, seed);
      const Trajectory traj = run_ap(problem, spec.solver, seed.with(StreamTag::init).derive());
      if (traj.verdict != Verdict::success) continue;
      ++successes;
      const int run = geometric_run(traj.rel_errors);
      shortest = std::min(shortest, run);
      if (run >= 5) ++geometric;
    }
  }
  const double frac = successes ? static_cast<double>(geometric) / successes : 0.0;
  return {successes > 0 && frac >= 0.99,
          fmt::format("{}/{} successful runs geometric (fraction {:.3f}, shortest run {})",
                      geometric, successes, frac, shortest)};
}

Outcome stagnation_crossings() {
  MnCurveSpec spec;
  spec.n_values = {2, 4, 10};
  spec.instances = 50;
  spec.inits_per_instance = 200;
  spec.master_seed = kSeed;
  const std::vector<MnPoint> curve = compute_mn_curve(spec);
  const int lo[] = {4, 13, 64};
  const int hi[] = {6, 19, 96};
  Outcome o{true, ""};
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const MnPoint& p = curve[i];
    const bool ok = p.m_n && *p.m_n >= lo[i] && *p.m_n <= hi[i];
    o.pass = o.pass && ok;
    o.detail += fmt::format("M_{}={} [{},{}]; ", p.n, p.m_n ? std::to_string(*p.m_n) : "none",
                            lo[i], hi[i]);
  }
  return o;
}

Outcome no_stagnation_regime() {
  StagnationSpec spec;
  spec.layout.n_values = {4};
  spec.layout.m_values = {32};
  spec.instances = 50;
  spec.inits_per_instance = 200;
  spec.master_seed = kSeed;
  const CellResult c = probe_stagnation(spec).cells.at(0);
  return {c.probability >= 0.95,
          fmt::format("{}/{} instances without stagnation (p={:.2f})", c.successes, c.trials,
                      c.probability)};
}

Outcome random_init() {
  GridSpec spec;
  spec.layout.n_values = {16};
  spec.layout.m_values = {128};
  spec.trials = 200;
  spec.master_seed = kSeed;
  spec.solver.init_mode = InitMode::random_isotropic;
  const CellResult c = run_success_grid(spec).cells.at(0);

  // Same trials, kept for the fixed-point check.
  for (int trial = 0; trial < spec.trials; ++trial) {
    const SeedSpec seed{kSeed, 16, 128, static_cast<std::uint64_t>(trial)};
    const Problem problem = make_problem(16, 128, seed);
    keep_if_stalled(problem, run_ap(problem, spec.solver, seed.with(StreamTag::init).derive()));
  }
  return {c.probability >= 0.90, fmt::format("p={:.3f} ({} stalled)", c.probability, c.stalled)};
}

Outcome residual_monotonicity() {
  // n in 2..9, m in n..4n with random init: a mix of successes and failures.
  SolverConfig config;
  config.init_mode = InitMode::random_isotropic;
  Engine dims(SeedSpec{kSeed, 0, 0, 0, StreamTag::validator}.derive());
  int violations = 0;
  int successes = 0;
  int failures = 0;
  for (int run = 0; run < 1000; ++run) {
    const int n = 2 + static_cast<int>(dims() % 8);
    const int m = n + static_cast<int>(dims() % (3 * n + 1));
    const SeedSpec seed{kSeed + 1000, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(m),
                        static_cast<std::uint64_t>(run)};
    const Problem problem = make_problem(n, m, seed);
    const Trajectory traj = run_ap(problem, config, seed.with(StreamTag::init).derive());
    keep_if_stalled(problem, traj);
    (traj.verdict == Verdict::success ? successes : failures)++;
    for (std::size_t t = 1; t < traj.residuals.size(); ++t) {
      if (traj.residuals[t] > traj.residuals[t - 1] + 1e-10) ++violations;
    }
  }
  return {violations == 0 && successes > 0 && failures > 0,
          fmt::format("{} violations over {} successes, {} failures", violations, successes,
                      failures)};
}

Outcome fixed_points() {
  int stalled_ok = 0;
  for (const StalledRun& s : g_stalled) {
    if (is_stagnation_point(s.problem, s.endpoint, 1e-6).is_fixed_point) ++stalled_ok;
  }
  int truth_ok = 0;
  for (int k = 0; k < 100; ++k) {
    const int n = 2 + k % 15;
    const int m = 4 * n + k % 7;
    const Problem problem = make_problem(n, m, SeedSpec{kSeed + 2000, 0, 0, static_cast<std::uint64_t>(k)});
    if (is_stagnation_point(problem, *problem.ground_truth(), 1e-12).is_fixed_point) ++truth_ok;
  }
  const bool pass = stalled_ok == static_cast<int>(g_stalled.size()) && truth_ok == 100;
  return {pass, fmt::format("stalled endpoints {}/{}, ground truth {}/100", stalled_ok,
                            g_stalled.size(), truth_ok)};
}

Outcome diff_phase() {
  const DiffPhaseReport r = validate_diff_phase(1000000, kSeed);
  return {r.passed() && r.samples == 1000000,
          fmt::format("{} samples, {} violations, max excess {:.3g}", r.samples, r.violations,
                      r.max_excess)};
}

Outcome min_f() {
  const MinFReport r = validate_min_f({0.3, 0.5, 1.0, 1.5, 2.0, 2.5, 20.0}, 1000000, kSeed);
  Outcome o{r.passed(), ""};
  for (const MinFEstimate& e : r.estimates) {
    if (e.asymptote_checked()) {
      o.detail += fmt::format("t={} t*f={:.4f}+-{:.4f}; ", e.t, e.t * e.re, 3 * e.t * e.stderr_re);
    } else {
      o.detail += fmt::format("t={} margin={:.4f}; ", e.t, e.margin());
    }
  }
  return o;
}

Outcome determinism() {
  const GridSpec spec = criterion1_spec();
  const std::string serial = grid_csv(run_success_grid_serial(spec));
  const std::string one = grid_csv(run_success_grid(spec, 1));
  const std::string four = grid_csv(run_success_grid(spec, 4));
  const std::string seven = grid_csv(run_success_grid(spec, 7));
  const bool pass = serial == one && one == four && four == seven;
  return {pass, "threads 1, 4, 7 and serial reference"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"global convergence, spectral init", global_convergence},
      {"linear convergence rate", linear_rate},
      {"stagnation 0.5-crossings", stagnation_crossings},
      {"no-stagnation regime n=4 m=32", no_stagnation_regime},
      {"random-init success n=16 m=128", random_init},
      {"fixed-point characterization", fixed_points},
      {"residual monotonicity", residual_monotonicity},
      {"diff-phase inequality", diff_phase},
      {"min-f lower bound", min_f},
      {"thread-count determinism", determinism},
  };
  // Fixed-point check consumes the stalled runs from criteria 5 and 7.
  const int order[] = {0, 1, 2, 3, 4, 6, 5, 7, 8, 9};

  std::vector<Outcome> results(criteria.size());
  std::vector<double> seconds(criteria.size());
  for (int i : order) {
    const auto t0 = std::chrono::steady_clock::now();
    results[i] = criteria[i].second();
    seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!results[i].pass) ++failures;
    fmt::print("{} criterion {}: {} ({:.1f}s) {}\n", results[i].pass ? "PASS" : "FAIL", i + 1,
               criteria[i].first, seconds[i], results[i].detail);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
