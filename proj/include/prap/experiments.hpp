#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prap/solver.hpp"

namespace prap {

/// m = round(coefficient * n^power); power is 1 or 2.
struct MRule {
  double coefficient = 1.0;
  int power = 1;

  int apply(int n) const;
  std::string to_string() const;  // "m=k*n" or "m=k*n^2"
  static MRule parse(const std::string& text);
};

/// Either the cross product n_values x m_values, or one cell per n from m_rule.
struct CellLayout {
  std::vector<int> n_values;
  std::vector<int> m_values;
  std::optional<MRule> m_rule;

  std::vector<std::pair<int, int>> cells() const;  // ordered by n, then m
  void validate() const;
};

struct GridSpec {
  CellLayout layout;
  int trials = 100;
  std::uint64_t master_seed = 0;
  SolverConfig solver;  // solver.init_mode selects Algorithm with/without initialization

  void validate() const;
};

struct CellResult {
  int n = 0;
  int m = 0;
  int trials = 0;
  int successes = 0;
  double probability = 0.0;
  double mean_iterations = 0.0;
  int stalled = 0;
  int errors = 0;  // trials aborted by a solver exception, counted as failures
};

struct GridResult {
  std::vector<CellResult> cells;
  std::uint64_t master_seed = 0;
  std::uint64_t config_hash = 0;
  double wall_seconds = 0.0;
};

/// Outcome of one trial; shared by the serial and parallel drivers.
struct TrialOutcome {
  bool success = false;
  bool stalled = false;
  bool error = false;
  int iterations = 0;
};

TrialOutcome run_grid_trial(const GridSpec& spec, int n, int m, int trial);

/// Empirical success probability per cell. Trials run in parallel with
/// OpenMP on `threads` threads (0 = runtime default); the aggregate is
/// identical for every thread count.
GridResult run_success_grid(const GridSpec& spec, int threads = 0);

/// Single-threaded reference for run_success_grid.
GridResult run_success_grid_serial(const GridSpec& spec);

struct StagnationSpec {
  CellLayout layout;
  int instances = 50;
  int inits_per_instance = 200;
  std::uint64_t master_seed = 0;
  SolverConfig solver;  // init_mode ignored; inits are random, not almost orthogonal
  int max_resamples = 1000;

  void validate() const;
};

/// Draws a random isotropic point that is not almost orthogonal to x0.
ComplexVector sample_not_almost_orthogonal(const ComplexVector& x0, double mu, Engine& engine,
                                           int max_resamples);

struct InstanceOutcome {
  bool no_stagnation = false;
  bool error = false;
  int runs = 0;        // AP runs performed; stops at the first failed init
  long iterations = 0;
};

InstanceOutcome run_stagnation_instance(const StagnationSpec& spec, int n, int m, int instance);

/// Per cell: fraction of (x0, A) instances for which every sampled init
/// succeeded ("no stagnation point found"). successes counts those instances;
/// mean_iterations averages over the AP runs actually performed.
GridResult probe_stagnation(const StagnationSpec& spec, int threads = 0);
GridResult probe_stagnation_serial(const StagnationSpec& spec);

struct MnCurveSpec {
  std::vector<int> n_values;
  int instances = 50;
  int inits_per_instance = 200;
  double threshold = 0.5;
  std::uint64_t master_seed = 0;
  SolverConfig solver;
  std::optional<int> m_min;  // default n
  std::optional<int> m_max;  // default 4 n^2

  void validate() const;
};

struct MnPoint {
  int n = 0;
  std::optional<int> m_n;  // empty when the search range has no crossing
  double ratio = 0.0;      // m_n / n^2
  std::vector<std::pair<int, double>> probes;  // (m, P[stagnation exists])
};

/// Smallest m at which the probability that a stagnation point exists falls
/// under the threshold: linear scan with step max(1, n^2/8), then bisection.
std::vector<MnPoint> compute_mn_curve(const MnCurveSpec& spec, int threads = 0);

/// FNV-1a over a canonical text rendering of the configuration.
std::uint64_t config_hash(const std::string& canonical);

std::string to_canonical_string(const SolverConfig& config);

}  // namespace prap
