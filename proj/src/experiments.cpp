#include "prap/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <regex>
#include <stdexcept>

#include <fmt/format.h>

namespace prap {

int MRule::apply(int n) const {
  const double scale = power == 2 ? static_cast<double>(n) * n : static_cast<double>(n);
  return std::max(1, static_cast<int>(std::lround(coefficient * scale)));
}

std::string MRule::to_string() const {
  return fmt::format("m={}*n{}", coefficient, power == 2 ? "^2" : "");
}

MRule MRule::parse(const std::string& text) {
  static const std::regex pattern(R"(^\s*(?:m\s*=\s*)?([0-9]*\.?[0-9]+)\s*\*\s*n(\^2)?\s*$)");
  std::smatch match;
  if (!std::regex_match(text, match, pattern)) {
    throw std::invalid_argument("m-rule must look like 'm=k*n' or 'm=k*n^2': " + text);
  }
  MRule rule;
  rule.coefficient = std::stod(match[1].str());
  rule.power = match[2].matched ? 2 : 1;
  if (!(rule.coefficient > 0.0)) throw std::invalid_argument("m-rule coefficient must be > 0");
  return rule;
}

std::vector<std::pair<int, int>> CellLayout::cells() const {
  std::vector<int> ns = n_values;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  std::vector<std::pair<int, int>> out;
  if (m_rule) {
    for (int n : ns) out.emplace_back(n, m_rule->apply(n));
    return out;
  }
  std::vector<int> ms = m_values;
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  for (int n : ns) {
    for (int m : ms) out.emplace_back(n, m);
  }
  return out;
}

void CellLayout::validate() const {
  if (n_values.empty()) throw std::invalid_argument("grid: n_values must be non-empty");
  if (!m_rule && m_values.empty()) {
    throw std::invalid_argument("grid: give m_values or an m-rule");
  }
  for (int n : n_values) {
    if (n < 1) throw std::invalid_argument("grid: n must be >= 1");
  }
  for (int m : m_values) {
    if (m < 1) throw std::invalid_argument("grid: m must be >= 1");
  }
}

void GridSpec::validate() const {
  layout.validate();
  if (trials < 1) throw std::invalid_argument("grid: trials must be >= 1");
  solver.validate();
  if (solver.init_mode == InitMode::provided) {
    throw std::invalid_argument("grid: init mode must be spectral or random");
  }
}

void StagnationSpec::validate() const {
  layout.validate();
  if (instances < 1) throw std::invalid_argument("stagnation: instances must be >= 1");
  if (inits_per_instance < 1) {
    throw std::invalid_argument("stagnation: inits_per_instance must be >= 1");
  }
  solver.validate();
}

void MnCurveSpec::validate() const {
  if (n_values.empty()) throw std::invalid_argument("mn-curve: n_values must be non-empty");
  if (instances < 1 || inits_per_instance < 1) {
    throw std::invalid_argument("mn-curve: instances and inits must be >= 1");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("mn-curve: threshold must lie in (0, 1)");
  }
  solver.validate();
}

std::uint64_t config_hash(const std::string& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_canonical_string(const SolverConfig& c) {
  return fmt::format("max_iters={};success_tol={};stall_tol={};init={};power_iters={};"
                     "power_tol={};mu={}",
                     c.max_iters, c.success_tol, c.stall_tol, to_string(c.init_mode),
                     c.power_iters, c.power_tol, c.mu);
}

namespace {

std::string canonical_layout(const CellLayout& layout) {
  std::string out = "cells=";
  for (auto [n, m] : layout.cells()) out += fmt::format("({},{})", n, m);
  return out;
}

int resolve_threads(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

template <class Fn>
void parallel_for(int count, int threads, Fn&& fn) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_threads(threads))
  for (int i = 0; i < count; ++i) fn(i);
}

template <class Fn>
void serial_for(int count, Fn&& fn) {
  for (int i = 0; i < count; ++i) fn(i);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Trials of cell c occupy indices [c * trials, (c + 1) * trials).
template <class Loop>
GridResult grid_driver(const GridSpec& spec, Loop&& loop) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto cells = spec.layout.cells();
  const int per_cell = spec.trials;
  const int total = static_cast<int>(cells.size()) * per_cell;
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(total));
  loop(total, [&](int i) {
    const auto [n, m] = cells[static_cast<std::size_t>(i / per_cell)];
    outcomes[static_cast<std::size_t>(i)] = run_grid_trial(spec, n, m, i % per_cell);
  });

  GridResult result;
  result.master_seed = spec.master_seed;
  result.config_hash = config_hash(canonical_layout(spec.layout) +
                                   fmt::format(";trials={};", spec.trials) +
                                   to_canonical_string(spec.solver));
  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellResult cell;
    cell.n = cells[c].first;
    cell.m = cells[c].second;
    cell.trials = per_cell;
    long iterations = 0;
    for (int t = 0; t < per_cell; ++t) {
      const TrialOutcome& o = outcomes[c * per_cell + static_cast<std::size_t>(t)];
      cell.successes += o.success ? 1 : 0;
      cell.stalled += o.stalled ? 1 : 0;
      cell.errors += o.error ? 1 : 0;
      iterations += o.iterations;
    }
    cell.probability = static_cast<double>(cell.successes) / per_cell;
    cell.mean_iterations = static_cast<double>(iterations) / per_cell;
    result.cells.push_back(cell);
  }
  result.wall_seconds = seconds_since(start);
  return result;
}

template <class Loop>
GridResult stagnation_driver(const StagnationSpec& spec, Loop&& loop) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto cells = spec.layout.cells();
  const int per_cell = spec.instances;
  const int total = static_cast<int>(cells.size()) * per_cell;
  std::vector<InstanceOutcome> outcomes(static_cast<std::size_t>(total));
  loop(total, [&](int i) {
    const auto [n, m] = cells[static_cast<std::size_t>(i / per_cell)];
    outcomes[static_cast<std::size_t>(i)] = run_stagnation_instance(spec, n, m, i % per_cell);
  });

  GridResult result;
  result.master_seed = spec.master_seed;
  result.config_hash = config_hash(
      canonical_layout(spec.layout) +
      fmt::format(";instances={};inits={};", spec.instances, spec.inits_per_instance) +
      to_canonical_string(spec.solver));
  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellResult cell;
    cell.n = cells[c].first;
    cell.m = cells[c].second;
    cell.trials = per_cell;
    long iterations = 0;
    long runs = 0;
    for (int t = 0; t < per_cell; ++t) {
      const InstanceOutcome& o = outcomes[c * per_cell + static_cast<std::size_t>(t)];
      cell.successes += o.no_stagnation ? 1 : 0;
      cell.errors += o.error ? 1 : 0;
      iterations += o.iterations;
      runs += o.runs;
    }
    cell.probability = static_cast<double>(cell.successes) / per_cell;
    cell.mean_iterations = runs > 0 ? static_cast<double>(iterations) / runs : 0.0;
    result.cells.push_back(cell);
  }
  result.wall_seconds = seconds_since(start);
  return result;
}

}  // namespace

TrialOutcome run_grid_trial(const GridSpec& spec, int n, int m, int trial) {
  const SeedSpec seed{spec.master_seed, static_cast<std::uint64_t>(n),
                      static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(trial)};
  TrialOutcome out;
  try {
    const Problem problem = make_problem(n, m, seed);
    const Trajectory traj = run_ap(problem, spec.solver, seed.with(StreamTag::init).derive());
    out.success = traj.verdict == Verdict::success;
    out.stalled = traj.verdict == Verdict::stalled;
    out.iterations = traj.iterations_run;
  } catch (const std::exception&) {
    out.error = true;
  }
  return out;
}

GridResult run_success_grid(const GridSpec& spec, int threads) {
  return grid_driver(spec, [threads](int count, auto&& fn) { parallel_for(count, threads, fn); });
}

GridResult run_success_grid_serial(const GridSpec& spec) {
  return grid_driver(spec, [](int count, auto&& fn) { serial_for(count, fn); });
}

ComplexVector sample_not_almost_orthogonal(const ComplexVector& x0, double mu, Engine& engine,
                                           int max_resamples) {
  for (int k = 0; k <= max_resamples; ++k) {
    ComplexVector x = random_isotropic_init(x0.size(), engine);
    if (!is_almost_orthogonal(x, x0, mu)) return x;
  }
  throw std::runtime_error("sample_not_almost_orthogonal: resample cap reached");
}

InstanceOutcome run_stagnation_instance(const StagnationSpec& spec, int n, int m, int instance) {
  const SeedSpec seed{spec.master_seed, static_cast<std::uint64_t>(n),
                      static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(instance)};
  InstanceOutcome out;
  try {
    const Problem problem = make_problem(n, m, seed);
    const ComplexVector& x0 = *problem.ground_truth();
    Engine engine = seed.with(StreamTag::stagnation_init).engine();
    out.no_stagnation = true;
    for (int k = 0; k < spec.inits_per_instance; ++k) {
      const ComplexVector init =
          sample_not_almost_orthogonal(x0, spec.solver.mu, engine, spec.max_resamples);
      const Trajectory traj = run_ap(problem, spec.solver, init);
      ++out.runs;
      out.iterations += traj.iterations_run;
      if (traj.verdict != Verdict::success) {
        out.no_stagnation = false;
        break;
      }
    }
  } catch (const std::exception&) {
    out.error = true;
    out.no_stagnation = false;
  }
  return out;
}

GridResult probe_stagnation(const StagnationSpec& spec, int threads) {
  return stagnation_driver(spec,
                           [threads](int count, auto&& fn) { parallel_for(count, threads, fn); });
}

GridResult probe_stagnation_serial(const StagnationSpec& spec) {
  return stagnation_driver(spec, [](int count, auto&& fn) { serial_for(count, fn); });
}

std::vector<MnPoint> compute_mn_curve(const MnCurveSpec& spec, int threads) {
  spec.validate();
  std::vector<int> ns = spec.n_values;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

  std::vector<MnPoint> out;
  for (int n : ns) {
    MnPoint point;
    point.n = n;
    std::map<int, double> cache;
    auto p_stagnation = [&](int m) {
      if (auto it = cache.find(m); it != cache.end()) return it->second;
      StagnationSpec probe;
      probe.layout.n_values = {n};
      probe.layout.m_values = {m};
      probe.instances = spec.instances;
      probe.inits_per_instance = spec.inits_per_instance;
      probe.master_seed = spec.master_seed;
      probe.solver = spec.solver;
      const double p = 1.0 - probe_stagnation(probe, threads).cells.front().probability;
      cache.emplace(m, p);
      point.probes.emplace_back(m, p);
      return p;
    };

    const int m_lo = std::max(1, spec.m_min.value_or(n));
    const int m_hi = spec.m_max.value_or(4 * n * n);
    const int step = std::max(1, n * n / 8);
    std::optional<int> crossing;
    int previous = m_lo;
    for (int m = m_lo; m <= m_hi; m += step) {
      if (p_stagnation(m) < spec.threshold) {
        crossing = m;
        break;
      }
      previous = m;
    }
    if (crossing && *crossing > m_lo) {
      int below = previous;  // P >= threshold
      int above = *crossing; // P < threshold
      while (above - below > 1) {
        const int mid = below + (above - below) / 2;
        if (p_stagnation(mid) < spec.threshold) {
          above = mid;
        } else {
          below = mid;
        }
      }
      crossing = above;
    }
    point.m_n = crossing;
    if (crossing) point.ratio = static_cast<double>(*crossing) / (static_cast<double>(n) * n);
    out.push_back(std::move(point));
  }
  return out;
}

}  // namespace prap
