#include "prap/solver.hpp"

#include <cmath>

namespace prap {

std::string_view to_string(InitMode mode) {
  switch (mode) {
    case InitMode::truncated_spectral: return "spectral";
    case InitMode::random_isotropic: return "random";
    case InitMode::provided: return "provided";
  }
  return "unknown";
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::success: return "success";
    case Verdict::stalled: return "stalled";
    case Verdict::budget_exhausted: return "budget_exhausted";
  }
  return "unknown";
}

InitMode parse_init_mode(std::string_view text) {
  if (text == "spectral" || text == "truncated_spectral") return InitMode::truncated_spectral;
  if (text == "random" || text == "random_isotropic") return InitMode::random_isotropic;
  if (text == "provided") return InitMode::provided;
  throw std::invalid_argument("unknown init mode: " + std::string(text));
}

void SolverConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
  if (!(success_tol > 0.0 && success_tol < 1.0)) {
    throw std::invalid_argument("SolverConfig: success_tol must lie in (0, 1)");
  }
  if (!(stall_tol >= 0.0)) throw std::invalid_argument("SolverConfig: stall_tol must be >= 0");
  if (power_iters < 1) throw std::invalid_argument("SolverConfig: power_iters must be >= 1");
  if (!(mu > 0.0)) throw std::invalid_argument("SolverConfig: mu must be > 0");
}

namespace {

// b . phase(y): projection of y onto {u : |u| = b}.
ComplexVector modulus_projection(const RealVector& b, const ComplexVector& y) {
  ComplexVector u(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) u[i] = b[i] * phase(y[i]);
  return u;
}

}  // namespace

ComplexVector ap_step(const Problem& problem, const ComplexVector& z) {
  require_same_size(z.size(), problem.n(), "ap_step");
  return problem.solver().solve(modulus_projection(problem.measurements(), problem.matrix() * z));
}

double spectral_norm_estimate(const Problem& problem) {
  const RealVector& b = problem.measurements();
  return std::sqrt(b.squaredNorm() / static_cast<double>(b.size()));
}

ComplexVector truncated_spectral_init(const Problem& problem, int power_iters, double power_tol,
                                      std::uint64_t seed) {
  const RealVector& b = problem.measurements();
  const double m = static_cast<double>(problem.m());
  const RealVector b2 = b.array().square();
  const double cutoff = 9.0 / m * b2.sum();
  const RealVector weights = (b2.array() <= cutoff).select(b2, 0.0) / m;
  if (!(weights.array() > 0.0).any()) {
    throw EmptyTruncationError("truncated_spectral_init: empty truncation");
  }
  const ComplexMatrix& a = problem.matrix();
  const LinearOperator apply = [&](const ComplexVector& v) -> ComplexVector {
    return a.adjoint() * (weights.cast<Complex>().cwiseProduct(a * v));
  };
  PowerResult top = power_iteration(apply, problem.n(), {power_iters, power_tol}, seed);
  return std::move(top.eigvec);
}

ComplexVector random_isotropic_init(Eigen::Index n, Engine& engine) {
  if (n < 1) throw DimensionError("random_isotropic_init: n must be >= 1");
  ComplexVector x = complex_gaussian_vector(n, engine);
  x.normalize();
  return x;
}

ComplexVector random_isotropic_init(Eigen::Index n, std::uint64_t seed) {
  Engine engine(seed);
  return random_isotropic_init(n, engine);
}

bool is_almost_orthogonal(const ComplexVector& x, const ComplexVector& x0, double mu) {
  require_same_size(x.size(), x0.size(), "is_almost_orthogonal");
  const double n = static_cast<double>(x.size());
  return std::abs(x0.dot(x)) < mu * x0.norm() * x.norm() / std::sqrt(n);
}

Trajectory run_ap(const Problem& problem, const SolverConfig& config, const ComplexVector& init) {
  config.validate();
  require_same_size(init.size(), problem.n(), "run_ap: init");

  const ComplexMatrix& a = problem.matrix();
  const RealVector& b = problem.measurements();
  const auto& x0 = problem.ground_truth();
  const double b_norm = b.norm() > 0.0 ? b.norm() : 1.0;
  const double x0_norm = x0 && x0->norm() > 0.0 ? x0->norm() : 1.0;

  Trajectory traj;
  if (problem.uniqueness_warning()) traj.flags.emplace_back("uniqueness_not_guaranteed");
  if (!x0) {
    traj.flags.emplace_back("no_ground_truth");
  } else if (is_almost_orthogonal(init, *x0, config.mu)) {
    traj.flags.emplace_back("init_almost_orthogonal");
  }

  // Records z_t (with y = A z_t) and reports whether it meets success_tol.
  auto record = [&](const ComplexVector& z, const ComplexVector& y) {
    traj.residuals.push_back((y.cwiseAbs() - b).norm() / b_norm);
    if (!x0) return false;
    const double rel = dist_up_to_phase(z, *x0) / x0_norm;
    traj.rel_errors.push_back(rel);
    return rel < config.success_tol;
  };

  ComplexVector z = init;
  ComplexVector y = a * z;
  traj.verdict = Verdict::budget_exhausted;
  if (record(z, y)) {
    traj.verdict = Verdict::success;
  } else {
    for (int t = 1; t <= config.max_iters; ++t) {
      ComplexVector next = problem.solver().solve(modulus_projection(b, y));
      const double change = dist_up_to_phase(next, z);
      z = std::move(next);
      y.noalias() = a * z;
      traj.iterations_run = t;
      if (record(z, y)) {
        traj.verdict = Verdict::success;
        break;
      }
      if (change < config.stall_tol * z.norm()) {
        traj.verdict = Verdict::stalled;
        break;
      }
    }
  }
  traj.final_iterate = std::move(z);
  return traj;
}

Trajectory run_ap(const Problem& problem, const SolverConfig& config, std::uint64_t seed) {
  switch (config.init_mode) {
    case InitMode::truncated_spectral: {
      ComplexVector init =
          truncated_spectral_init(problem, config.power_iters, config.power_tol, seed);
      init *= spectral_norm_estimate(problem);
      return run_ap(problem, config, init);
    }
    case InitMode::random_isotropic:
      return run_ap(problem, config, random_isotropic_init(problem.n(), seed));
    case InitMode::provided:
      break;
  }
  throw std::invalid_argument("run_ap: init_mode 'provided' requires an init vector");
}

StagnationCheck is_stagnation_point(const Problem& problem, const ComplexVector& z, double tol,
                                    double zero_entry_tol) {
  require_same_size(z.size(), problem.n(), "is_stagnation_point");
  const ComplexMatrix& a = problem.matrix();
  const RealVector& b = problem.measurements();
  const double b_norm = b.norm() > 0.0 ? b.norm() : 1.0;
  const ComplexVector y = a * z;
  const ComplexVector y_next = a * problem.solver().solve(modulus_projection(b, y));

  StagnationCheck out;
  out.residual = (y_next - y).norm() / b_norm;
  out.is_fixed_point = out.residual <= tol;
  const double floor = zero_entry_tol * b_norm / std::sqrt(static_cast<double>(problem.m()));
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (std::abs(y[i]) < floor) out.near_zero_entries.push_back(i);
  }
  return out;
}

}  // namespace prap
