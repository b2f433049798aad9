#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "prap/linalg.hpp"
#include "prap/model.hpp"

namespace prap {

enum class InitMode { truncated_spectral, random_isotropic, provided };
enum class Verdict { success, stalled, budget_exhausted };

std::string_view to_string(InitMode mode);
std::string_view to_string(Verdict verdict);
InitMode parse_init_mode(std::string_view text);

class EmptyTruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  int max_iters = 1000;
  double success_tol = 1e-5;  // relative error to x0, up to phase
  double stall_tol = 1e-12;   // relative change between successive iterates
  InitMode init_mode = InitMode::truncated_spectral;
  int power_iters = 200;
  double power_tol = 1e-9;
  double mu = 1.0;  // almost-orthogonality constant

  void validate() const;
};

/// Record of one alternating projections run. Index t of rel_errors and
/// residuals refers to iterate z_t, t = 0 being the initial point.
struct Trajectory {
  std::vector<double> rel_errors;  // empty when x0 is unknown
  std::vector<double> residuals;   // || |A z_t| - b || / ||b||
  int iterations_run = 0;
  Verdict verdict = Verdict::budget_exhausted;
  ComplexVector final_iterate;
  std::vector<std::string> flags;
};

/// One alternating projections step: A^+ (b . phase(A z)).
ComplexVector ap_step(const Problem& problem, const ComplexVector& z);

/// Unit-norm principal eigenvector of
///   (1/m) sum_i b_i^2 a_i a_i^* 1[b_i^2 <= (9/m) sum_j b_j^2],
/// computed matrix-free by power iteration. Throws EmptyTruncationError when
/// no measurement survives the truncation (b = 0).
ComplexVector truncated_spectral_init(const Problem& problem, int power_iters, double power_tol,
                                      std::uint64_t seed);

/// Scale applied to the unit spectral vector: sqrt(mean(b^2)), an estimate of ||x0||.
double spectral_norm_estimate(const Problem& problem);

/// Uniform point on the unit sphere of C^n.
ComplexVector random_isotropic_init(Eigen::Index n, Engine& engine);
ComplexVector random_isotropic_init(Eigen::Index n, std::uint64_t seed);

/// True iff |<x0, x>| < mu ||x0|| ||x|| / sqrt(n).
bool is_almost_orthogonal(const ComplexVector& x, const ComplexVector& x0, double mu);

/// Runs AP from an explicit starting point.
Trajectory run_ap(const Problem& problem, const SolverConfig& config, const ComplexVector& init);

/// Runs AP from config.init_mode; `seed` drives the power iteration start or
/// the random initial point. Throws std::invalid_argument for InitMode::provided.
Trajectory run_ap(const Problem& problem, const SolverConfig& config, std::uint64_t seed);

struct StagnationCheck {
  bool is_fixed_point = false;
  double residual = 0.0;  // ||A ap_step(z) - A z|| / ||b||
  std::vector<Eigen::Index> near_zero_entries;  // where phase(Az) is ambiguous
};

/// Fixed-point test of the image-domain map y -> A A^+ (b . phase(y)) at y = A z.
StagnationCheck is_stagnation_point(const Problem& problem, const ComplexVector& z, double tol,
                                    double zero_entry_tol = 1e-8);

}  // namespace prap
