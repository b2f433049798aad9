#pragma once

#include <memory>
#include <optional>

#include "prap/linalg.hpp"
#include "prap/random.hpp"

namespace prap {

/// m x n matrix with i.i.d. entries N(0,1/2) + i N(0,1/2), drawn row by row.
ComplexMatrix sample_gaussian_matrix(Eigen::Index m, Eigen::Index n, const SeedSpec& seed);

/// Complex Gaussian signal; unit norm when `normalize` is set.
ComplexVector sample_signal(Eigen::Index n, const SeedSpec& seed, bool normalize = true);

/// b = |A x0|.
RealVector measure(const ComplexMatrix& a, const ComplexVector& x0);

/// A phase retrieval instance: recover x0 (up to global phase) from b = |A x0|.
///
/// The sensing matrix lives inside a shared, immutable LeastSquaresSolver, so
/// copies of a Problem are cheap and can be handed to many threads.
class Problem {
 public:
  Problem(ComplexMatrix a, RealVector b, std::optional<ComplexVector> x0 = std::nullopt,
          LeastSquaresMode mode = LeastSquaresMode::dense_cholesky);

  /// Builds b from x0.
  static Problem from_signal(ComplexMatrix a, ComplexVector x0,
                             LeastSquaresMode mode = LeastSquaresMode::dense_cholesky);

  const ComplexMatrix& matrix() const { return solver_->matrix(); }
  const LeastSquaresSolver& solver() const { return *solver_; }
  const RealVector& measurements() const { return b_; }
  const std::optional<ComplexVector>& ground_truth() const { return x0_; }

  Eigen::Index n() const { return solver_->cols(); }
  Eigen::Index m() const { return solver_->rows(); }

  /// m < 4n - 4: injectivity of x -> |Ax| (mod phase) is not guaranteed.
  bool uniqueness_warning() const { return m() < 4 * n() - 4; }

 private:
  std::shared_ptr<const LeastSquaresSolver> solver_;
  RealVector b_;
  std::optional<ComplexVector> x0_;
};

/// Samples A (stream `matrix`) and a unit-norm x0 (stream `signal`) from the
/// labels in `seed`; its tag field is ignored.
Problem make_problem(Eigen::Index n, Eigen::Index m, const SeedSpec& seed);

}  // namespace prap
