#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>

#include <Eigen/Dense>

namespace prap {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when A*A cannot be factored, i.e. A lacks full column rank.
class SingularGramError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// z/|z|, with the convention phase(0) = 1.
Complex phase(Complex z);

/// Elementwise phase.
ComplexVector phase(const ComplexVector& z);

RealVector modulus(const ComplexVector& z);

/// inf over real phi of ||e^{i phi} x - y||.
double dist_up_to_phase(const ComplexVector& x, const ComplexVector& y);

void require_same_size(Eigen::Index a, Eigen::Index b, const char* what);

enum class LeastSquaresMode { dense_cholesky, conjugate_gradient };

struct CgOptions {
  int max_iters = 500;
  double tol = 1e-12;  // relative residual of the normal equations
};

/// Least-squares solves against a fixed m x n matrix A.
///
/// The default mode factors the n x n Gram matrix A*A once (Cholesky) so
/// that each solve costs one A* product plus two triangular solves. The
/// conjugate-gradient mode runs CG on the normal equations without forming
/// the Gram matrix. Immutable after construction.
class LeastSquaresSolver {
 public:
  explicit LeastSquaresSolver(ComplexMatrix a,
                              LeastSquaresMode mode = LeastSquaresMode::dense_cholesky,
                              CgOptions cg = {});

  /// w minimizing ||A w - v||.
  ComplexVector solve(const ComplexVector& v) const;

  /// A * solve(v): orthogonal projection of v onto Range(A).
  ComplexVector project(const ComplexVector& v) const;

  const ComplexMatrix& matrix() const { return a_; }
  Eigen::Index rows() const { return a_.rows(); }
  Eigen::Index cols() const { return a_.cols(); }
  LeastSquaresMode mode() const { return mode_; }

 private:
  ComplexVector solve_cg(const ComplexVector& rhs) const;

  ComplexMatrix a_;
  LeastSquaresMode mode_;
  CgOptions cg_;
  Eigen::LLT<ComplexMatrix> gram_;
};

inline ComplexVector least_squares_project(const LeastSquaresSolver& solver,
                                           const ComplexVector& v) {
  return solver.solve(v);
}

using LinearOperator = std::function<ComplexVector(const ComplexVector&)>;

struct PowerOptions {
  int iters = 200;
  double tol = 1e-9;
};

struct PowerResult {
  ComplexVector eigvec;
  double eigval = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Dominant eigenpair of a Hermitian PSD operator on C^n. Starts from a
/// seeded complex Gaussian vector and stops once successive unit iterates
/// agree up to phase within `opts.tol`. eigval is the final Rayleigh quotient.
PowerResult power_iteration(const LinearOperator& apply, Eigen::Index n,
                            const PowerOptions& opts, std::uint64_t seed);

}  // namespace prap
