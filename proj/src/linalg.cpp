#include "prap/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "prap/random.hpp"

namespace prap {

Complex phase(Complex z) {
  const double r = std::abs(z);
  if (r == 0.0) return {1.0, 0.0};
  return z / r;
}

ComplexVector phase(const ComplexVector& z) {
  return z.unaryExpr([](Complex c) { return phase(c); });
}

RealVector modulus(const ComplexVector& z) { return z.cwiseAbs(); }

void require_same_size(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

double dist_up_to_phase(const ComplexVector& x, const ComplexVector& y) {
  require_same_size(x.size(), y.size(), "dist_up_to_phase");
  // ||x||^2 + ||y||^2 - 2|<x,y>| loses all digits below sqrt(eps) to
  // cancellation; align x with the optimal phase and take the norm instead.
  return (phase(x.dot(y)) * x - y).norm();
}

LeastSquaresSolver::LeastSquaresSolver(ComplexMatrix a, LeastSquaresMode mode, CgOptions cg)
    : a_(std::move(a)), mode_(mode), cg_(cg) {
  if (a_.rows() < 1 || a_.cols() < 1) throw DimensionError("LeastSquaresSolver: empty matrix");
  if (mode_ == LeastSquaresMode::conjugate_gradient) return;
  if (a_.rows() < a_.cols()) {
    throw SingularGramError("LeastSquaresSolver: m < n, Gram matrix is singular");
  }
  gram_.compute(a_.adjoint() * a_);
  if (gram_.info() != Eigen::Success || !(gram_.rcond() > 1e-13)) {
    throw SingularGramError("LeastSquaresSolver: Gram matrix is numerically singular");
  }
}

ComplexVector LeastSquaresSolver::solve(const ComplexVector& v) const {
  require_same_size(v.size(), a_.rows(), "LeastSquaresSolver::solve");
  ComplexVector rhs = a_.adjoint() * v;
  if (mode_ == LeastSquaresMode::conjugate_gradient) return solve_cg(rhs);
  return gram_.solve(rhs);
}

ComplexVector LeastSquaresSolver::project(const ComplexVector& v) const { return a_ * solve(v); }

// CG on A*A w = rhs, never forming A*A.
ComplexVector LeastSquaresSolver::solve_cg(const ComplexVector& rhs) const {
  ComplexVector w = ComplexVector::Zero(a_.cols());
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) return w;
  ComplexVector r = rhs;
  ComplexVector p = r;
  double rr = r.squaredNorm();
  for (int k = 0; k < cg_.max_iters; ++k) {
    const ComplexVector ap = a_ * p;
    const double pap = ap.squaredNorm();
    if (pap == 0.0) throw SingularGramError("LeastSquaresSolver: CG breakdown");
    const double alpha = rr / pap;
    w += alpha * p;
    r -= alpha * (a_.adjoint() * ap);
    const double rr_next = r.squaredNorm();
    if (std::sqrt(rr_next) <= cg_.tol * rhs_norm) return w;
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  if (std::sqrt(rr) > 1e-6 * rhs_norm) {
    throw SingularGramError("LeastSquaresSolver: CG did not converge");
  }
  return w;
}

PowerResult power_iteration(const LinearOperator& apply, Eigen::Index n, const PowerOptions& opts,
                            std::uint64_t seed) {
  if (opts.iters < 1) throw std::invalid_argument("power_iteration: iters must be >= 1");
  Engine engine(seed);
  PowerResult out;
  ComplexVector v = complex_gaussian_vector(n, engine);
  v.normalize();
  for (int k = 1; k <= opts.iters; ++k) {
    ComplexVector w = apply(v);
    const double norm = w.norm();
    out.iterations = k;
    if (norm == 0.0) {
      // v lies in the kernel; the operator is zero on the sampled direction.
      out.converged = true;
      break;
    }
    w /= norm;
    const double step = dist_up_to_phase(w, v);
    v = std::move(w);
    if (step < opts.tol) {
      out.converged = true;
      break;
    }
  }
  out.eigval = std::max(0.0, v.dot(apply(v)).real());
  out.eigvec = std::move(v);
  return out;
}

}  // namespace prap
