#include "prap/model.hpp"

#include <stdexcept>

namespace prap {

ComplexMatrix sample_gaussian_matrix(Eigen::Index m, Eigen::Index n, const SeedSpec& seed) {
  if (m < 1 || n < 1) throw DimensionError("sample_gaussian_matrix: m and n must be >= 1");
  Engine engine = seed.engine();
  ComplexGaussian draw;
  ComplexMatrix a(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = draw(engine);
  }
  return a;
}

ComplexVector sample_signal(Eigen::Index n, const SeedSpec& seed, bool normalize) {
  if (n < 1) throw DimensionError("sample_signal: n must be >= 1");
  Engine engine = seed.engine();
  ComplexVector x = complex_gaussian_vector(n, engine);
  if (normalize) x.normalize();
  return x;
}

RealVector measure(const ComplexMatrix& a, const ComplexVector& x0) {
  require_same_size(a.cols(), x0.size(), "measure");
  return (a * x0).cwiseAbs();
}

Problem::Problem(ComplexMatrix a, RealVector b, std::optional<ComplexVector> x0,
                 LeastSquaresMode mode)
    : b_(std::move(b)), x0_(std::move(x0)) {
  require_same_size(a.rows(), b_.size(), "Problem: rows of A vs length of b");
  if (x0_) require_same_size(a.cols(), x0_->size(), "Problem: cols of A vs length of x0");
  if ((b_.array() < 0.0).any()) throw std::invalid_argument("Problem: b must be nonnegative");
  solver_ = std::make_shared<const LeastSquaresSolver>(std::move(a), mode);
}

Problem Problem::from_signal(ComplexMatrix a, ComplexVector x0, LeastSquaresMode mode) {
  RealVector b = measure(a, x0);
  return Problem(std::move(a), std::move(b), std::move(x0), mode);
}

Problem make_problem(Eigen::Index n, Eigen::Index m, const SeedSpec& seed) {
  SeedSpec labels = seed;
  labels.n = static_cast<std::uint64_t>(n);
  labels.m = static_cast<std::uint64_t>(m);
  ComplexMatrix a = sample_gaussian_matrix(m, n, labels.with(StreamTag::matrix));
  ComplexVector x0 = sample_signal(n, labels.with(StreamTag::signal));
  return Problem::from_signal(std::move(a), std::move(x0));
}

}  // namespace prap
