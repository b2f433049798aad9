#include "prap/random.hpp"

namespace prap {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t SeedSpec::derive() const {
  std::uint64_t h = mix64(master_seed + kGolden);
  for (std::uint64_t label : {n, m, trial, static_cast<std::uint64_t>(tag)}) {
    h = mix64(h ^ mix64(label + kGolden));
  }
  return h;
}

ComplexVector complex_gaussian_vector(Eigen::Index n, Engine& engine) {
  ComplexGaussian draw;
  ComplexVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = draw(engine);
  return v;
}

}  // namespace prap
