#pragma once

#include <cstdint>
#include <random>

#include "prap/linalg.hpp"

namespace prap {

using Engine = std::mt19937_64;

/// Independent streams used by the pipeline. Values are part of the
/// seeding recipe and must never be renumbered.
enum class StreamTag : std::uint64_t {
  matrix = 1,
  signal = 2,
  init = 3,
  power = 4,
  stagnation_init = 5,
  validator = 6,
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Labels identifying one random stream.
///
/// Seed recipe (stable across versions):
///   h = mix64(master_seed + 0x9E3779B97F4A7C15)
///   for label in (n, m, trial, tag): h = mix64(h ^ mix64(label + 0x9E3779B97F4A7C15))
/// The result seeds a std::mt19937_64.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::uint64_t trial = 0;
  StreamTag tag = StreamTag::matrix;

  std::uint64_t derive() const;
  Engine engine() const { return Engine(derive()); }
  SeedSpec with(StreamTag t) const {
    SeedSpec s = *this;
    s.tag = t;
    return s;
  }
};

/// Complex Gaussian with independent N(0, 1/2) real and imaginary parts.
class ComplexGaussian {
 public:
  Complex operator()(Engine& engine) {
    const double re = normal_(engine);
    const double im = normal_(engine);
    return {re, im};
  }

 private:
  std::normal_distribution<double> normal_{0.0, 0.70710678118654752440};
};

ComplexVector complex_gaussian_vector(Eigen::Index n, Engine& engine);

}  // namespace prap
