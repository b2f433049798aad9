#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "prap/linalg.hpp"

namespace prap {

// Deterministic phase inequality:
//   |phase(z0 + z) - phase(z0)| <= 2 * 1[|z| >= |z0|/6] + (6/5) |Im(z / z0)|
// The Im term is taken as 0 when z0 = 0 (the indicator already fires).

double diff_phase_lhs(Complex z0, Complex z);
double diff_phase_rhs(Complex z0, Complex z);

struct DiffPhaseReport {
  long samples = 0;
  long violations = 0;     // lhs > rhs + slack
  double slack = 1e-12;
  double max_excess = 0.0; // max over samples of lhs - rhs
  bool passed() const { return violations == 0; }
};

/// Samples (z0, z) pairs over magnitudes 1e-6..1e6, relative sizes
/// 1e-8..1e3, the |z| = |z0|/6 boundary from both sides, z0 = 0 and z = 0.
DiffPhaseReport validate_diff_phase(long samples, std::uint64_t seed, int threads = 0);
DiffPhaseReport validate_diff_phase_serial(long samples, std::uint64_t seed);

// f(t) = E[ conj(Z1) |Z1| phase(Z1 + t Z2) ],  Z1, Z2 iid standard complex Gaussian,
// claimed real with f(t) >= (1 + delta) / sqrt(1 + t^2) on [gamma, inf),
// and t f(t) -> 3 pi / 8 as t -> inf.

inline constexpr double kMinFSmallestT = 0.05;
inline constexpr double kMinFAsymptoteT = 20.0;
inline constexpr double kMinFAsymptote = 1.1780972450961724;  // 3 pi / 8

struct MinFEstimate {
  double t = 0.0;
  long samples = 0;
  double re = 0.0;
  double im = 0.0;
  double stderr_re = 0.0;
  double stderr_im = 0.0;

  /// f_hat sqrt(1+t^2) - 1 - 3 stderr sqrt(1+t^2); positive means a 3-sigma excess.
  double margin() const;
  bool excess_checked() const { return t >= kMinFSmallestT; }
  bool excess_ok() const;
  bool imag_ok() const;  // |Im f_hat| <= 3 stderr
  bool asymptote_checked() const { return t >= kMinFAsymptoteT; }
  bool asymptote_ok() const;  // |t f_hat - 3pi/8| <= 3 t stderr
  bool passed() const;
};

struct MinFReport {
  std::vector<MinFEstimate> estimates;
  bool passed() const;
};

std::vector<double> default_min_f_grid();

/// Monte Carlo estimates of f on each t >= 0. The excess bound is only
/// asserted for t >= kMinFSmallestT.
MinFReport validate_min_f(const std::vector<double>& t_grid, long samples_per_t,
                          std::uint64_t seed, int threads = 0);
MinFReport validate_min_f_serial(const std::vector<double>& t_grid, long samples_per_t,
                                 std::uint64_t seed);

}  // namespace prap
