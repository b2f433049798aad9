#include "prap/validators.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "prap/random.hpp"

namespace prap {

namespace {

constexpr long kChunk = 1L << 15;
constexpr double kTwoPi = 6.283185307179586;

long chunk_count(long samples) { return (samples + kChunk - 1) / kChunk; }
long chunk_size(long samples, long c) { return std::min(kChunk, samples - c * kChunk); }

Engine chunk_engine(std::uint64_t seed, std::uint64_t slot, long chunk) {
  return SeedSpec{seed, slot, 0, static_cast<std::uint64_t>(chunk), StreamTag::validator}.engine();
}

Complex polar_sample(double magnitude, Engine& engine) {
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  return std::polar(magnitude, angle(engine));
}

struct DiffPhaseChunk {
  long violations = 0;
  double max_excess = -std::numeric_limits<double>::infinity();
};

// Sample kinds cycle with the index so every chunk covers each regime.
DiffPhaseChunk diff_phase_chunk(std::uint64_t seed, long chunk, long count, double slack) {
  Engine engine = chunk_engine(seed, 0, chunk);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto log_uniform = [&](double lo_exp, double hi_exp) {
    return std::pow(10.0, lo_exp + (hi_exp - lo_exp) * unit(engine));
  };
  DiffPhaseChunk out;
  for (long i = 0; i < count; ++i) {
    Complex z0;
    Complex z;
    switch (i % 8) {
      case 0:  // z0 = 0
        z = polar_sample(log_uniform(-6, 6), engine);
        break;
      case 1:  // z = 0
        z0 = polar_sample(log_uniform(-6, 6), engine);
        break;
      case 2:
      case 3: {  // |z| within a relative 1e-15..1e-1 of |z0|/6, either side
        z0 = polar_sample(log_uniform(-6, 6), engine);
        const double offset = log_uniform(-15, -1) * (i % 8 == 2 ? 1.0 : -1.0);
        z = polar_sample(std::abs(z0) / 6.0 * (1.0 + offset), engine);
        break;
      }
      default:
        z0 = polar_sample(log_uniform(-6, 6), engine);
        z = polar_sample(std::abs(z0) * log_uniform(-8, 3), engine);
        break;
    }
    const double excess = diff_phase_lhs(z0, z) - diff_phase_rhs(z0, z);
    out.max_excess = std::max(out.max_excess, excess);
    if (excess > slack) ++out.violations;
  }
  return out;
}

struct MomentChunk {
  double sum_re = 0.0;
  double sum_re2 = 0.0;
  double sum_im = 0.0;
  double sum_im2 = 0.0;
};

MomentChunk min_f_chunk(double t, std::uint64_t seed, std::uint64_t slot, long chunk,
                        long count) {
  Engine engine = chunk_engine(seed, slot, chunk);
  ComplexGaussian draw;
  MomentChunk out;
  for (long i = 0; i < count; ++i) {
    const Complex z1 = draw(engine);
    const Complex z2 = draw(engine);
    const Complex x = std::conj(z1) * std::abs(z1) * phase(z1 + t * z2);
    out.sum_re += x.real();
    out.sum_re2 += x.real() * x.real();
    out.sum_im += x.imag();
    out.sum_im2 += x.imag() * x.imag();
  }
  return out;
}

// Streams are keyed by the bits of t, so an estimate does not depend on its
// position in the grid.
std::uint64_t t_slot(double t) { return std::bit_cast<std::uint64_t>(t); }

int resolve_threads(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

DiffPhaseReport reduce(const std::vector<DiffPhaseChunk>& chunks, long samples) {
  DiffPhaseReport report;
  report.samples = samples;
  report.max_excess = -std::numeric_limits<double>::infinity();
  for (const auto& c : chunks) {
    report.violations += c.violations;
    report.max_excess = std::max(report.max_excess, c.max_excess);
  }
  return report;
}

MinFEstimate reduce(const std::vector<MomentChunk>& chunks, double t, long samples) {
  MomentChunk total;
  for (const auto& c : chunks) {
    total.sum_re += c.sum_re;
    total.sum_re2 += c.sum_re2;
    total.sum_im += c.sum_im;
    total.sum_im2 += c.sum_im2;
  }
  const double n = static_cast<double>(samples);
  MinFEstimate e;
  e.t = t;
  e.samples = samples;
  e.re = total.sum_re / n;
  e.im = total.sum_im / n;
  const double denom = samples > 1 ? n - 1.0 : 1.0;
  const double var_re = std::max(0.0, (total.sum_re2 - n * e.re * e.re) / denom);
  const double var_im = std::max(0.0, (total.sum_im2 - n * e.im * e.im) / denom);
  e.stderr_re = std::sqrt(var_re / n);
  e.stderr_im = std::sqrt(var_im / n);
  return e;
}

void check_min_f_args(const std::vector<double>& t_grid, long samples_per_t) {
  if (samples_per_t < 2) throw std::invalid_argument("validate_min_f: need >= 2 samples per t");
  for (double t : t_grid) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
      throw std::invalid_argument("validate_min_f: t must be finite and >= 0");
    }
  }
}

}  // namespace

double diff_phase_lhs(Complex z0, Complex z) { return std::abs(phase(z0 + z) - phase(z0)); }

double diff_phase_rhs(Complex z0, Complex z) {
  const double indicator = std::abs(z) >= std::abs(z0) / 6.0 ? 2.0 : 0.0;
  if (z0 == Complex{}) return indicator;
  return indicator + 1.2 * std::abs((z / z0).imag());
}

DiffPhaseReport validate_diff_phase(long samples, std::uint64_t seed, int threads) {
  if (samples < 1) throw std::invalid_argument("validate_diff_phase: samples must be >= 1");
  const long chunks = chunk_count(samples);
  std::vector<DiffPhaseChunk> parts(static_cast<std::size_t>(chunks));
  const double slack = DiffPhaseReport{}.slack;
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_threads(threads))
  for (long c = 0; c < chunks; ++c) {
    parts[static_cast<std::size_t>(c)] = diff_phase_chunk(seed, c, chunk_size(samples, c), slack);
  }
  return reduce(parts, samples);
}

DiffPhaseReport validate_diff_phase_serial(long samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("validate_diff_phase: samples must be >= 1");
  const long chunks = chunk_count(samples);
  std::vector<DiffPhaseChunk> parts;
  const double slack = DiffPhaseReport{}.slack;
  for (long c = 0; c < chunks; ++c) {
    parts.push_back(diff_phase_chunk(seed, c, chunk_size(samples, c), slack));
  }
  return reduce(parts, samples);
}

double MinFEstimate::margin() const {
  const double scale = std::sqrt(1.0 + t * t);
  return re * scale - 1.0 - 3.0 * stderr_re * scale;
}

bool MinFEstimate::excess_ok() const { return !excess_checked() || margin() > 0.0; }

bool MinFEstimate::imag_ok() const { return std::abs(im) <= 3.0 * stderr_im; }

bool MinFEstimate::asymptote_ok() const {
  return !asymptote_checked() || std::abs(t * re - kMinFAsymptote) <= 3.0 * t * stderr_re;
}

bool MinFEstimate::passed() const { return excess_ok() && imag_ok() && asymptote_ok(); }

bool MinFReport::passed() const {
  return std::all_of(estimates.begin(), estimates.end(),
                     [](const MinFEstimate& e) { return e.passed(); });
}

std::vector<double> default_min_f_grid() { return {0.3, 0.5, 1.0, 1.5, 2.0, 2.5, 5.0, 20.0}; }

MinFReport validate_min_f(const std::vector<double>& t_grid, long samples_per_t,
                          std::uint64_t seed, int threads) {
  check_min_f_args(t_grid, samples_per_t);
  const long chunks = chunk_count(samples_per_t);
  MinFReport report;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    std::vector<MomentChunk> parts(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_threads(threads))
    for (long c = 0; c < chunks; ++c) {
      parts[static_cast<std::size_t>(c)] =
          min_f_chunk(t_grid[k], seed, t_slot(t_grid[k]), c, chunk_size(samples_per_t, c));
    }
    report.estimates.push_back(reduce(parts, t_grid[k], samples_per_t));
  }
  return report;
}

MinFReport validate_min_f_serial(const std::vector<double>& t_grid, long samples_per_t,
                                 std::uint64_t seed) {
  check_min_f_args(t_grid, samples_per_t);
  const long chunks = chunk_count(samples_per_t);
  MinFReport report;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    std::vector<MomentChunk> parts;
    for (long c = 0; c < chunks; ++c) {
      parts.push_back(min_f_chunk(t_grid[k], seed, t_slot(t_grid[k]), c, chunk_size(samples_per_t, c)));
    }
    report.estimates.push_back(reduce(parts, t_grid[k], samples_per_t));
  }
  return report;
}

}  // namespace prap
