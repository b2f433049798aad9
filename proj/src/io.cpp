#include "prap/io.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace prap {

namespace {

Json interleave(const ComplexVector& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    arr.push_back(v[i].real());
    arr.push_back(v[i].imag());
  }
  return arr;
}

ComplexVector deinterleave(const Json& arr, Eigen::Index expected, const char* field) {
  if (!arr.is_array() || static_cast<Eigen::Index>(arr.size()) != 2 * expected) {
    throw std::invalid_argument(fmt::format("problem json: '{}' must hold {} doubles", field,
                                            2 * expected));
  }
  ComplexVector v(expected);
  for (Eigen::Index i = 0; i < expected; ++i) {
    v[i] = {arr[2 * i].get<double>(), arr[2 * i + 1].get<double>()};
  }
  return v;
}

}  // namespace

Json problem_to_json(const Problem& problem) {
  const ComplexMatrix& a = problem.matrix();
  Json j;
  j["format"] = "prap-problem";
  j["version"] = 1;
  j["m"] = a.rows();
  j["n"] = a.cols();
  Json entries = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      entries.push_back(a(i, k).real());
      entries.push_back(a(i, k).imag());
    }
  }
  j["A"] = std::move(entries);
  j["b"] = std::vector<double>(problem.measurements().begin(), problem.measurements().end());
  j["x0"] = problem.ground_truth() ? interleave(*problem.ground_truth()) : Json(nullptr);
  return j;
}

Problem problem_from_json(const Json& j) {
  if (j.value("format", "") != "prap-problem") {
    throw std::invalid_argument("problem json: missing format tag 'prap-problem'");
  }
  const auto m = j.at("m").get<Eigen::Index>();
  const auto n = j.at("n").get<Eigen::Index>();
  if (m < 1 || n < 1) throw std::invalid_argument("problem json: m and n must be >= 1");
  const ComplexVector flat = deinterleave(j.at("A"), m * n, "A");
  ComplexMatrix a(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) a(i, k) = flat[i * n + k];
  }
  const auto b_values = j.at("b").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(b_values.size()) != m) {
    throw std::invalid_argument("problem json: 'b' must hold m doubles");
  }
  RealVector b = Eigen::Map<const RealVector>(b_values.data(), m);
  std::optional<ComplexVector> x0;
  if (j.contains("x0") && !j["x0"].is_null()) x0 = deinterleave(j["x0"], n, "x0");
  return Problem(std::move(a), std::move(b), std::move(x0));
}

Json trajectory_to_json(const Trajectory& traj) {
  Json j;
  j["verdict"] = std::string(to_string(traj.verdict));
  j["iterations_run"] = traj.iterations_run;
  j["rel_errors"] = traj.rel_errors;
  j["residuals"] = traj.residuals;
  j["flags"] = traj.flags;
  j["final_rel_error"] = traj.rel_errors.empty() ? Json(nullptr) : Json(traj.rel_errors.back());
  return j;
}

void write_grid_csv(std::ostream& out, const GridResult& result) {
  out << "n,m,trials,successes,probability,mean_iterations,seed\n";
  for (const CellResult& c : result.cells) {
    out << fmt::format("{},{},{},{},{:.6f},{:.4f},{}\n", c.n, c.m, c.trials, c.successes,
                       c.probability, c.mean_iterations, result.master_seed);
  }
}

Json grid_to_json(const GridResult& result) {
  Json cells = Json::array();
  for (const CellResult& c : result.cells) {
    cells.push_back({{"n", c.n},
                     {"m", c.m},
                     {"trials", c.trials},
                     {"successes", c.successes},
                     {"probability", c.probability},
                     {"mean_iterations", c.mean_iterations},
                     {"stalled", c.stalled},
                     {"errors", c.errors}});
  }
  return {{"master_seed", result.master_seed},
          {"config_hash", fmt::format("{:016x}", result.config_hash)},
          {"cells", std::move(cells)}};
}

void write_pgm(std::ostream& out, const GridResult& result) {
  std::vector<int> ns;
  std::vector<int> ms;
  for (const CellResult& c : result.cells) {
    ns.push_back(c.n);
    ms.push_back(c.m);
  }
  for (auto* v : {&ns, &ms}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  std::vector<unsigned char> pixels(ns.size() * ms.size(), 0);
  for (const CellResult& c : result.cells) {
    const auto col = std::lower_bound(ns.begin(), ns.end(), c.n) - ns.begin();
    const auto row = std::lower_bound(ms.begin(), ms.end(), c.m) - ms.begin();
    const double gray = std::round(255.0 * std::clamp(c.probability, 0.0, 1.0));
    pixels[static_cast<std::size_t>(row) * ns.size() + static_cast<std::size_t>(col)] =
        static_cast<unsigned char>(gray);
  }
  out << "P5\n" << ns.size() << ' ' << ms.size() << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
}

void write_mn_csv(std::ostream& out, const std::vector<MnPoint>& curve) {
  std::vector<MnPoint> sorted = curve;
  std::sort(sorted.begin(), sorted.end(),
            [](const MnPoint& a, const MnPoint& b) { return a.n < b.n; });
  out << "n,M_n,ratio\n";
  for (const MnPoint& p : sorted) {
    if (p.m_n) {
      out << fmt::format("{},{},{}\n", p.n, *p.m_n, p.ratio);
    } else {
      out << fmt::format("{},unbounded,unbounded\n", p.n);
    }
  }
}

Json diff_phase_to_json(const DiffPhaseReport& report) {
  return {{"lemma", "diff-phase"},
          {"samples", report.samples},
          {"violations", report.violations},
          {"slack", report.slack},
          {"max_excess", report.max_excess},
          {"passed", report.passed()}};
}

Json min_f_to_json(const MinFReport& report) {
  Json estimates = Json::array();
  for (const MinFEstimate& e : report.estimates) {
    Json row = {{"t", e.t},
                {"samples", e.samples},
                {"f_re", e.re},
                {"f_im", e.im},
                {"stderr_re", e.stderr_re},
                {"stderr_im", e.stderr_im},
                {"scaled", e.re * std::sqrt(1.0 + e.t * e.t)},
                {"imag_ok", e.imag_ok()},
                {"passed", e.passed()}};
    row["margin"] = e.excess_checked() ? Json(e.margin()) : Json(nullptr);
    row["excess_ok"] = e.excess_checked() ? Json(e.excess_ok()) : Json(nullptr);
    if (e.asymptote_checked()) {
      row["t_times_f"] = e.t * e.re;
      row["asymptote"] = kMinFAsymptote;
      row["asymptote_ok"] = e.asymptote_ok();
    }
    estimates.push_back(std::move(row));
  }
  return {{"lemma", "min-f"}, {"estimates", std::move(estimates)}, {"passed", report.passed()}};
}

}  // namespace prap
