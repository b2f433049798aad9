#pragma once

#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "prap/experiments.hpp"
#include "prap/model.hpp"
#include "prap/solver.hpp"
#include "prap/validators.hpp"

namespace prap {

using Json = nlohmann::json;

// Problem container:
//   {"format": "prap-problem", "version": 1, "m": m, "n": n,
//    "A": [re, im, re, im, ...]   (row-major, 2*m*n doubles),
//    "b": [...m doubles],
//    "x0": [re, im, ...] | null}
Json problem_to_json(const Problem& problem);
Problem problem_from_json(const Json& j);

/// {verdict, iterations_run, rel_errors[], residuals[], flags[], final_rel_error}
Json trajectory_to_json(const Trajectory& traj);

/// Header n,m,trials,successes,probability,mean_iterations,seed then one row per cell.
void write_grid_csv(std::ostream& out, const GridResult& result);
Json grid_to_json(const GridResult& result);

/// Binary PGM (P5): gray = round(255 * probability); rows are m ascending,
/// columns n ascending. Cells absent from the result are black.
void write_pgm(std::ostream& out, const GridResult& result);

/// Header n,M_n,ratio; M_n and ratio read "unbounded" when no crossing was found.
void write_mn_csv(std::ostream& out, const std::vector<MnPoint>& curve);

Json diff_phase_to_json(const DiffPhaseReport& report);
Json min_f_to_json(const MinFReport& report);

}  // namespace prap
