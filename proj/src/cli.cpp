#include "prap/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "prap/experiments.hpp"
#include "prap/io.hpp"
#include "prap/validators.hpp"

namespace prap {

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) {
    if (item.empty()) continue;
    std::vector<int> parts;
    std::stringstream fields(item);
    std::string field;
    while (std::getline(fields, field, ':')) {
      std::size_t used = 0;
      const int value = std::stoi(field, &used);
      if (used != field.size()) throw std::invalid_argument("bad integer: " + field);
      parts.push_back(value);
    }
    if (parts.size() == 1) {
      out.push_back(parts[0]);
    } else if (parts.size() == 2 || parts.size() == 3) {
      const int step = parts.size() == 3 ? parts[2] : 1;
      if (step < 1 || parts[1] < parts[0]) throw std::invalid_argument("bad range: " + item);
      for (int v = parts[0]; v <= parts[1]; v += step) out.push_back(v);
    } else {
      throw std::invalid_argument("bad range: " + item);
    }
  }
  if (out.empty()) throw std::invalid_argument("empty list: '" + text + "'");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    out.push_back(std::stod(item, &used));
    if (used != item.size()) throw std::invalid_argument("bad number: " + item);
  }
  if (out.empty()) throw std::invalid_argument("empty list: '" + text + "'");
  return out;
}

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("PRAP_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("PRAP_SEED is not an integer: ") + env);
    }
  }
  return 1;
}

struct CommonFlags {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out = "-";
  std::string format = "csv";
  int iters = SolverConfig{}.max_iters;
  double success_tol = SolverConfig{}.success_tol;
  double stall_tol = SolverConfig{}.stall_tol;
  std::string init = "spectral";

  SolverConfig solver() const {
    SolverConfig c;
    c.max_iters = iters;
    c.success_tol = success_tol;
    c.stall_tol = stall_tol;
    c.init_mode = parse_init_mode(init);
    return c;
  }
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_format) {
  cmd->add_option("--seed", f.seed, "Master seed (default: $PRAP_SEED or 1)");
  cmd->add_option("--threads", f.threads, "Worker threads (0 = hardware parallelism)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", f.out, "Output file ('-' for stdout)");
  cmd->add_option("--iters", f.iters, "AP iteration budget")->check(CLI::PositiveNumber);
  cmd->add_option("--success-tol", f.success_tol, "Relative error declaring success");
  cmd->add_option("--stall-tol", f.stall_tol, "Relative iterate change declaring a stall");
  if (with_format) {
    cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  }
}

Json solver_json(const SolverConfig& c) {
  return {{"max_iters", c.max_iters},     {"success_tol", c.success_tol},
          {"stall_tol", c.stall_tol},     {"init", std::string(to_string(c.init_mode))},
          {"power_iters", c.power_iters}, {"power_tol", c.power_tol},
          {"mu", c.mu}};
}

Json layout_json(const CellLayout& layout) {
  Json j = {{"n_values", layout.n_values}};
  if (layout.m_rule) {
    j["m_rule"] = layout.m_rule->to_string();
  } else {
    j["m_values"] = layout.m_values;
  }
  return j;
}

// Output sink: stdout for "-", a binary file otherwise. Records artifact paths.
class Outputs {
 public:
  explicit Outputs(std::ostream& out) : out_(out) {}

  void write(const std::string& path, const std::string& content) {
    if (path == "-") {
      out_ << content;
      return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    file << content;
    if (!file) throw std::runtime_error("failed writing output file: " + path);
    artifacts_.push_back(path);
  }

  const std::vector<std::string>& artifacts() const { return artifacts_; }

 private:
  std::ostream& out_;
  std::vector<std::string> artifacts_;
};

struct RunContext {
  std::string subcommand;
  std::vector<std::string> args;
  std::string start_time;
  Json config;
  std::uint64_t seed = 0;
};

// Manifest sits next to the primary output; nothing is written for stdout runs.
void write_manifest(const RunContext& ctx, const std::string& primary, Outputs& outputs) {
  if (primary == "-") return;
  const std::string path = primary + ".manifest.json";
  std::vector<std::string> artifacts = outputs.artifacts();
  artifacts.push_back(path);
  Json manifest = {{"subcommand", ctx.subcommand},
                   {"argv", ctx.args},
                   {"config", ctx.config},
                   {"master_seed", ctx.seed},
                   {"artifacts", artifacts},
                   {"tool_version", kToolVersion},
                   {"start_time", ctx.start_time},
                   {"end_time", utc_now()}};
  outputs.write(path, manifest.dump(2) + "\n");
}

CellLayout read_layout(const std::string& n_text, const std::string& m_text,
                       const std::string& m_rule) {
  CellLayout layout;
  if (n_text.empty()) throw UsageError("give --n or --n-range");
  layout.n_values = parse_int_list(n_text);
  if (!m_rule.empty() && !m_text.empty()) throw UsageError("--m/--m-range and --m-rule conflict");
  if (!m_rule.empty()) {
    layout.m_rule = MRule::parse(m_rule);
  } else if (!m_text.empty()) {
    layout.m_values = parse_int_list(m_text);
  } else {
    throw UsageError("give --m, --m-range or --m-rule");
  }
  layout.validate();
  return layout;
}

std::string render_grid(const GridResult& result, const std::string& format) {
  std::ostringstream s;
  if (format == "json") {
    s << grid_to_json(result).dump(2) << "\n";
  } else {
    write_grid_csv(s, result);
  }
  return s.str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Phase retrieval by alternating projections: solver and experiments", "prap"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CommonFlags common;
  try {
    common.seed = default_seed();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  // solve
  auto* solve = app.add_subcommand("solve", "Run alternating projections on one instance");
  add_common(solve, common, false);
  int solve_n = 0;
  int solve_m = 0;
  std::string problem_in;
  std::string problem_save;
  solve->add_option("--n", solve_n, "Signal dimension")->check(CLI::PositiveNumber);
  solve->add_option("--m", solve_m, "Number of measurements")->check(CLI::PositiveNumber);
  solve->add_option("--init", common.init, "spectral or random")
      ->check(CLI::IsMember({"spectral", "random"}));
  solve->add_option("--problem", problem_in, "Load the instance from a problem JSON file");
  solve->add_option("--save-problem", problem_save, "Write the instance as problem JSON");

  // grid and stagnation share the cell flags
  std::string n_text;
  std::string m_text;
  std::string m_rule;
  std::string heatmap;
  int trials = 100;
  auto add_cells = [&](CLI::App* cmd) {
    cmd->add_option("--n,--n-range", n_text, "n values: list '8,16' or range 'a:b[:step]'");
    cmd->add_option("--m,--m-range", m_text, "m values: list or range");
    cmd->add_option("--m-rule", m_rule, "m from n: 'm=k*n' or 'm=k*n^2'");
    cmd->add_option("--heatmap", heatmap, "Write a binary PGM heatmap");
  };

  auto* grid = app.add_subcommand("grid", "Success probability over an (n, m) grid");
  add_common(grid, common, true);
  add_cells(grid);
  grid->add_option("--trials", trials, "Trials per cell")->check(CLI::PositiveNumber);
  grid->add_option("--init", common.init, "spectral or random")
      ->check(CLI::IsMember({"spectral", "random"}));

  int instances = 50;
  int inits = 200;
  auto* stagnation =
      app.add_subcommand("stagnation", "Probability that no stagnation point is found");
  add_common(stagnation, common, true);
  add_cells(stagnation);
  stagnation->add_option("--instances", instances, "(x0, A) instances per cell")
      ->check(CLI::PositiveNumber);
  stagnation->add_option("--inits", inits, "Random inits per instance")
      ->check(CLI::PositiveNumber);

  auto* mn = app.add_subcommand("mn-curve", "Measurements needed to suppress stagnation points");
  add_common(mn, common, true);
  double threshold = 0.5;
  std::optional<int> m_min;
  std::optional<int> m_max;
  mn->add_option("--n,--n-range", n_text, "n values")->required();
  mn->add_option("--instances", instances, "Instances per probe")->check(CLI::PositiveNumber);
  mn->add_option("--inits", inits, "Random inits per instance")->check(CLI::PositiveNumber);
  mn->add_option("--threshold", threshold, "Stagnation probability threshold");
  mn->add_option("--m-min", m_min, "Lower end of the m search (default n)");
  mn->add_option("--m-max", m_max, "Upper end of the m search (default 4n^2)");

  auto* validate = app.add_subcommand("validate", "Numerical checks of the phase lemmas");
  add_common(validate, common, false);
  std::string lemma;
  long samples = 1000000;
  std::string t_text;
  validate->add_option("--lemma", lemma, "diff-phase or min-f")
      ->required()
      ->check(CLI::IsMember({"diff-phase", "min-f"}));
  validate->add_option("--samples", samples, "Samples (per t for min-f)")
      ->check(CLI::PositiveNumber);
  validate->add_option("--t", t_text, "t values for min-f, comma separated");

  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  std::string manifest_path;
  replay->add_option("manifest", manifest_path, "Manifest JSON")->required();

  try {
    std::vector<const char*> argv{"prap"};
    for (const auto& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  RunContext ctx;
  ctx.args = args;
  ctx.start_time = utc_now();
  ctx.seed = common.seed;
  Outputs outputs(out);

  try {
    if (*replay) {
      std::ifstream file(manifest_path);
      if (!file) throw std::runtime_error("cannot open manifest: " + manifest_path);
      const Json manifest = Json::parse(file);
      return run_cli(manifest.at("argv").get<std::vector<std::string>>(), out, err);
    }

    if (*solve) {
      ctx.subcommand = "solve";
      const SolverConfig config = common.solver();
      std::optional<Problem> problem;
      if (!problem_in.empty()) {
        std::ifstream file(problem_in);
        if (!file) throw std::runtime_error("cannot open problem file: " + problem_in);
        problem = problem_from_json(Json::parse(file));
      } else {
        if (solve_n < 1 || solve_m < 1) throw UsageError("solve needs --n and --m (or --problem)");
        problem = make_problem(solve_n, solve_m, SeedSpec{common.seed});
      }
      const SeedSpec labels{common.seed, static_cast<std::uint64_t>(problem->n()),
                            static_cast<std::uint64_t>(problem->m()), 0};
      ctx.config = {{"n", problem->n()},
                    {"m", problem->m()},
                    {"problem", problem_in.empty() ? Json(nullptr) : Json(problem_in)},
                    {"solver", solver_json(config)}};
      if (!problem_save.empty()) outputs.write(problem_save, problem_to_json(*problem).dump() + "\n");
      const Trajectory traj = run_ap(*problem, config, labels.with(StreamTag::init).derive());
      outputs.write(common.out, trajectory_to_json(traj).dump(2) + "\n");
      std::ostream& summary = common.out == "-" ? err : out;
      summary << "verdict: " << to_string(traj.verdict) << "\n";
      summary << "iterations: " << traj.iterations_run << "\n";
      if (!traj.rel_errors.empty()) {
        summary << fmt::format("final_rel_error: {:.6e}\n", traj.rel_errors.back());
      }
      write_manifest(ctx, common.out, outputs);
      return 0;
    }

    if (*grid) {
      ctx.subcommand = "grid";
      GridSpec spec;
      spec.layout = read_layout(n_text, m_text, m_rule);
      spec.trials = trials;
      spec.master_seed = common.seed;
      spec.solver = common.solver();
      spec.validate();
      ctx.config = {{"layout", layout_json(spec.layout)},
                    {"trials", trials},
                    {"solver", solver_json(spec.solver)}};
      const GridResult result = run_success_grid(spec, common.threads);
      outputs.write(common.out, render_grid(result, common.format));
      if (!heatmap.empty()) {
        std::ostringstream pgm;
        write_pgm(pgm, result);
        outputs.write(heatmap, pgm.str());
      }
      write_manifest(ctx, common.out, outputs);
      return 0;
    }

    if (*stagnation) {
      ctx.subcommand = "stagnation";
      StagnationSpec spec;
      spec.layout = read_layout(n_text, m_text, m_rule);
      spec.instances = instances;
      spec.inits_per_instance = inits;
      spec.master_seed = common.seed;
      spec.solver = common.solver();
      spec.validate();
      ctx.config = {{"layout", layout_json(spec.layout)},
                    {"instances", instances},
                    {"inits_per_instance", inits},
                    {"solver", solver_json(spec.solver)}};
      const GridResult result = probe_stagnation(spec, common.threads);
      outputs.write(common.out, render_grid(result, common.format));
      if (!heatmap.empty()) {
        std::ostringstream pgm;
        write_pgm(pgm, result);
        outputs.write(heatmap, pgm.str());
      }
      write_manifest(ctx, common.out, outputs);
      return 0;
    }

    if (*mn) {
      ctx.subcommand = "mn-curve";
      MnCurveSpec spec;
      spec.n_values = parse_int_list(n_text);
      spec.instances = instances;
      spec.inits_per_instance = inits;
      spec.threshold = threshold;
      spec.master_seed = common.seed;
      spec.solver = common.solver();
      spec.m_min = m_min;
      spec.m_max = m_max;
      spec.validate();
      ctx.config = {{"n_values", spec.n_values},
                    {"instances", instances},
                    {"inits_per_instance", inits},
                    {"threshold", threshold},
                    {"m_min", m_min ? Json(*m_min) : Json(nullptr)},
                    {"m_max", m_max ? Json(*m_max) : Json(nullptr)},
                    {"solver", solver_json(spec.solver)}};
      const auto curve = compute_mn_curve(spec, common.threads);
      std::ostringstream s;
      if (common.format == "json") {
        Json rows = Json::array();
        for (const auto& p : curve) {
          rows.push_back({{"n", p.n},
                          {"M_n", p.m_n ? Json(*p.m_n) : Json("unbounded")},
                          {"ratio", p.m_n ? Json(p.ratio) : Json("unbounded")},
                          {"probes", p.probes}});
        }
        s << rows.dump(2) << "\n";
      } else {
        write_mn_csv(s, curve);
      }
      outputs.write(common.out, s.str());
      write_manifest(ctx, common.out, outputs);
      return 0;
    }

    if (*validate) {
      ctx.subcommand = "validate";
      Json report;
      bool passed = false;
      if (lemma == "diff-phase") {
        const DiffPhaseReport r = validate_diff_phase(samples, common.seed, common.threads);
        report = diff_phase_to_json(r);
        passed = r.passed();
      } else {
        const std::vector<double> ts =
            t_text.empty() ? default_min_f_grid() : parse_double_list(t_text);
        const MinFReport r = validate_min_f(ts, samples, common.seed, common.threads);
        report = min_f_to_json(r);
        passed = r.passed();
      }
      ctx.config = {{"lemma", lemma}, {"samples", samples}, {"t", t_text}};
      outputs.write(common.out, report.dump(2) + "\n");
      write_manifest(ctx, common.out, outputs);
      return passed ? 0 : 1;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace prap
