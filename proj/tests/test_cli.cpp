#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "prap/cli.hpp"

using namespace prap;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "prap_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::istringstream fields(line);
    std::string f;
    while (std::getline(fields, f, ',')) cells.push_back(f);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("list parsing") {
  CHECK(parse_int_list("2,4,10") == std::vector<int>{2, 4, 10});
  CHECK(parse_int_list("2:5") == std::vector<int>{2, 3, 4, 5});
  CHECK(parse_int_list("2:10:4,20") == std::vector<int>{2, 6, 10, 20});
  CHECK_THROWS(parse_int_list("5:2"));
  CHECK_THROWS(parse_int_list("x"));
  CHECK(parse_double_list("0.5,1") == std::vector<double>{0.5, 1.0});
}

TEST_SUITE("solve") {
  TEST_CASE("n = 1 succeeds immediately") {
    const Result r = cli({"solve", "--n", "1", "--m", "8", "--seed", "7"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["verdict"] == "success");
    CHECK(j["iterations_run"].get<int>() <= 1);
    CHECK(r.err.find("verdict: success") != std::string::npos);
  }

  TEST_CASE("spectral solve is deterministic and writes a manifest") {
    const fs::path dir = scratch_dir();
    const fs::path a = dir / "solve_a.json";
    const fs::path b = dir / "solve_b.json";
    const Result ra = cli({"solve", "--n", "16", "--m", "160", "--seed", "1", "--init", "spectral",
                           "--out", a.string()});
    const Result rb = cli({"solve", "--n", "16", "--m", "160", "--seed", "1", "--out", b.string()});
    REQUIRE(ra.code == 0);
    REQUIRE(rb.code == 0);
    CHECK(slurp(a) == slurp(b));
    const auto traj = nlohmann::json::parse(slurp(a));
    CHECK(traj["verdict"] == "success");
    CHECK(ra.out.find("final_rel_error") != std::string::npos);

    const auto manifest = nlohmann::json::parse(slurp(a.string() + ".manifest.json"));
    CHECK(manifest["subcommand"] == "solve");
    CHECK(manifest["master_seed"] == 1);
    CHECK(manifest["tool_version"] == kToolVersion);
    CHECK(manifest["artifacts"].size() == 2);
    CHECK(manifest.contains("start_time"));
    CHECK(manifest.contains("end_time"));
  }

  TEST_CASE("problem checkpoint round trip") {
    const fs::path dir = scratch_dir();
    const fs::path problem = dir / "problem.json";
    const fs::path first = dir / "first.json";
    const fs::path second = dir / "second.json";
    REQUIRE(cli({"solve", "--n", "4", "--m", "24", "--seed", "3", "--save-problem",
                 problem.string(), "--out", first.string()})
                .code == 0);
    REQUIRE(cli({"solve", "--problem", problem.string(), "--seed", "3", "--out", second.string()})
                .code == 0);
    CHECK(slurp(first) == slurp(second));
  }

  TEST_CASE("bad flags exit with 2") {
    CHECK(cli({"solve", "--n", "0", "--m", "4"}).code == 2);
    CHECK(cli({"solve", "--n", "2", "--m", "4", "--init", "magic"}).code == 2);
    CHECK(cli({"solve", "--m", "4"}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({}).code == 2);
  }

  TEST_CASE("solver errors exit with 1") {
    const Result r = cli({"solve", "--n", "4", "--m", "2"});
    CHECK(r.code == 1);
    CHECK(r.err.find("singular") != std::string::npos);
  }
}

TEST_SUITE("grid") {
  TEST_CASE("single n = 1 cell") {
    const Result r = cli({"grid", "--n", "1", "--m", "4", "--trials", "10"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"n", "m", "trials", "successes", "probability",
                                              "mean_iterations", "seed"});
    CHECK(std::stod(rows[1][4]) == 1.0);
  }

  TEST_CASE("m = 10n spectral cells and heatmap") {
    const fs::path dir = scratch_dir();
    const fs::path pgm = dir / "grid.pgm";
    const Result r = cli({"grid", "--n", "8,16", "--m-rule", "m=10*n", "--trials", "100",
                          "--init", "spectral", "--heatmap", pgm.string()});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][4]) >= 0.95);
    const std::string img = slurp(pgm);
    // Two distinct m (80, 160) by two n.
    CHECK(img.rfind("P5\n2 2\n255\n", 0) == 0);
    CHECK(img.size() == std::string("P5\n2 2\n255\n").size() + 4);
  }

  TEST_CASE("heatmap dimensions follow m rows and n columns") {
    const fs::path pgm = scratch_dir() / "cross.pgm";
    REQUIRE(cli({"grid", "--n-range", "1:3", "--m", "4,8", "--trials", "2", "--init", "random",
                 "--heatmap", pgm.string()})
                .code == 0);
    CHECK(slurp(pgm).rfind("P5\n3 2\n255\n", 0) == 0);
  }

  TEST_CASE("json format and thread independence") {
    const Result a = cli({"grid", "--n", "3", "--m", "6,9", "--trials", "20", "--init", "random",
                          "--threads", "1"});
    const Result b = cli({"grid", "--n", "3", "--m", "6,9", "--trials", "20", "--init", "random",
                          "--threads", "8"});
    CHECK(a.out == b.out);
    const Result j = cli({"grid", "--n", "3", "--m", "6", "--trials", "5", "--format", "json"});
    REQUIRE(j.code == 0);
    CHECK(nlohmann::json::parse(j.out)["cells"].size() == 1);
  }

  TEST_CASE("seed from the environment") {
    ::setenv("PRAP_SEED", "12345", 1);
    const Result r = cli({"grid", "--n", "2", "--m", "8", "--trials", "3"});
    ::unsetenv("PRAP_SEED");
    REQUIRE(r.code == 0);
    CHECK(csv_rows(r.out)[1][6] == "12345");
    ::setenv("PRAP_SEED", "12345", 1);
    const Result explicit_seed = cli({"grid", "--n", "2", "--m", "8", "--trials", "3", "--seed", "5"});
    ::unsetenv("PRAP_SEED");
    CHECK(csv_rows(explicit_seed.out)[1][6] == "5");
  }

  TEST_CASE("missing cell flags") {
    CHECK(cli({"grid", "--n", "2"}).code == 2);
    CHECK(cli({"grid", "--m", "2"}).code == 2);
    CHECK(cli({"grid", "--n", "2", "--m", "3", "--m-rule", "m=2*n"}).code == 2);
    CHECK(cli({"grid", "--n", "2", "--m-rule", "m=2n"}).code == 2);
  }
}

TEST_SUITE("stagnation") {
  TEST_CASE("n = 1 column is all ones, identical across thread counts") {
    const Result a = cli({"stagnation", "--n", "1,2", "--m", "3,6", "--instances", "10",
                          "--inits", "20", "--threads", "1"});
    const Result b = cli({"stagnation", "--n", "1,2", "--m", "3,6", "--instances", "10",
                          "--inits", "20", "--threads", "8"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    for (const auto& row : csv_rows(a.out)) {
      if (row[0] == "1") CHECK(std::stod(row[4]) == 1.0);
    }
  }

  TEST_CASE("n = 4, m = 16 sits near the 0.5 crossing") {
    const Result r = cli({"stagnation", "--n", "4", "--m", "16", "--instances", "50", "--inits",
                          "200"});
    REQUIRE(r.code == 0);
    const double p = std::stod(csv_rows(r.out)[1][4]);
    CHECK(std::abs(p - 0.5) <= 0.15);
  }
}

TEST_CASE("mn-curve for n = 2") {
  const Result r = cli({"mn-curve", "--n", "2"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"n", "M_n", "ratio"});
  const int mn = std::stoi(rows[1][1]);
  CHECK(mn >= 4);
  CHECK(mn <= 6);
  CHECK(std::stod(rows[1][2]) == mn / 4.0);
}

TEST_SUITE("validate") {
  TEST_CASE("diff-phase") {
    const Result r = cli({"validate", "--lemma", "diff-phase", "--samples", "100000"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["violations"] == 0);
    CHECK(j["passed"] == true);
  }

  TEST_CASE("min-f at t = 1") {
    const Result r = cli({"validate", "--lemma", "min-f", "--t", "1.0"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["estimates"][0]["margin"].get<double>() > 0.0);
  }

  TEST_CASE("unknown lemma") { CHECK(cli({"validate", "--lemma", "lemma-99"}).code == 2); }
}

TEST_CASE("replay reproduces outputs bitwise") {
  const fs::path dir = scratch_dir();
  const fs::path csv = dir / "replay.csv";
  const fs::path pgm = dir / "replay.pgm";
  REQUIRE(cli({"grid", "--n", "2,3", "--m", "6,9", "--trials", "10", "--init", "random", "--out",
               csv.string(), "--heatmap", pgm.string()})
              .code == 0);
  const std::string csv_before = slurp(csv);
  const std::string pgm_before = slurp(pgm);
  const auto manifest = nlohmann::json::parse(slurp(csv.string() + ".manifest.json"));
  CHECK(manifest["artifacts"].size() == 3);
  fs::remove(csv);
  fs::remove(pgm);
  REQUIRE(cli({"replay", csv.string() + ".manifest.json"}).code == 0);
  CHECK(slurp(csv) == csv_before);
  CHECK(slurp(pgm) == pgm_before);
}

TEST_CASE("binary entry point") {
  const std::string cmd = std::string(PRAP_BINARY) + " solve --n 1 --m 4 > /dev/null 2>&1";
  CHECK(std::system(cmd.c_str()) == 0);
  const std::string bad = std::string(PRAP_BINARY) + " validate --lemma nope > /dev/null 2>&1";
  const int status = std::system(bad.c_str());
  CHECK(WEXITSTATUS(status) == 2);
}
