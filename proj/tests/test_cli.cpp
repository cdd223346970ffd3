#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "homfe/io.hpp"
#include "homfe/problem.hpp"
#include "json.hpp"

#ifndef HOMOG_BINARY
#define HOMOG_BINARY "homog"
#endif

namespace fs = std::filesystem;
using namespace homfe;
using nlohmann::json;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("homfe_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

CliResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(HOMOG_BINARY) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  return {WEXITSTATUS(raw), slurp(out), slurp(err)};
}

json thermal_square_inclusion(int n, double contrast) {
  json doc;
  doc["cell"] = {{"dims", {n, n}}, {"lengths", {1.0, 1.0}}};
  doc["stencil"] = "two-triangles";
  doc["physics"] = "thermal";
  doc["microstructure"] = {{"type", "template"},
                           {"name", "square-inclusion"},
                           {"half_diagonal", 0.25}};
  doc["materials"]["0"] = {{"model", "conductivity-isotropic"},
                           {"kappa", 1.0}};
  doc["materials"]["1"] = {{"model", "conductivity-isotropic"},
                           {"kappa", contrast}};
  doc["reference"] = {{"policy", "volume-mean"}};
  doc["loading"] = {{0.01, 0.0}};
  doc["solver"] = {{"eta_cg", 1e-8}};
  return doc;
}

fs::path write_problem(const fs::path& dir, const json& doc) {
  const fs::path path = dir / "problem.json";
  std::ofstream(path) << doc.dump(2);
  return path;
}

}  // namespace

TEST_CASE("solve emits the result bundle and converges") {
  const fs::path dir = fresh_dir("solve");
  const fs::path problem = write_problem(dir, thermal_square_inclusion(32, 100.0));
  const CliResult r = run_cli(
      "solve --problem " + problem.string() + " --out " + (dir / "out").string(),
      dir);
  CHECK(r.code == 0);
  for (const char* name :
       {"u_step0.f64", "u_step0.meta.json", "gradient_step0.f64",
        "flux_step0.f64", "averages.csv", "report.csv", "solve.json",
        "phases.u8"}) {
    CHECK(fs::exists(dir / "out" / name));
  }

  // Round trip: reloading the flux dump and re-averaging reproduces the
  // logged volume averages bitwise.
  const Problem p = load_problem(problem);
  const GridLayout layout = p.layout();
  const FieldDump flux = read_field(dir / "out" / "flux_step0");
  QuadField q(2, layout.num_quads());
  q.data = flux.data;
  const Eigen::VectorXd avg = volume_average(layout, q);

  std::vector<std::string> header;
  const auto rows = read_csv(dir / "out" / "averages.csv", &header);
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0].size() == 5);  // step, e_0, e_1, avg_0, avg_1
  CHECK(std::stod(rows[0][3]) == avg[0]);
  CHECK(std::stod(rows[0][4]) == avg[1]);
}

TEST_CASE("solve of a uniform problem has zero fluctuation fields") {
  const fs::path dir = fresh_dir("uniform");
  json doc = thermal_square_inclusion(16, 1.0);
  doc["materials"]["1"] = doc["materials"]["0"];
  const fs::path problem = write_problem(dir, doc);
  const CliResult r = run_cli(
      "solve --problem " + problem.string() + " --out " + (dir / "out").string(),
      dir);
  CHECK(r.code == 0);
  const FieldDump u = read_field(dir / "out" / "u_step0");
  CHECK(u.data.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("solve runs are deterministic") {
  const fs::path dir = fresh_dir("determinism");
  const fs::path problem = write_problem(dir, thermal_square_inclusion(24, 50.0));
  const CliResult a = run_cli(
      "solve --problem " + problem.string() + " --out " + (dir / "a").string(),
      dir);
  const CliResult b = run_cli(
      "solve --problem " + problem.string() + " --out " + (dir / "b").string(),
      dir);
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  for (const char* name : {"u_step0.f64", "flux_step0.f64", "averages.csv"}) {
    CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
  }
}

TEST_CASE("validation failures exit with code 2 and name the field") {
  const fs::path dir = fresh_dir("validation");

  // Catalog missing a phase id used by the map.
  json doc = thermal_square_inclusion(16, 10.0);
  doc["materials"].erase("1");
  CliResult r = run_cli("solve --problem " +
                            write_problem(dir, doc).string() + " --out " +
                            (dir / "o1").string(),
                        dir);
  CHECK(r.code == 2);
  CHECK(r.err.find("materials") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "o1" / "averages.csv"));

  // Negative modulus.
  doc = thermal_square_inclusion(16, 10.0);
  doc["materials"]["1"]["kappa"] = -3.0;
  r = run_cli("solve --problem " + write_problem(dir, doc).string() +
                  " --out " + (dir / "o2").string(),
              dir);
  CHECK(r.code == 2);
  CHECK(r.err.find("materials.1") != std::string::npos);

  // Unknown stencil name.
  doc = thermal_square_inclusion(16, 10.0);
  doc["stencil"] = "pentagonal";
  r = run_cli("solve --problem " + write_problem(dir, doc).string() +
                  " --out " + (dir / "o3").string(),
              dir);
  CHECK(r.code == 2);
  CHECK(r.err.find("stencil") != std::string::npos);

  // Load vector of the wrong length.
  doc = thermal_square_inclusion(16, 10.0);
  doc["loading"] = {{0.01, 0.0, 0.0}};
  r = run_cli("solve --problem " + write_problem(dir, doc).string() +
                  " --out " + (dir / "o4").string(),
              dir);
  CHECK(r.code == 2);
  CHECK(r.err.find("loading[0]") != std::string::npos);

  // Missing subcommand.
  r = run_cli("", dir);
  CHECK(r.code == 2);
}

TEST_CASE("bounds of a uniform problem collapse to one") {
  const fs::path dir = fresh_dir("bounds_uniform");
  json doc = thermal_square_inclusion(8, 1.0);
  const fs::path problem = write_problem(dir, doc);
  const CliResult r = run_cli(
      "bounds --problem " + problem.string() + " --out " + (dir / "out").string(),
      dir);
  CHECK(r.code == 0);
  const double estimate = std::stod(slurp(dir / "out" / "condition.txt"));
  CHECK(estimate == doctest::Approx(1.0).epsilon(1e-10));

  std::vector<std::string> header;
  const auto rows = read_csv(dir / "out" / "bounds.csv", &header);
  CHECK(static_cast<Index>(rows.size()) == 64);
  for (const auto& row : rows) {
    CHECK(std::stod(row[1]) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::stod(row[2]) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("bounds scale with the phase contrast under an identity reference") {
  const fs::path dir = fresh_dir("bounds_contrast");
  json doc = thermal_square_inclusion(16, 1e3);
  doc["reference"] = {{"policy", "identity-scaled"}, {"scale", 1.0}};
  const fs::path problem = write_problem(dir, doc);
  const CliResult r = run_cli(
      "bounds --problem " + problem.string() + " --out " + (dir / "out").string(),
      dir);
  CHECK(r.code == 0);
  const double estimate = std::stod(slurp(dir / "out" / "condition.txt"));
  CHECK(estimate >= 1e3);
}

TEST_CASE("volume-mean reference improves the coated-sphere estimate") {
  const fs::path dir = fresh_dir("bounds_reference");
  json doc;
  doc["cell"] = {{"dims", {8, 8, 8}}, {"lengths", {1.0, 1.0, 1.0}}};
  doc["stencil"] = "trilinear-hex";
  doc["physics"] = "elasticity";
  doc["microstructure"] = {{"type", "template"},
                           {"name", "coated-sphere"},
                           {"r1", 0.2},
                           {"r2", 0.4}};
  doc["materials"]["0"] = {{"model", "linear-elastic-isotropic"},
                           {"bulk", 0.0013206}, {"shear", 0.00079236}};
  doc["materials"]["1"] = {{"model", "linear-elastic-isotropic"},
                           {"bulk", 1.3206033}, {"shear", 0.792362}};
  doc["materials"]["2"] = {{"model", "linear-elastic-isotropic"},
                           {"bulk", 1.0}, {"shear", 0.6}};
  doc["loading"] = {{1.0, 0.0, 0.0, 0.0, 0.0, 0.0}};

  doc["reference"] = {{"policy", "identity-scaled"}, {"scale", 1.0}};
  const CliResult rid = run_cli("bounds --problem " +
                                    write_problem(dir, doc).string() +
                                    " --out " + (dir / "id").string(),
                                dir);
  doc["reference"] = {{"policy", "volume-mean"}};
  const CliResult rmean = run_cli("bounds --problem " +
                                      write_problem(dir, doc).string() +
                                      " --out " + (dir / "mean").string(),
                                  dir);
  REQUIRE(rid.code == 0);
  REQUIRE(rmean.code == 0);
  const double est_id = std::stod(slurp(dir / "id" / "condition.txt"));
  const double est_mean = std::stod(slurp(dir / "mean" / "condition.txt"));
  CHECK(est_mean < est_id);
}

TEST_CASE("compare emits matching scheme counts") {
  const fs::path dir = fresh_dir("compare");
  json doc;
  doc["cell"] = {{"dims", {8, 8}}, {"lengths", {1.0, 1.0}}};
  doc["stencil"] = "two-triangles";
  doc["physics"] = "elasticity";
  doc["microstructure"] = {{"type", "template"},
                           {"name", "random-two-phase"},
                           {"fraction", 0.5},
                           {"seed", 9}};
  doc["materials"]["0"] = {{"model", "linear-elastic-isotropic"},
                           {"bulk", 1.0}, {"shear", 0.5}};
  doc["materials"]["1"] = {{"model", "linear-elastic-isotropic"},
                           {"bulk", 20.0}, {"shear", 11.0}};
  doc["reference"] = {{"policy", "identity-scaled"}};
  doc["loading"] = {{1.0, 0.0, 0.0}};
  const fs::path problem = write_problem(dir, doc);
  const CliResult r = run_cli(
      "compare --problem " + problem.string() + " --out " + (dir / "out").string(),
      dir);
  CHECK(r.code == 0);

  std::vector<std::string> header;
  const auto summary =
      read_csv(dir / "out" / "compare_summary.csv", &header);
  REQUIRE(summary.size() == 1);
  CHECK(summary[0][1] == summary[0][2]);  // newton counts equal
  CHECK(std::abs(std::stoi(summary[0][3]) - std::stoi(summary[0][4])) <= 1);
  CHECK(std::stod(summary[0][5]) < 1e-6);

  // The bilinear stencil has equal weights too, but compare rejects a
  // doctored raw map problem... exercised via the unequal-weight guard in
  // unit tests; here reject an ill-sized loading instead.
  doc["loading"] = {{1.0, 0.0}};
  const CliResult bad = run_cli("compare --problem " +
                                    write_problem(dir, doc).string() +
                                    " --out " + (dir / "bad").string(),
                                dir);
  CHECK(bad.code == 2);
}

TEST_CASE("probe-precond dumps frequency diagnostics") {
  const fs::path dir = fresh_dir("probe");
  const fs::path problem = write_problem(dir, thermal_square_inclusion(8, 10.0));
  const CliResult r = run_cli("probe-precond --problem " + problem.string() +
                                  " --out " + (dir / "out").string(),
                              dir);
  CHECK(r.code == 0);
  std::vector<std::string> header;
  const auto rows = read_csv(dir / "out" / "precond_blocks.csv", &header);
  REQUIRE(rows.size() == 8 * (8 / 2 + 1));
  CHECK(rows[0][4] == "pseudo-inverted");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i][4] == "invertible");
    CHECK(std::stod(rows[i][5]) > 0.0);
  }
}

TEST_CASE("raw phase maps round trip through the problem file") {
  const fs::path dir = fresh_dir("rawmap");
  std::vector<std::uint8_t> phases(16 * 16, 0);
  for (std::size_t i = 0; i < phases.size(); i += 3) phases[i] = 1;
  write_phase_map(dir / "phases.u8", phases);

  json doc = thermal_square_inclusion(16, 10.0);
  doc["microstructure"] = {{"type", "raw"}, {"path", "phases.u8"}};
  const Problem p = load_problem(write_problem(dir, doc));
  CHECK(p.phases == phases);

  // Truncated file is rejected.
  phases.pop_back();
  write_phase_map(dir / "phases.u8", phases);
  CHECK_THROWS_AS(load_problem(dir / "problem.json"), ValidationError);
}
