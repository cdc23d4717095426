#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "insulopt/assembly.hpp"
#include "insulopt/cli.hpp"
#include "insulopt/eigen.hpp"
#include "insulopt/energy.hpp"
#include "insulopt/mesh.hpp"
#include "insulopt/oracles.hpp"
#include "json.hpp"

using namespace insulopt;
using doctest::Approx;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// Fresh scratch directory for one test case, removed on destruction.
struct TempDir {
  fs::path path;
  TempDir() {
    std::string templ = (fs::temp_directory_path() / "insulopt_cli_XXXXXX").string();
    path = mkdtemp(templ.data());
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

/// Runs the CLI while capturing stdout and stderr.
struct RunOutcome {
  int code = -1;
  std::string out;
  std::string err;
};

RunOutcome run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  std::streambuf* old_out = std::cout.rdbuf(out.rdbuf());
  std::streambuf* old_err = std::cerr.rdbuf(err.rdbuf());
  RunOutcome outcome;
  try {
    outcome.code = cli::run(args);
  } catch (...) {
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    throw;
  }
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  outcome.out = out.str();
  outcome.err = err.str();
  return outcome;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return json::parse(in);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

bool no_leftover_temporaries(const fs::path& dir) {
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".tmp") return false;
  return true;
}

}  // namespace

TEST_CASE("mesh generation writes loadable files and prints a summary") {
  TempDir dir;

  auto disk = run_cli({"mesh", "disk", "--radius", "1", "--rings", "6", "--out",
                       dir.file("disk.msh")});
  CHECK(disk.code == 0);
  const json summary = json::parse(disk.out);
  CHECK(summary["generator"] == "disk");
  CHECK(summary["nodes"] == 169);  // 1 + 8 * 6*7/2
  const Mesh loaded = load_mesh(dir.file("disk.msh"));
  CHECK(loaded.node_count() == 169);
  CHECK(loaded.dim == 2);

  CHECK(run_cli({"mesh", "interval", "--a", "0", "--b", "1", "--cells", "10", "--out",
                 dir.file("line.msh")})
            .code == 0);
  CHECK(load_mesh(dir.file("line.msh")).node_count() == 11);

  CHECK(run_cli({"mesh", "two-disks", "--radius1", "0.5", "--radius2", "1", "--separation",
                 "3", "--rings", "4", "--out", dir.file("two.msh")})
            .code == 0);
  CHECK(load_mesh(dir.file("two.msh")).domain_component_count == 2);

  CHECK(run_cli({"mesh", "rectangle", "--width", "2", "--height", "1", "--nx", "6", "--ny",
                 "3", "--out", dir.file("rect.msh")})
            .code == 0);
  CHECK(load_mesh(dir.file("rect.msh")).node_count() == 7 * 4);

  CHECK(no_leftover_temporaries(dir.path));
}

TEST_CASE("energy artifact carries the envelope, diagnostics and densities") {
  TempDir dir;
  REQUIRE(run_cli({"mesh", "disk", "--radius", "1", "--rings", "8", "--out",
                   dir.file("disk.msh")})
              .code == 0);

  auto run = run_cli({"energy", "--mesh", dir.file("disk.msh"), "--m", "1", "--out",
                      dir.file("energy.json"), "--csv", dir.file("energy.csv"),
                      "--profile", dir.file("profile.csv")});
  REQUIRE(run.code == 0);

  const json artifact = read_json(dir.file("energy.json"));
  CHECK(artifact["version"] == kVersionString);
  CHECK(artifact["command"] == "energy");
  CHECK(artifact.contains("timestamp"));
  CHECK(artifact["config"]["m"] == 1.0);
  CHECK(artifact["config"]["f"] == "const:1");

  // The artifact reproduces a direct library call on the same mesh.
  const Mesh mesh = load_mesh(dir.file("disk.msh"));
  const AssembledOperators ops = assemble(mesh);
  const ScalarField f{&mesh, Eigen::VectorXd::Ones(mesh.node_count())};
  const EnergySolution direct = solve_energy(EnergyProblem{&ops, 1.0, f, {}});
  const json& result = artifact["result"];
  CHECK(result["energy"].get<double>() == Approx(direct.energy).epsilon(1e-11));
  CHECK(result["h_defined"] == true);
  CHECK(result["fast_path"] == true);
  CHECK(result["symmetry"]["classification"] == "radial");
  CHECK(result["stationarity"]["is_stationary"] == true);
  CHECK(result["h_opt"].size() == 64);
  CHECK(result["trace_stats"]["cv"].get<double>() < 1e-2);
  CHECK_FALSE(result.contains("u"));  // opt-in via --include-state

  const auto density_rows = read_lines(dir.file("energy.csv"));
  CHECK(density_rows[0] == "marker,arclength,h_opt");
  CHECK(density_rows.size() == 65);
  const auto profile_rows = read_lines(dir.file("profile.csv"));
  CHECK(profile_rows[0] == "marker,angle,arclength,u,du_dnu,du_dtau,j");
  CHECK(profile_rows.size() == 65);
  CHECK(no_leftover_temporaries(dir.path));

  SUBCASE("reruns are identical apart from the timestamp") {
    json before = artifact;
    REQUIRE(run_cli({"energy", "--mesh", dir.file("disk.msh"), "--m", "1", "--out",
                     dir.file("energy.json")})
                .code == 0);
    json after = read_json(dir.file("energy.json"));
    before.erase("timestamp");
    after.erase("timestamp");
    CHECK(before == after);
  }
  SUBCASE("--include-state embeds the nodal field") {
    REQUIRE(run_cli({"energy", "--mesh", dir.file("disk.msh"), "--include-state", "--out",
                     dir.file("state.json")})
                .code == 0);
    const json with_state = read_json(dir.file("state.json"));
    CHECK(with_state["result"]["u"].size() == static_cast<std::size_t>(mesh.node_count()));
  }
}

TEST_CASE("eigen artifact matches the library and documents every start") {
  TempDir dir;
  REQUIRE(run_cli({"mesh", "interval", "--a", "-1", "--b", "1", "--cells", "200", "--out",
                   dir.file("line.msh")})
              .code == 0);

  auto run = run_cli({"eigen", "--mesh", dir.file("line.msh"), "--m", "2", "--starts",
                      "uniform", "--out", dir.file("eigen.json"), "--csv",
                      dir.file("eigen.csv")});
  REQUIRE(run.code == 0);

  const json artifact = read_json(dir.file("eigen.json"));
  CHECK(artifact["command"] == "eigen");
  CHECK(artifact["config"]["starts"] == "uniform");
  const json& result = artifact["result"];
  CHECK(result["lambda"].get<double>() == Approx(interval_lambda(2.0)).epsilon(1e-4));
  CHECK(result["per_start"].size() == 1);
  CHECK(result["per_start"][0]["name"] == "uniform");
  CHECK(result["best_start"] == 0);
  CHECK(result.contains("stationarity"));
  CHECK_FALSE(result.contains("symmetry"));  // not a disk

  const auto rows = read_lines(dir.file("eigen.csv"));
  CHECK(rows[0] == "marker,angle,h_opt");
  CHECK(rows.size() == 3);  // two endpoints
  CHECK(no_leftover_temporaries(dir.path));
}

TEST_CASE("closed-form queries print rounded reference values") {
  auto ball = run_cli({"analytic", "ball-energy", "--d", "2", "--radius", "1", "--m", "1"});
  REQUIRE(ball.code == 0);
  json result = json::parse(ball.out)["result"];
  CHECK(result["c_opt"].get<double>() == Approx(0.0795774715459).epsilon(1e-11));
  CHECK(result["energy"].get<double>() == Approx(-0.321349540849).epsilon(1e-11));

  auto pair = run_cli({"analytic", "two-ball", "--d", "2", "--radius1", "0.5", "--radius2",
                       "1", "--m", "1"});
  REQUIRE(pair.code == 0);
  result = json::parse(pair.out)["result"];
  CHECK(result["c1"].get<double>() == 0.0);
  CHECK(result["c2"].get<double>() == Approx(0.0795774715459).epsilon(1e-11));
  CHECK(result["energy"].get<double>() == Approx(-0.333621387152).epsilon(1e-11));
  CHECK(result["non_unique"] == false);

  auto line = run_cli({"analytic", "interval-lambda", "--m", "2"});
  REQUIRE(line.code == 0);
  result = json::parse(line.out)["result"];
  CHECK(result["lambda"].get<double>() == Approx(0.740173884394955).epsilon(1e-11));
  CHECK(result["omega"].get<double>() == Approx(0.860333589019373).epsilon(1e-11));

  auto disk = run_cli({"analytic", "disk-lambda", "--radius", "1", "--m",
                       "6.283185307179586"});
  REQUIRE(disk.code == 0);
  result = json::parse(disk.out)["result"];
  CHECK(result["lambda"].get<double>() == Approx(1.576992730808707).epsilon(1e-11));

  auto threshold = run_cli({"analytic", "m0", "--radius", "1"});
  REQUIRE(threshold.code == 0);
  result = json::parse(threshold.out)["result"];
  CHECK(result["m0"].get<double>() == Approx(1.853470111523370).epsilon(1e-11));
  CHECK(result["m0_paths"]["closed_form"].get<double>() ==
        Approx(result["m0_paths"]["root_find"].get<double>()).epsilon(1e-9));
  CHECK(result["lambda_neumann"].get<double>() == Approx(3.389957716671946).epsilon(1e-11));
  CHECK(result["lambda_dirichlet"].get<double>() == Approx(5.783185962946785).epsilon(1e-11));

  auto bound = run_cli({"analytic", "nonexistence-bound", "--d", "3", "--m", "1", "--n-max",
                        "3"});
  REQUIRE(bound.code == 0);
  result = json::parse(bound.out)["result"];
  REQUIRE(result["bounds"].size() == 3);
  for (int n = 1; n <= 3; ++n) {
    CHECK(result["bounds"][n - 1]["n"] == n);
    CHECK(result["bounds"][n - 1]["bound"].get<double>() ==
          Approx(12.0 * 3.14159265358979323846 / n).epsilon(1e-11));
  }
}

TEST_CASE("convergence study reports second-order rates") {
  TempDir dir;
  auto run = run_cli({"converge", "--study", "interval-lambda", "--levels", "3", "--out",
                      dir.file("conv.json"), "--csv", dir.file("conv.csv")});
  REQUIRE(run.code == 0);

  const json artifact = read_json(dir.file("conv.json"));
  const json& rows = artifact["result"]["rows"];
  REQUIRE(rows.size() == 3);
  CHECK(rows[2]["rate"].get<double>() > 1.8);
  CHECK(rows[2]["error"].get<double>() < rows[1]["error"].get<double>());

  const auto csv = read_lines(dir.file("conv.csv"));
  CHECK(csv[0] == "h,value,error,rate");
  CHECK(csv.size() == 4);
}

TEST_CASE("threshold search brackets the closed form from the command line") {
  TempDir dir;
  auto run = run_cli({"threshold", "--radius", "1", "--rings", "8", "--out",
                      dir.file("m0.json"), "--csv", dir.file("m0.csv")});
  REQUIRE(run.code == 0);

  const json result = read_json(dir.file("m0.json"))["result"];
  const double m0 = threshold_m0(1.0);
  CHECK(result["m0_oracle"].get<double>() == Approx(m0).epsilon(1e-11));
  CHECK(std::abs(result["m0_fem"].get<double>() - m0) < 0.05 * m0);
  CHECK(result["bracket_lo"].get<double>() < m0);
  CHECK(result["bracket_hi"].get<double>() > m0);
  CHECK(result["probes"].size() >= 4);

  const auto csv = read_lines(dir.file("m0.csv"));
  CHECK(csv[0] == "m,lambda_best,lambda_radial_oracle,cv,classification,refined");
  CHECK(csv.size() == result["probes"].size() + 1);
  CHECK(no_leftover_temporaries(dir.path));
}

TEST_CASE("exit codes separate usage errors from solver failures") {
  TempDir dir;
  REQUIRE(run_cli({"mesh", "disk", "--radius", "1", "--rings", "4", "--out",
                   dir.file("disk.msh")})
              .code == 0);

  CHECK(run_cli({"--help"}).code == 0);
  CHECK(run_cli({}).code == 2);                               // a subcommand is required
  CHECK(run_cli({"frobnicate"}).code == 2);                   // unknown subcommand
  CHECK(run_cli({"energy", "--mesh", dir.file("disk.msh"), "--bogus"}).code == 2);
  CHECK(run_cli({"energy"}).code == 2);                       // --mesh is required
  CHECK(run_cli({"energy", "--mesh", dir.file("absent.msh")}).code == 2);
  CHECK(run_cli({"energy", "--mesh", dir.file("disk.msh"), "--m", "-1"}).code == 2);
  CHECK(run_cli({"energy", "--mesh", dir.file("disk.msh"), "--f", "const:-2"}).code == 2);
  CHECK(run_cli({"energy", "--mesh", dir.file("disk.msh"), "--f", "radial:nope"}).code == 2);
  CHECK(run_cli({"eigen", "--mesh", dir.file("disk.msh"), "--starts", "sideways"}).code == 2);
  CHECK(run_cli({"converge", "--study", "interval-lambda", "--levels", "2"}).code == 2);
  CHECK(run_cli({"converge", "--study", "unknown-study"}).code == 2);

  auto missing = run_cli({"energy", "--mesh", dir.file("absent.msh")});
  CHECK(missing.err.find("cannot open") != std::string::npos);

  // An honest solver failure (iteration cap of one sweep) is exit 1.
  CHECK(run_cli({"eigen", "--mesh", dir.file("disk.msh"), "--max-iter", "1"}).code == 1);

  // Corrupt mesh files are usage errors with a line number.
  const std::string bad_path = dir.file("bad.msh");
  std::ofstream(bad_path) << "insulmesh 1\ndim 2\nnodes 1\nbroken tokens here\n";
  auto corrupt = run_cli({"energy", "--mesh", bad_path});
  CHECK(corrupt.code == 2);
  CHECK(corrupt.err.find("line") != std::string::npos);
}

TEST_CASE("radial sources reshape the optimal layer") {
  TempDir dir;
  REQUIRE(run_cli({"mesh", "disk", "--radius", "1", "--rings", "8", "--out",
                   dir.file("disk.msh")})
              .code == 0);
  for (const std::string profile : {"radial:parabola", "radial:gauss", "radial:ring"}) {
    auto run = run_cli({"energy", "--mesh", dir.file("disk.msh"), "--f", profile, "--out",
                        dir.file("out.json")});
    REQUIRE(run.code == 0);
    const json result = read_json(dir.file("out.json"))["result"];
    CHECK(result["energy"].get<double>() < 0.0);
    CHECK(result["h_defined"] == true);
    CHECK(result["symmetry"]["classification"] == "radial");
  }
}
