#include "insulopt/cli.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "insulopt/assembly.hpp"
#include "insulopt/eigen.hpp"
#include "insulopt/energy.hpp"
#include "insulopt/mesh.hpp"
#include "insulopt/oracles.hpp"
#include "insulopt/report.hpp"
#include "insulopt/shape.hpp"
#include "insulopt/symmetry.hpp"

namespace insulopt::cli {

namespace {

// Option bundles --------------------------------------------------------

struct MeshArgs {
  IntervalSpec interval;
  DiskSpec disk;
  TwoDisksSpec two_disks;
  RectangleSpec rectangle;
  std::string out;
};

struct EnergyArgs {
  std::string mesh_path;
  double m = 1.0;
  std::string f_spec = "const:1";
  double tol = 1e-10;
  int max_iter = 500;
  bool alternating = false;
  double stationarity_tol = 1e-2;
  bool include_state = false;
  std::string out, csv, profile_csv;
};

struct EigenArgs {
  std::string mesh_path;
  double m = 1.0;
  std::string starts = "default";
  std::uint64_t seed = 0;
  double tol = 1e-9;
  int max_iter = 300;
  double stationarity_tol = 1e-2;
  bool include_state = false;
  std::string out, csv, profile_csv;
};

struct ThresholdArgs {
  double radius = 1.0;
  int rings = 16;
  std::string bracket = "auto";
  double width_rel = 0.05;
  int max_probes = 12;
  double gap_factor = 10.0;
  int refine_rings = 0;
  std::uint64_t seed = 0;
  int max_iter = 1000;
  std::string out, csv;
};

struct AnalyticArgs {
  int d = 2;
  double radius = 1.0;
  double radius2 = 1.0;
  double m = 1.0;
  int n = 1;
  int n_max = 0;
  std::string out;
};

struct ConvergeArgs {
  std::string study;
  int levels = 3;
  double m = 0.0;  // 0 -> per-study default
  std::string out, csv;
};

// Shared helpers ---------------------------------------------------------

double parse_real(const std::string& text, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || !std::isfinite(v))
    throw InvalidSpecError(what + " is not a number: '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) parts.push_back(item);
  return parts;
}

/// Nodal source field from "const:<value>" or "radial:<name>"; the radial
/// registry evaluates nonnegative profiles of the distance from the origin.
ScalarField parse_source(const std::string& spec, const Mesh& mesh) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  Eigen::VectorXd f(mesh.node_count());
  if (kind == "const") {
    const double value = parse_real(arg, "source constant");
    if (value < 0.0) throw InvalidSpecError("source constant must be nonnegative");
    f.setConstant(value);
  } else if (kind == "radial") {
    std::function<double(double)> profile;
    if (arg == "parabola")
      profile = [](double r) { return std::max(1.0 - r * r, 0.0); };
    else if (arg == "gauss")
      profile = [](double r) { return std::exp(-r * r); };
    else if (arg == "ring")
      profile = [](double r) { return r * r; };
    else
      throw InvalidSpecError("unknown radial profile '" + arg +
                             "' (available: parabola, gauss, ring)");
    for (int i = 0; i < mesh.node_count(); ++i)
      f[i] = profile(std::hypot(mesh.nodes[i][0], mesh.dim == 2 ? mesh.nodes[i][1] : 0.0));
  } else {
    throw InvalidSpecError("source spec must be const:<value> or radial:<name>, got '" + spec +
                           "'");
  }
  return ScalarField{&mesh, std::move(f)};
}

/// Start list from "default" or a comma list of
/// uniform | cap[:<center>:<fraction>] | random[:<seed>] tokens.
std::vector<StartSpec> parse_starts(const std::string& spec, const Mesh& mesh,
                                    std::uint64_t seed) {
  if (spec.empty() || spec == "default") return default_starts(mesh, seed);
  std::vector<StartSpec> starts;
  for (const std::string& token : split(spec, ',')) {
    const std::vector<std::string> parts = split(token, ':');
    StartSpec start;
    if (parts.empty()) throw InvalidSpecError("empty start token");
    if (parts[0] == "uniform" && parts.size() == 1) {
      start.kind = StartSpec::Kind::Uniform;
    } else if (parts[0] == "cap" && (parts.size() == 1 || parts.size() == 3)) {
      start.kind = StartSpec::Kind::Cap;
      if (parts.size() == 3) {
        start.cap_center = parse_real(parts[1], "cap center");
        start.cap_fraction = parse_real(parts[2], "cap fraction");
      }
    } else if (parts[0] == "random" && parts.size() <= 2) {
      start.kind = StartSpec::Kind::Random;
      start.seed = parts.size() == 2
                       ? static_cast<std::uint64_t>(
                             std::strtoull(parts[1].c_str(), nullptr, 10))
                       : seed;
    } else {
      throw InvalidSpecError(
          "unknown start token '" + token +
          "' (expected uniform, cap[:<center>:<fraction>], or random[:<seed>])");
    }
    starts.push_back(start);
  }
  return starts;
}

/// Prints to stdout when no path is given, otherwise writes atomically.
void deliver(const Json& artifact, const std::string& out_path) {
  const std::string text = artifact.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    write_text_atomic(out_path, text);
}

// Subcommand bodies -------------------------------------------------------

int run_mesh(const CLI::App& mesh_cmd, const MeshArgs& args) {
  MeshSpec spec = IntervalSpec{};
  std::string generator;
  if (mesh_cmd.got_subcommand("interval")) {
    spec = args.interval;
    generator = "interval";
  } else if (mesh_cmd.got_subcommand("disk")) {
    spec = args.disk;
    generator = "disk";
  } else if (mesh_cmd.got_subcommand("two-disks")) {
    spec = args.two_disks;
    generator = "two-disks";
  } else {
    spec = args.rectangle;
    generator = "rectangle";
  }
  const Mesh mesh = generate_mesh(spec);
  save_mesh(mesh, args.out);
  Json summary{{"generator", generator},
               {"path", args.out},
               {"nodes", mesh.node_count()},
               {"elements", mesh.element_count()},
               {"boundary_nodes", static_cast<int>(mesh.boundary.size())}};
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int run_energy(const EnergyArgs& args) {
  const Mesh mesh = load_mesh(args.mesh_path);
  const AssembledOperators ops = assemble(mesh);
  EnergyProblem problem;
  problem.ops = &ops;
  problem.mass = args.m;
  problem.source = parse_source(args.f_spec, mesh);
  problem.options.energy_rel_tol = args.tol;
  problem.options.max_iterations = args.max_iter;
  problem.options.force_alternating = args.alternating;
  const EnergySolution solution = solve_energy(problem);

  Json result = energy_report(solution, args.include_state);
  if (solution.h_defined && disk_radius(mesh))
    result["symmetry"] = symmetry_json(symmetry_report(solution, ops));
  if (solution.rhs.size() == ops.node_count()) {
    const BoundaryProfile profile = boundary_profile(solution, ops);
    result["stationarity"] =
        stationarity_json(stationarity_check(profile, args.stationarity_tol));
    if (!args.profile_csv.empty()) write_text_atomic(args.profile_csv, profile_csv(profile));
  }
  Json config{{"mesh", args.mesh_path},
              {"m", json_real(args.m)},
              {"f", args.f_spec},
              {"tol", json_real(args.tol)},
              {"max_iter", args.max_iter},
              {"alternating", args.alternating},
              {"stationarity_tol", json_real(args.stationarity_tol)}};
  deliver(make_artifact("energy", std::move(config), std::move(result)), args.out);
  if (!args.csv.empty()) write_text_atomic(args.csv, energy_csv(solution, ops));
  return 0;
}

int run_eigen(const EigenArgs& args) {
  const Mesh mesh = load_mesh(args.mesh_path);
  const AssembledOperators ops = assemble(mesh);
  EigenProblem problem;
  problem.ops = &ops;
  problem.mass = args.m;
  problem.starts = parse_starts(args.starts, mesh, args.seed);
  problem.options.lambda_rel_tol = args.tol;
  problem.options.max_outer = args.max_iter;
  const EigenSolution solution = solve_eigen(problem);

  std::optional<SymmetryReport> symmetry;
  if (disk_radius(mesh)) symmetry = symmetry_report(solution, ops);
  Json result = eigen_report(solution, symmetry ? &*symmetry : nullptr, args.include_state);
  const BoundaryProfile profile = boundary_profile(solution, ops);
  result["stationarity"] =
      stationarity_json(stationarity_check(profile, args.stationarity_tol));
  if (!args.profile_csv.empty()) write_text_atomic(args.profile_csv, profile_csv(profile));
  Json config{{"mesh", args.mesh_path},
              {"m", json_real(args.m)},
              {"starts", args.starts},
              {"seed", args.seed},
              {"tol", json_real(args.tol)},
              {"max_iter", args.max_iter},
              {"stationarity_tol", json_real(args.stationarity_tol)}};
  deliver(make_artifact("eigen", std::move(config), std::move(result)), args.out);
  if (!args.csv.empty()) write_text_atomic(args.csv, eigen_csv(solution, ops));
  return 0;
}

int run_threshold(const ThresholdArgs& args) {
  DiskSpec spec;
  spec.radius = args.radius;
  spec.rings = args.rings;
  const Mesh mesh = generate_mesh(spec);
  ThresholdOptions options;
  if (args.bracket != "auto") {
    const std::vector<std::string> parts = split(args.bracket, ':');
    if (parts.size() != 2)
      throw InvalidSpecError("--bracket expects 'auto' or '<lo>:<hi>' relative factors");
    options.bracket_lo_rel = parse_real(parts[0], "bracket low factor");
    options.bracket_hi_rel = parse_real(parts[1], "bracket high factor");
  }
  options.width_rel = args.width_rel;
  options.max_probes = args.max_probes;
  options.gap_factor = args.gap_factor;
  options.refine_rings = args.refine_rings;
  options.seed_salt = args.seed;
  options.eigen_options.max_outer = args.max_iter;
  const ThresholdResult result = estimate_m0_fem(mesh, options);

  Json config{{"radius", json_real(args.radius)}, {"rings", args.rings},
              {"bracket", args.bracket},          {"width_rel", json_real(args.width_rel)},
              {"max_probes", args.max_probes},    {"gap_factor", json_real(args.gap_factor)},
              {"refine_rings", args.refine_rings}, {"seed", args.seed},
              {"max_iter", args.max_iter}};
  deliver(make_artifact("threshold", std::move(config), threshold_report(result)), args.out);
  if (!args.csv.empty()) write_text_atomic(args.csv, threshold_csv(result));
  return 0;
}

int run_analytic(const CLI::App& analytic_cmd, const AnalyticArgs& args) {
  Json result;
  std::string query;
  if (analytic_cmd.got_subcommand("ball-energy")) {
    query = "ball-energy";
    const BallEnergy oracle = ball_energy(BallSpec(args.d, args.radius), args.m);
    result = Json{{"c_opt", json_real(oracle.trace_constant)},
                  {"energy", json_real(oracle.energy)}};
  } else if (analytic_cmd.got_subcommand("two-ball")) {
    query = "two-ball";
    const TwoBallOptimum oracle = two_ball_optimum(args.radius, args.radius2, args.d, args.m);
    result = Json{{"c1", json_real(oracle.trace_constant_1)},
                  {"c2", json_real(oracle.trace_constant_2)},
                  {"energy", json_real(oracle.energy)},
                  {"non_unique", oracle.non_unique}};
  } else if (analytic_cmd.got_subcommand("interval-lambda")) {
    query = "interval-lambda";
    const double lambda = interval_lambda(args.m);
    result = Json{{"lambda", json_real(lambda)}, {"omega", json_real(std::sqrt(lambda))}};
  } else if (analytic_cmd.got_subcommand("disk-lambda")) {
    query = "disk-lambda";
    result = Json{{"lambda", json_real(disk_radial_lambda(args.radius, args.m))}};
  } else if (analytic_cmd.got_subcommand("m0")) {
    query = "m0";
    const auto [closed_form, root_find] = threshold_m0_paths(args.radius);
    const double j01 = bessel_root(BesselRootKind::DirichletJ0);
    const double j1p = bessel_root(BesselRootKind::NeumannJ1Prime);
    result = Json{{"m0", json_real(threshold_m0(args.radius))},
                  {"m0_paths", Json{{"closed_form", json_real(closed_form)},
                                    {"root_find", json_real(root_find)}}},
                  {"lambda_neumann", json_real(j1p * j1p / (args.radius * args.radius))},
                  {"lambda_dirichlet", json_real(j01 * j01 / (args.radius * args.radius))}};
  } else {
    query = "nonexistence-bound";
    const int n_max = args.n_max > 0 ? args.n_max : args.n;
    Json bounds = Json::array();
    for (int n = args.n_max > 0 ? 1 : args.n; n <= n_max; ++n)
      bounds.push_back(
          Json{{"n", n}, {"bound", json_real(nonexistence_bound(args.d, args.m, n))}});
    result = Json{{"d", args.d}, {"m", json_real(args.m)}, {"bounds", std::move(bounds)}};
  }
  Json config{{"query", query},       {"d", args.d},
              {"radius", json_real(args.radius)}, {"radius2", json_real(args.radius2)},
              {"m", json_real(args.m)},           {"n", args.n},
              {"n_max", args.n_max}};
  deliver(make_artifact("analytic", std::move(config), std::move(result)), args.out);
  return 0;
}

struct StudyRow {
  double h = 0.0;
  double value = 0.0;
  double error = 0.0;  // relative to the oracle
  double rate = 0.0;   // vs the previous level; 0 on the first row
};

int run_converge(const ConvergeArgs& args) {
  if (args.levels < 3) throw InvalidSpecError("convergence studies need at least 3 levels");
  std::vector<StudyRow> rows;
  double oracle = 0.0;
  double mass = args.m;

  if (args.study == "interval-lambda") {
    if (mass <= 0.0) mass = 2.0;
    oracle = interval_lambda(mass);
    int cells = 125;
    for (int level = 0; level < args.levels; ++level, cells *= 2) {
      const Mesh mesh = generate_mesh(IntervalSpec{-1.0, 1.0, cells});
      const AssembledOperators ops = assemble(mesh);
      EigenProblem problem;
      problem.ops = &ops;
      problem.mass = mass;
      problem.starts = {StartSpec{}};  // uniform
      const EigenSolution solution = solve_eigen(problem);
      rows.push_back({2.0 / cells, solution.lambda, 0.0, 0.0});
    }
  } else if (args.study == "disk-energy") {
    if (mass <= 0.0) mass = 1.0;
    oracle = ball_energy(BallSpec(2, 1.0), mass).energy;
    int rings = 8;
    for (int level = 0; level < args.levels; ++level, rings *= 2) {
      DiskSpec spec;
      spec.rings = rings;
      const Mesh mesh = generate_mesh(spec);
      const AssembledOperators ops = assemble(mesh);
      EnergyProblem problem;
      problem.ops = &ops;
      problem.mass = mass;
      problem.source = ScalarField{&mesh, Eigen::VectorXd::Ones(mesh.node_count())};
      const EnergySolution solution = solve_energy(problem);
      rows.push_back({1.0 / rings, solution.energy, 0.0, 0.0});
    }
  } else if (args.study == "disk-lambda") {
    if (mass <= 0.0) mass = 2.0 * threshold_m0(1.0);
    oracle = disk_radial_lambda(1.0, mass);
    int rings = 8;
    for (int level = 0; level < args.levels; ++level, rings *= 2) {
      DiskSpec spec;
      spec.rings = rings;
      const Mesh mesh = generate_mesh(spec);
      const AssembledOperators ops = assemble(mesh);
      EigenProblem problem;
      problem.ops = &ops;
      problem.mass = mass;
      problem.starts = {StartSpec{}};  // uniform suffices on the radial branch
      problem.options.max_outer = 1000;
      const EigenSolution solution = solve_eigen(problem);
      rows.push_back({1.0 / rings, solution.lambda, 0.0, 0.0});
    }
  } else {
    throw InvalidSpecError("unknown study '" + args.study +
                           "' (available: interval-lambda, disk-energy, disk-lambda)");
  }

  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].error = std::abs(rows[i].value - oracle) / std::abs(oracle);
    if (i > 0)
      rows[i].rate = std::log(rows[i - 1].error / rows[i].error) /
                     std::log(rows[i - 1].h / rows[i].h);
  }

  Json table = Json::array();
  for (const StudyRow& row : rows)
    table.push_back(Json{{"h", json_real(row.h)},
                         {"value", json_real(row.value)},
                         {"error", json_real(row.error)},
                         {"rate", json_real(row.rate)}});
  Json result{{"oracle", json_real(oracle)}, {"m", json_real(mass)}, {"rows", std::move(table)}};
  Json config{{"study", args.study}, {"levels", args.levels}, {"m", json_real(args.m)}};
  deliver(make_artifact("converge", std::move(config), std::move(result)), args.out);
  if (!args.csv.empty()) {
    std::ostringstream csv;
    csv << "h,value,error,rate\n";
    for (const StudyRow& row : rows) {
      char line[160];
      std::snprintf(line, sizeof line, "%.9g,%.9g,%.9g,%.9g\n", row.h, row.value, row.error,
                    row.rate);
      csv << line;
    }
    write_text_atomic(args.csv, csv.str());
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"optimal boundary insulation: solvers, thresholds, analytic references"};
  app.name("insulopt");
  app.require_subcommand(1);

  MeshArgs mesh_args;
  CLI::App* mesh_cmd = app.add_subcommand("mesh", "generate a mesh file");
  mesh_cmd->require_subcommand(1);
  {
    // Generator flags live on the nested subcommands; --out stays on the
    // parent, so let unmatched flags fall through to it.
    CLI::App* c = mesh_cmd->add_subcommand("interval", "uniform 1d interval");
    c->fallthrough();
    c->add_option("--a", mesh_args.interval.a, "left endpoint");
    c->add_option("--b", mesh_args.interval.b, "right endpoint");
    c->add_option("--cells", mesh_args.interval.cells, "number of cells");
    c = mesh_cmd->add_subcommand("disk", "structured fan disk");
    c->fallthrough();
    c->add_option("--radius", mesh_args.disk.radius, "disk radius");
    c->add_option("--rings", mesh_args.disk.rings, "number of rings (8 per ring on boundary)");
    c->add_option("--cx", mesh_args.disk.center[0], "center x");
    c->add_option("--cy", mesh_args.disk.center[1], "center y");
    c->add_option("--marker", mesh_args.disk.marker, "boundary marker");
    c = mesh_cmd->add_subcommand("two-disks", "two disjoint disks, markers 1 and 2");
    c->fallthrough();
    c->add_option("--radius1", mesh_args.two_disks.radius1, "first (marker 1) radius");
    c->add_option("--radius2", mesh_args.two_disks.radius2, "second (marker 2) radius");
    c->add_option("--separation", mesh_args.two_disks.separation, "center distance");
    c->add_option("--rings", mesh_args.two_disks.rings, "rings per disk");
    c = mesh_cmd->add_subcommand("rectangle", "structured rectangle");
    c->fallthrough();
    c->add_option("--width", mesh_args.rectangle.width, "width");
    c->add_option("--height", mesh_args.rectangle.height, "height");
    c->add_option("--nx", mesh_args.rectangle.nx, "cells along x");
    c->add_option("--ny", mesh_args.rectangle.ny, "cells along y");
  }
  mesh_cmd->add_option("--out", mesh_args.out, "output mesh path")->required();

  EnergyArgs energy_args;
  CLI::App* energy_cmd =
      app.add_subcommand("energy", "minimize heat loss for a fixed insulation budget");
  energy_cmd->add_option("--mesh", energy_args.mesh_path, "mesh file")->required();
  energy_cmd->add_option("--m", energy_args.m, "insulation budget (> 0)")
      ->check(CLI::PositiveNumber);
  energy_cmd->add_option("--f", energy_args.f_spec, "source: const:<value> or radial:<name>");
  energy_cmd->add_option("--tol", energy_args.tol, "energy stagnation tolerance")
      ->check(CLI::PositiveNumber);
  energy_cmd->add_option("--max-iter", energy_args.max_iter, "iteration cap")
      ->check(CLI::PositiveNumber);
  energy_cmd->add_flag("--alternating", energy_args.alternating,
                       "force the alternating solver over the direct path");
  energy_cmd->add_option("--stationarity-tol", energy_args.stationarity_tol,
                         "spread tolerance for the boundary shape density");
  energy_cmd->add_flag("--include-state", energy_args.include_state,
                       "embed the full nodal state in the JSON");
  energy_cmd->add_option("--out", energy_args.out, "JSON output path (stdout when absent)");
  energy_cmd->add_option("--csv", energy_args.csv, "density CSV output path");
  energy_cmd->add_option("--profile", energy_args.profile_csv, "boundary profile CSV path");

  EigenArgs eigen_args;
  CLI::App* eigen_cmd =
      app.add_subcommand("eigen", "minimize the heat-decay eigenvalue over densities");
  eigen_cmd->add_option("--mesh", eigen_args.mesh_path, "mesh file")->required();
  eigen_cmd->add_option("--m", eigen_args.m, "insulation budget (> 0)")
      ->check(CLI::PositiveNumber);
  eigen_cmd->add_option("--starts", eigen_args.starts,
                        "'default' or comma list: uniform, cap[:<center>:<fraction>], "
                        "random[:<seed>]");
  eigen_cmd->add_option("--seed", eigen_args.seed, "seed for default/random starts");
  eigen_cmd->add_option("--tol", eigen_args.tol, "eigenvalue stagnation tolerance")
      ->check(CLI::PositiveNumber);
  eigen_cmd->add_option("--max-iter", eigen_args.max_iter, "outer iteration cap")
      ->check(CLI::PositiveNumber);
  eigen_cmd->add_option("--stationarity-tol", eigen_args.stationarity_tol,
                        "spread tolerance for the boundary shape density");
  eigen_cmd->add_flag("--include-state", eigen_args.include_state,
                      "embed the full nodal state in the JSON");
  eigen_cmd->add_option("--out", eigen_args.out, "JSON output path (stdout when absent)");
  eigen_cmd->add_option("--csv", eigen_args.csv, "density CSV output path");
  eigen_cmd->add_option("--profile", eigen_args.profile_csv, "boundary profile CSV path");

  ThresholdArgs threshold_args;
  CLI::App* threshold_cmd =
      app.add_subcommand("threshold", "locate the symmetry-breaking budget on a disk");
  threshold_cmd->add_option("--radius", threshold_args.radius, "disk radius")
      ->check(CLI::PositiveNumber);
  threshold_cmd->add_option("--rings", threshold_args.rings, "mesh rings")
      ->check(CLI::PositiveNumber);
  threshold_cmd->add_option("--bracket", threshold_args.bracket,
                            "'auto' or '<lo>:<hi>' as multiples of the closed-form threshold");
  threshold_cmd->add_option("--width-rel", threshold_args.width_rel,
                            "bisection stop width, relative to the threshold");
  threshold_cmd->add_option("--max-probes", threshold_args.max_probes,
                            "budget of full optimization probes");
  threshold_cmd->add_option("--gap-factor", threshold_args.gap_factor,
                            "eigenvalue-gap multiplier for refined classification");
  threshold_cmd->add_option("--refine-rings", threshold_args.refine_rings,
                            "rings of the refinement mesh (0 = 1.5x base)");
  threshold_cmd->add_option("--seed", threshold_args.seed, "seed salt for probe starts");
  threshold_cmd->add_option("--max-iter", threshold_args.max_iter,
                            "outer iteration cap per probe");
  threshold_cmd->add_option("--out", threshold_args.out, "JSON output path (stdout when absent)");
  threshold_cmd->add_option("--csv", threshold_args.csv, "probe CSV output path");

  AnalyticArgs analytic_args;
  CLI::App* analytic_cmd = app.add_subcommand("analytic", "closed-form reference values");
  analytic_cmd->require_subcommand(1);
  {
    CLI::App* c = analytic_cmd->add_subcommand(
        "ball-energy", "optimal constant and energy for one ball, f = 1");
    c->fallthrough();
    c->add_option("--d", analytic_args.d, "dimension (>= 1)");
    c->add_option("--radius", analytic_args.radius, "ball radius");
    c->add_option("--m", analytic_args.m, "insulation budget");
    c = analytic_cmd->add_subcommand("two-ball", "optimal split between two balls, f = 1");
    c->fallthrough();
    c->add_option("--d", analytic_args.d, "dimension (>= 1)");
    c->add_option("--radius1", analytic_args.radius, "first radius");
    c->add_option("--radius2", analytic_args.radius2, "second radius");
    c->add_option("--m", analytic_args.m, "insulation budget");
    c = analytic_cmd->add_subcommand("interval-lambda",
                                     "eigenvalue on (-1,1): tan(omega) = 2/(m omega)");
    c->fallthrough();
    c->add_option("--m", analytic_args.m, "insulation budget");
    c = analytic_cmd->add_subcommand("disk-lambda", "radial-branch eigenvalue on a disk");
    c->fallthrough();
    c->add_option("--radius", analytic_args.radius, "disk radius");
    c->add_option("--m", analytic_args.m, "insulation budget");
    c = analytic_cmd->add_subcommand("m0", "symmetry-breaking threshold budget of a disk");
    c->fallthrough();
    c->add_option("--radius", analytic_args.radius, "disk radius");
    c = analytic_cmd->add_subcommand("nonexistence-bound",
                                     "eigenvalue bound for a ball split into n^d pieces");
    c->fallthrough();
    c->add_option("--d", analytic_args.d, "dimension (>= 3)");
    c->add_option("--m", analytic_args.m, "insulation budget");
    c->add_option("--n", analytic_args.n, "single subdivision count");
    c->add_option("--n-max", analytic_args.n_max, "emit the sequence n = 1..n_max");
  }
  analytic_cmd->add_option("--out", analytic_args.out, "JSON output path (stdout when absent)");

  ConvergeArgs converge_args;
  CLI::App* converge_cmd =
      app.add_subcommand("converge", "mesh refinement study against a closed form");
  converge_cmd
      ->add_option("--study", converge_args.study,
                   "interval-lambda | disk-energy | disk-lambda")
      ->required();
  converge_cmd->add_option("--levels", converge_args.levels, "refinement levels (>= 3)");
  converge_cmd->add_option("--m", converge_args.m, "insulation budget (0 = study default)");
  converge_cmd->add_option("--out", converge_args.out, "JSON output path (stdout when absent)");
  converge_cmd->add_option("--csv", converge_args.csv, "table CSV output path");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("insulopt");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the offending flag and usage hint to stderr
    return 2;
  }

  try {
    if (app.got_subcommand("mesh")) return run_mesh(*mesh_cmd, mesh_args);
    if (app.got_subcommand("energy")) return run_energy(energy_args);
    if (app.got_subcommand("eigen")) return run_eigen(eigen_args);
    if (app.got_subcommand("threshold")) return run_threshold(threshold_args);
    if (app.got_subcommand("analytic")) return run_analytic(*analytic_cmd, analytic_args);
    return run_converge(converge_args);
  } catch (const InvalidSpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const MeshParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const MeshValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace insulopt::cli
