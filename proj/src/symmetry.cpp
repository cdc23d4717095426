#include "insulopt/symmetry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "insulopt/oracles.hpp"

namespace insulopt {

namespace {

/// splitmix64 step: turns a budget value into a reproducible random-start seed.
std::uint64_t mix_seed(double m, std::uint64_t salt) {
  std::uint64_t z = std::bit_cast<std::uint64_t>(m) + salt + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

SymmetryClass classify_cv(double cv, const SymmetryOptions& options) {
  if (cv < options.radial_cv) return SymmetryClass::Radial;
  if (cv > options.nonradial_cv) return SymmetryClass::Nonradial;
  return SymmetryClass::Indeterminate;
}

MeshSummary summarize(const Mesh& mesh) {
  MeshSummary s;
  s.nodes = mesh.node_count();
  s.elements = mesh.element_count();
  s.boundary_nodes = static_cast<int>(mesh.boundary.size());
  return s;
}

}  // namespace

const char* to_string(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::Radial:
      return "radial";
    case SymmetryClass::Nonradial:
      return "nonradial";
    case SymmetryClass::Indeterminate:
      return "indeterminate";
  }
  return "unknown";
}

SymmetryReport symmetry_report(const DensityField& h, const AssembledOperators& ops,
                               const SymmetryOptions& options) {
  if (!disk_radius(*ops.mesh))
    throw PreconditionError("symmetry diagnostics need a single circular boundary");
  if (!(h.total_mass > 0.0)) throw PreconditionError("density carries no mass");
  SymmetryReport report;
  report.cv = density_cv(ops, h.values);
  report.fourier_ratio = density_fourier1_ratio(ops, h.values);
  report.zero_fraction =
      density_zero_fraction(ops, h.values, options.zero_rel * h.total_mass / ops.perimeter);
  report.classification = classify_cv(report.cv, options);
  return report;
}

SymmetryReport symmetry_report(const EigenSolution& solution, const AssembledOperators& ops,
                               const SymmetryOptions& options) {
  return symmetry_report(solution.h_opt, ops, options);
}

SymmetryReport symmetry_report(const EnergySolution& solution, const AssembledOperators& ops,
                               const SymmetryOptions& options) {
  if (!solution.h_defined)
    throw PreconditionError("solution has no recoverable density (vanishing trace)");
  return symmetry_report(solution.h_opt, ops, options);
}

namespace {

/// One full multi-start optimization at budget m, classified by cv.
ThresholdProbe run_probe(const AssembledOperators& ops, double radius, double m,
                         const ThresholdOptions& options) {
  EigenProblem problem;
  problem.ops = &ops;
  problem.mass = m;
  problem.starts = default_starts(*ops.mesh, mix_seed(m, options.seed_salt));
  problem.options = options.eigen_options;
  const EigenSolution solution = solve_eigen(problem);
  const SymmetryReport report = symmetry_report(solution, ops, options.symmetry);
  ThresholdProbe probe;
  probe.m = m;
  probe.lambda_best = solution.lambda;
  probe.lambda_radial_oracle = disk_radial_lambda(radius, m);
  probe.cv = report.cv;
  probe.classification = report.classification;
  return probe;
}

}  // namespace

ThresholdResult estimate_m0_fem(const Mesh& mesh, const ThresholdOptions& options) {
  const auto radius = disk_radius(mesh);
  if (!radius) throw PreconditionError("threshold estimation needs a single circular boundary");
  if (!(options.bracket_lo_rel > 0.0) || !(options.bracket_hi_rel > options.bracket_lo_rel))
    throw InvalidSpecError("threshold bracket must satisfy 0 < lo < hi");

  ThresholdResult result;
  result.m0_oracle = threshold_m0(*radius);
  result.mesh = summarize(mesh);
  result.m0_crossing = std::numeric_limits<double>::quiet_NaN();

  const AssembledOperators ops = assemble(mesh);
  result.lambda_neumann = neumann_lambda1(ops, options.eigen_options);

  // Calibrate the mesh tolerance in the radial regime (twice the threshold).
  {
    const double m_cal = 2.0 * result.m0_oracle;
    const ThresholdProbe cal = run_probe(ops, *radius, m_cal, options);
    result.mesh_tolerance =
        std::max(std::abs(cal.lambda_best - cal.lambda_radial_oracle), 1e-12);
  }

  // Lazily built refined mesh for indeterminate probes.
  Mesh refined_mesh;
  AssembledOperators refined_ops;
  double refined_tolerance = 0.0;
  int probes_used = 0;
  const auto classify = [&](double m) -> SymmetryClass {
    if (++probes_used > options.max_probes)
      throw SolverError("threshold bisection exceeded its probe budget of " +
                        std::to_string(options.max_probes) + " runs");
    ThresholdProbe probe = run_probe(ops, *radius, m, options);
    result.probes.push_back(probe);
    if (probe.classification != SymmetryClass::Indeterminate) return probe.classification;

    // Gray zone: re-run once on a finer mesh and decide by the eigenvalue gap
    // against the radial branch.
    if (refined_mesh.node_count() == 0) {
      const int base_rings = std::max(result.mesh.boundary_nodes / 8, 2);
      DiskSpec spec;
      spec.radius = *radius;
      spec.rings = options.refine_rings > 0 ? options.refine_rings : (3 * base_rings + 1) / 2;
      const auto loops = boundary_loops(mesh);
      spec.center = loops.front().centroid;
      refined_mesh = generate_mesh(spec);
      refined_ops = assemble(refined_mesh);
      result.refined_mesh = summarize(refined_mesh);
      if (++probes_used > options.max_probes)
        throw SolverError("threshold bisection exceeded its probe budget of " +
                          std::to_string(options.max_probes) + " runs");
      const ThresholdProbe cal =
          run_probe(refined_ops, *radius, 2.0 * result.m0_oracle, options);
      refined_tolerance =
          std::max(std::abs(cal.lambda_best - cal.lambda_radial_oracle), 1e-12);
    }
    if (++probes_used > options.max_probes)
      throw SolverError("threshold bisection exceeded its probe budget of " +
                        std::to_string(options.max_probes) + " runs");
    ThresholdProbe fine = run_probe(refined_ops, *radius, m, options);
    fine.refined = true;
    const double gap = fine.lambda_radial_oracle - fine.lambda_best;
    fine.classification = gap > options.gap_factor * refined_tolerance
                              ? SymmetryClass::Nonradial
                              : SymmetryClass::Radial;
    result.probes.push_back(fine);
    return fine.classification;
  };

  double lo = options.bracket_lo_rel * result.m0_oracle;
  double hi = options.bracket_hi_rel * result.m0_oracle;
  if (classify(lo) != SymmetryClass::Nonradial)
    throw PreconditionError(
        "lower bracket endpoint did not classify as nonradial; widen the bracket downward");
  if (classify(hi) != SymmetryClass::Radial)
    throw PreconditionError(
        "upper bracket endpoint did not classify as radial; widen the bracket upward");

  while (hi - lo >= options.width_rel * result.m0_oracle) {
    const double mid = 0.5 * (lo + hi);
    if (classify(mid) == SymmetryClass::Nonradial)
      lo = mid;
    else
      hi = mid;
  }
  result.bracket_lo = lo;
  result.bracket_hi = hi;
  result.m0_fem = 0.5 * (lo + hi);

  // Independent estimate: where the optimal eigenvalue crosses the discrete
  // Neumann eigenvalue, interpolated over same-mesh probes sorted by budget.
  std::vector<const ThresholdProbe*> base_probes;
  for (const ThresholdProbe& p : result.probes)
    if (!p.refined) base_probes.push_back(&p);
  std::sort(base_probes.begin(), base_probes.end(),
            [](const ThresholdProbe* a, const ThresholdProbe* b) { return a->m < b->m; });
  for (std::size_t i = 0; i + 1 < base_probes.size(); ++i) {
    const double fa = base_probes[i]->lambda_best - result.lambda_neumann;
    const double fb = base_probes[i + 1]->lambda_best - result.lambda_neumann;
    if (fa == 0.0) {
      result.m0_crossing = base_probes[i]->m;
      break;
    }
    if (fa * fb < 0.0) {
      const double t = fa / (fa - fb);
      result.m0_crossing = base_probes[i]->m + t * (base_probes[i + 1]->m - base_probes[i]->m);
      break;
    }
  }
  return result;
}

std::vector<CurvePoint> lambda_curve(const Mesh& mesh, const std::vector<double>& m_grid,
                                     const EigenOptions& options) {
  const auto radius = disk_radius(mesh);
  if (!radius) throw PreconditionError("eigenvalue curve needs a single circular boundary");
  if (m_grid.empty()) throw InvalidSpecError("budget grid is empty");
  for (std::size_t i = 0; i < m_grid.size(); ++i) {
    if (!(m_grid[i] > 0.0)) throw InvalidSpecError("budget grid must be positive");
    if (i > 0 && !(m_grid[i] > m_grid[i - 1]))
      throw InvalidSpecError("budget grid must be strictly increasing");
  }
  const AssembledOperators ops = assemble(mesh);
  std::vector<CurvePoint> curve;
  curve.reserve(m_grid.size());
  for (const double m : m_grid) {
    EigenProblem problem;
    problem.ops = &ops;
    problem.mass = m;
    problem.starts = default_starts(mesh, mix_seed(m, 0));
    problem.options = options;
    try {
      const EigenSolution solution = solve_eigen(problem);
      const SymmetryReport report = symmetry_report(solution, ops);
      CurvePoint point;
      point.m = m;
      point.lambda_best = solution.lambda;
      point.lambda_radial_oracle = disk_radial_lambda(*radius, m);
      point.cv = report.cv;
      point.classification = report.classification;
      curve.push_back(point);
    } catch (const SolverError& e) {
      throw SolverError("eigenvalue curve probe at budget " + std::to_string(m) +
                            " failed: " + e.what(),
                        e.history());
    }
  }
  return curve;
}

}  // namespace insulopt
