#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "insulopt/assembly.hpp"
#include "insulopt/eigen.hpp"
#include "insulopt/energy.hpp"
#include "insulopt/types.hpp"

namespace insulopt {

enum class SymmetryClass { Radial, Nonradial, Indeterminate };

const char* to_string(SymmetryClass c);

struct SymmetryOptions {
  double radial_cv = 0.02;     // cv below this -> radial
  double nonradial_cv = 0.1;   // cv above this -> nonradial; between -> indeterminate
  double zero_rel = 1e-8;      // density floor (x mass/perimeter) for zero_fraction
};

/// Rotation-invariant diagnostics of a boundary density on a disk.
struct SymmetryReport {
  double cv = 0.0;             // weight-adjusted coefficient of variation
  double fourier_ratio = 0.0;  // |first angular mode| / zeroth mode
  double zero_fraction = 0.0;  // boundary measure fraction with vanishing density
  SymmetryClass classification = SymmetryClass::Indeterminate;
};

/// Diagnostics for a density (or a solution's optimal density) on a mesh whose
/// boundary is a single circle; throws PreconditionError otherwise.
SymmetryReport symmetry_report(const DensityField& h, const AssembledOperators& ops,
                               const SymmetryOptions& options = {});
SymmetryReport symmetry_report(const EigenSolution& solution, const AssembledOperators& ops,
                               const SymmetryOptions& options = {});
SymmetryReport symmetry_report(const EnergySolution& solution, const AssembledOperators& ops,
                               const SymmetryOptions& options = {});

// Threshold estimation ------------------------------------------------------

struct ThresholdOptions {
  double bracket_lo_rel = 0.3;  // x closed-form threshold
  double bracket_hi_rel = 3.0;
  double width_rel = 0.05;      // bisection stop, x closed-form threshold
  int max_probes = 12;          // total optimization runs (endpoints + bisection + refines)
  int refine_rings = 0;         // rings of the one-shot refined mesh; 0 -> 1.5x the base
  double gap_factor = 10.0;     // lambda-gap > gap_factor * tolerance -> nonradial
  EigenOptions eigen_options{.max_outer = 1000};  // probe budget above the solver default
  SymmetryOptions symmetry;
  std::uint64_t seed_salt = 0;  // mixed into the per-probe random-start seed
};

struct MeshSummary {
  int nodes = 0;
  int elements = 0;
  int boundary_nodes = 0;
};

struct ThresholdProbe {
  double m = 0.0;
  double lambda_best = 0.0;
  double lambda_radial_oracle = 0.0;
  double cv = 0.0;
  SymmetryClass classification = SymmetryClass::Indeterminate;
  bool refined = false;  // probe re-run on the refined mesh (gap-based class)
};

struct ThresholdResult {
  double m0_oracle = 0.0;
  double m0_fem = 0.0;           // final bracket midpoint
  double bracket_lo = 0.0;       // nonradial side at return
  double bracket_hi = 0.0;       // radial side at return
  double lambda_neumann = 0.0;   // first nontrivial Neumann eigenvalue, this mesh
  double m0_crossing = 0.0;      // where lambda_best crosses lambda_neumann (NaN if unseen)
  double mesh_tolerance = 0.0;   // |lambda_fem - oracle| calibrated at 2x threshold
  std::vector<ThresholdProbe> probes;  // in execution order
  MeshSummary mesh;
  MeshSummary refined_mesh;      // zeros when no probe needed refinement
};

/// Bisection on the symmetry classification of solve_eigen optima over the
/// insulation budget, on a disk mesh. Indeterminate probes are re-run once on
/// a finer mesh and classified by the eigenvalue gap against the radial
/// branch. Also interpolates where the optimal eigenvalue crosses the
/// discrete Neumann eigenvalue as an independent estimate.
ThresholdResult estimate_m0_fem(const Mesh& mesh, const ThresholdOptions& options = {});

struct CurvePoint {
  double m = 0.0;
  double lambda_best = 0.0;
  double lambda_radial_oracle = 0.0;
  double cv = 0.0;
  SymmetryClass classification = SymmetryClass::Indeterminate;
};

/// Optimal eigenvalue along a strictly increasing budget grid on a disk mesh;
/// solver failures are annotated with the offending budget.
std::vector<CurvePoint> lambda_curve(const Mesh& mesh, const std::vector<double>& m_grid,
                                     const EigenOptions& options = {});

}  // namespace insulopt
