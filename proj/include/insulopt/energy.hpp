#pragma once

#include <map>
#include <optional>
#include <vector>

#include "insulopt/assembly.hpp"
#include "insulopt/types.hpp"

namespace insulopt {

struct EnergyOptions {
  double energy_rel_tol = 1e-10;  // stop when satisfied on two consecutive iterations
  int max_iterations = 500;
  double cg_rel_tol = 1e-10;
  int max_cg = 200000;
  double pin_rel = 1e-8;     // Dirichlet pinning threshold, x mass/perimeter
  double floor_rel = 1e-12;  // density floor inside 1/h weights, x mass/perimeter
  double negativity_rel = 1e-8;  // tolerated undershoot in the direct solve
  bool force_alternating = false;
  std::optional<Eigen::VectorXd> initial_density;  // per boundary node; default uniform
};

struct EnergyProblem {
  const AssembledOperators* ops = nullptr;
  double mass = 1.0;
  ScalarField source;  // nonnegative nodal source
  EnergyOptions options;
};

struct TraceStats {
  double min = 0.0, max = 0.0, mean = 0.0, cv = 0.0;
};

struct EnergySolution {
  ScalarField u;
  double energy = 0.0;
  DensityField h_opt;
  bool h_defined = false;  // false when the source vanishes identically
  std::map<int, bool> degenerate_component;  // marker -> boundary trace vanished
  int iterations = 0;
  double el_residual = 0.0;
  bool fast_path = false;
  double mass = 0.0;
  Eigen::VectorXd rhs;  // mass-matrix image of the source, kept for flux recovery
  std::vector<double> energy_trace;
  int descent_violations = 0;
  TraceStats trace_stats;
};

/// Minimizes  0.5 u'Ku + (1/(2m)) (sum w|u|)^2 - u'Mf  and recovers the
/// optimal insulator density m|u| / integral(|u|) on the boundary. Connected
/// meshes use one symmetric positive definite solve with the boundary-weight
/// rank-one term applied matrix-free; the alternating density/state descent
/// handles everything else (and any direct solve whose state dips negative).
EnergySolution solve_energy(const EnergyProblem& problem);

/// Density m |u| / integral(|u|) on the boundary; throws UndefinedDensityError
/// when the trace of u vanishes.
DensityField optimal_density(const ScalarField& u, double mass, const AssembledOperators& ops);

/// Max deviation of the discrete normal derivative (boundary residual of
/// Ku - Mf divided by the boundary weights) from its predicted constant
/// -integral(f)/|boundary|, over domain components with strictly positive
/// trace; +infinity when no component qualifies.
double el_residual(const EnergySolution& solution, const EnergyProblem& problem);

/// [u'Ku + (1/m)(sum w|u|)^2] / (u'Mf)^2; throws on a vanishing denominator.
double energy_quotient(const Eigen::VectorXd& u, const Eigen::VectorXd& f_nodal, double mass,
                       const AssembledOperators& ops);

/// The functional value 0.5 u'Ku + (1/(2m)) (sum w|u|)^2 - u'rhs.
double energy_value(const Eigen::VectorXd& u, const Eigen::VectorXd& rhs, double mass,
                    const AssembledOperators& ops);

}  // namespace insulopt
