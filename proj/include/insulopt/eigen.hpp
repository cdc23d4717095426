#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "insulopt/assembly.hpp"
#include "insulopt/types.hpp"

namespace insulopt {

struct EigenOptions {
  double lambda_rel_tol = 1e-9;   // outer alternation stop on the eigenvalue
  double inner_rel_tol = 1e-11;   // inverse-iteration stop on the Rayleigh quotient
  double cg_rel_tol = 1e-10;
  int max_outer = 300;
  int max_inner = 400;
  int max_cg = 200000;
  double pin_rel = 1e-8;          // Dirichlet pinning threshold, x mass/perimeter
  double floor_rel = 1e-12;       // density floor inside 1/h weights
  int max_set_changes = 50;       // pin-set churn budget (active-set style)
  double unpin_rel = 0.05;        // flux-inequality violation that reopens a node
  double kkt_support_rel = 1e-3;  // density (x mass/perimeter) above which a node
                                  // counts as supported in stationarity diagnostics
};

/// Initial density for one optimization run.
struct StartSpec {
  enum class Kind { Uniform, Cap, Random, Custom };
  Kind kind = Kind::Uniform;
  double cap_center = 0.0;    // radians; disk meshes only
  double cap_fraction = 0.5;  // fraction of the full circle covered by the cap
  std::uint64_t seed = 0;
  Eigen::VectorXd custom_density;  // Kind::Custom, one value per boundary node

  std::string name() const;
};

/// Uniform, half-circle cap, quarter-circle cap and one seeded random start
/// for disks; uniform plus seeded random elsewhere.
std::vector<StartSpec> default_starts(const Mesh& mesh, std::uint64_t seed);

struct EigenProblem {
  const AssembledOperators* ops = nullptr;
  double mass = 1.0;
  std::vector<StartSpec> starts;  // empty -> default_starts(mesh, 0)
  EigenOptions options;
};

struct StartResult {
  std::string name;
  double lambda = 0.0;
  double cv = 0.0;                // weighted coefficient of variation of the density
  double fourier1_ratio = 0.0;    // |first angular mode| / mass (NaN off disks)
  double zero_set_fraction = 0.0; // boundary measure fraction with vanishing density
  int iterations = 0;
};

struct EigenSolution {
  double lambda = 0.0;
  ScalarField u;  // nonnegative, unit mass-matrix norm
  DensityField h_opt;
  std::vector<StartResult> per_start;
  int best_start = 0;
  double zero_set_fraction = 0.0;
  double mass = 0.0;
  // Optimality diagnostics on the converged pair (see stationarity tests):
  // flux identity on the supported trace and flux inequality on pinned nodes.
  double kkt_equality_dev = 0.0;
  double kkt_inequality_slack = 0.0;
  int descent_violations = 0;
  std::vector<double> lambda_trace;  // best start's eigenvalue history
};

/// Smallest eigenvalue of the pure Neumann problem after deflating locally
/// constant functions. `align_hint` biases the returned eigenvector inside a
/// degenerate eigenspace; `eigenvector` receives the mass-normalized result.
double neumann_lambda1(const AssembledOperators& ops, const EigenOptions& options = {},
                       const Eigen::VectorXd* align_hint = nullptr,
                       Eigen::VectorXd* eigenvector = nullptr);

/// Smallest Dirichlet eigenvalue (all boundary nodes pinned).
double dirichlet_lambda1(const AssembledOperators& ops, const EigenOptions& options = {},
                         Eigen::VectorXd* eigenvector = nullptr);

/// Smallest eigenpair of (K + diag(w/h)) u = lambda M u with the masked nodes
/// held at zero. The eigenvector is sign-normalized to nonnegative mean and
/// unit mass-matrix norm. Density values below the floor are clipped.
std::pair<double, ScalarField> solve_robin_eigen(const AssembledOperators& ops,
                                                 const DensityField& h,
                                                 const std::vector<std::uint8_t>& dirichlet_mask,
                                                 const EigenOptions& options = {});

/// Multi-start alternating minimization of the insulated eigenvalue quotient;
/// returns the best start (ties broken by start order).
EigenSolution solve_eigen(const EigenProblem& problem);

/// [u'Ku + (1/m)(sum w|u|)^2] / u'Mu; throws on u = 0.
double rayleigh_quotient(const Eigen::VectorXd& u, double mass, const AssembledOperators& ops);

struct AntisymmetrySides {
  double lhs = 0.0;  // (lambda_m - lambda_N) * integral(u v)
  double rhs = 0.0;  // -boundary integral of (normal derivative of u) * v
};

/// Both sides of the identity relating the optimal pair to a Neumann
/// eigenfunction v; `neumann_comparison` returns their absolute discrepancy.
AntisymmetrySides antisymmetry_sides(const EigenSolution& solution,
                                     const AssembledOperators& ops, const Eigen::VectorXd& v);
double neumann_comparison(const EigenSolution& solution, const AssembledOperators& ops,
                          const Eigen::VectorXd& v);

}  // namespace insulopt
