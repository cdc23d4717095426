#pragma once

#include <cstddef>
#include <vector>

#include "insulopt/assembly.hpp"
#include "insulopt/eigen.hpp"
#include "insulopt/energy.hpp"

namespace insulopt {

/// Boundary restriction of a converged solution together with the
/// shape-derivative density
///
///   j = |du/dtau|^2 - |du/dnu|^2 - c(u) + (2/m) (integral of the trace) H u
///
/// where c(u) is lambda u^2 for eigenvalue solutions and u for source-driven
/// energy solutions. Nodes follow boundary loop order (counterclockwise in
/// 2d, ascending endpoints in 1d), concatenated across loops.
struct BoundaryProfile {
  std::vector<int> node_ids;
  std::vector<int> loop_marker;    // marker of the loop each node belongs to
  std::vector<double> angle;       // about the loop centroid (0 in 1d)
  std::vector<double> arclength;   // cumulative along the loop (0 in 1d)
  std::vector<double> weight;      // boundary quadrature weight
  std::vector<double> u;           // trace of the state
  std::vector<double> du_nu;       // variational (residual-based) normal derivative
  std::vector<double> du_tau;      // central-difference tangential derivative
  std::vector<double> curvature;   // 1/R on circular loops, 0 otherwise
  std::vector<double> j;           // shape-derivative density
  std::size_t size() const { return node_ids.size(); }
};

struct StationarityReport {
  bool is_stationary = false;
  double spread = 0.0;  // max |j - weighted mean of j|
  double mean_j = 0.0;
};

/// Profile of an eigenvalue solution: the normal derivative comes from the
/// boundary residual (K u - lambda M u) / w and j uses lambda u^2.
BoundaryProfile boundary_profile(const EigenSolution& solution, const AssembledOperators& ops);

/// Profile of an energy solution: the normal derivative comes from the
/// boundary residual (K u - rhs) / w and j uses the linear term u.
BoundaryProfile boundary_profile(const EnergySolution& solution, const AssembledOperators& ops);

/// A boundary is stationary for volume-preserving perturbations when j is
/// constant: reports whether the max deviation from the weighted mean stays
/// below tol, along with the deviation itself.
StationarityReport stationarity_check(const BoundaryProfile& profile, double tol);

/// First-variation surface integral  sum_i w_i j_i v_i  for a nodal normal
/// velocity v (positive = outward).
double first_variation(const BoundaryProfile& profile, const std::vector<double>& normal_velocity);

/// Modulus of the first variation against the volume-preserving angular mode
/// e^{i k theta}, k >= 1: |sum_i w_i j_i e^{i k angle_i}|.
double first_variation_mode(const BoundaryProfile& profile, int k);

}  // namespace insulopt
