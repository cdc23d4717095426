#include "insulopt/shape.hpp"

#include <cmath>
#include <complex>

#include "insulopt/mesh.hpp"

namespace insulopt {

namespace {

/// Geometry, trace, and flux shared by both profile flavors. The caller
/// supplies the full-length residual of the stationarity system; dividing its
/// boundary entries by the quadrature weights recovers the natural flux.
BoundaryProfile build_profile(const AssembledOperators& ops, const Eigen::VectorXd& u_full,
                              const Eigen::VectorXd& residual_full) {
  const Mesh& mesh = *ops.mesh;
  BoundaryProfile profile;
  const std::size_t count = static_cast<std::size_t>(ops.boundary_count());
  profile.node_ids.reserve(count);
  profile.loop_marker.reserve(count);
  profile.angle.reserve(count);
  profile.arclength.reserve(count);
  profile.weight.reserve(count);
  profile.u.reserve(count);
  profile.du_nu.reserve(count);
  profile.du_tau.reserve(count);
  profile.curvature.reserve(count);

  for (const BoundaryLoop& loop : boundary_loops(mesh)) {
    const auto radius = loop_radius(mesh, loop);
    const double kappa = radius ? 1.0 / *radius : 0.0;
    const std::size_t n = loop.node_ids.size();
    for (std::size_t i = 0; i < n; ++i) {
      const int node = loop.node_ids[i];
      const double w = ops.boundary_weight_full[node];
      profile.node_ids.push_back(node);
      profile.loop_marker.push_back(loop.marker);
      profile.angle.push_back(loop.angle.empty() ? 0.0 : loop.angle[i]);
      profile.arclength.push_back(loop.arclength.empty() ? 0.0 : loop.arclength[i]);
      profile.weight.push_back(w);
      profile.u.push_back(u_full[node]);
      profile.du_nu.push_back(residual_full[node] / w);
      profile.curvature.push_back(kappa);
      if (n < 3 || loop.length <= 0.0) {
        profile.du_tau.push_back(0.0);
        continue;
      }
      const std::size_t prev = (i + n - 1) % n;
      const std::size_t next = (i + 1) % n;
      double ds = loop.arclength[next] - loop.arclength[prev];
      if (ds <= 0.0) ds += loop.length;  // the stencil wraps around the seam
      profile.du_tau.push_back((u_full[loop.node_ids[next]] - u_full[loop.node_ids[prev]]) / ds);
    }
  }
  return profile;
}

void fill_density(BoundaryProfile& profile, double mass, double trace_integral, bool quadratic,
                  double lambda) {
  const double correction = 2.0 * trace_integral / mass;
  profile.j.resize(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double u = profile.u[i];
    const double state_term = quadratic ? lambda * u * u : u;
    profile.j[i] = profile.du_tau[i] * profile.du_tau[i] - profile.du_nu[i] * profile.du_nu[i] -
                   state_term + correction * profile.curvature[i] * u;
  }
}

}  // namespace

BoundaryProfile boundary_profile(const EigenSolution& solution, const AssembledOperators& ops) {
  if (!ops.mesh || !ops.mesh->finalized()) throw PreconditionError("operators lack a mesh");
  if (solution.u.values.size() != ops.node_count())
    throw PreconditionError("solution does not match the operators");
  if (!std::isfinite(solution.lambda))
    throw PreconditionError("eigen solution did not converge; no boundary profile");
  const Eigen::VectorXd residual =
      ops.stiffness * solution.u.values - solution.lambda * (ops.mass * solution.u.values);
  BoundaryProfile profile = build_profile(ops, solution.u.values, residual);
  const double trace_integral = ops.boundary_weights.dot(ops.trace(solution.u.values));
  fill_density(profile, solution.mass, trace_integral, true, solution.lambda);
  return profile;
}

BoundaryProfile boundary_profile(const EnergySolution& solution, const AssembledOperators& ops) {
  if (!ops.mesh || !ops.mesh->finalized()) throw PreconditionError("operators lack a mesh");
  if (solution.u.values.size() != ops.node_count())
    throw PreconditionError("solution does not match the operators");
  if (solution.rhs.size() != ops.node_count())
    throw PreconditionError("energy solution carries no load vector; no boundary profile");
  if (!(solution.mass > 0.0)) throw PreconditionError("energy solution has no mass budget");
  const Eigen::VectorXd residual = ops.stiffness * solution.u.values - solution.rhs;
  BoundaryProfile profile = build_profile(ops, solution.u.values, residual);
  const double trace_integral = ops.boundary_weights.dot(ops.trace(solution.u.values));
  fill_density(profile, solution.mass, trace_integral, false, 0.0);
  return profile;
}

StationarityReport stationarity_check(const BoundaryProfile& profile, double tol) {
  if (profile.size() == 0) throw PreconditionError("empty boundary profile");
  if (!(tol >= 0.0)) throw InvalidSpecError("stationarity tolerance must be nonnegative");
  double total = 0.0;
  double mean = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    total += profile.weight[i];
    mean += profile.weight[i] * profile.j[i];
  }
  mean /= total;
  double spread = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i)
    spread = std::max(spread, std::abs(profile.j[i] - mean));
  StationarityReport report;
  report.mean_j = mean;
  report.spread = spread;
  report.is_stationary = spread < tol;
  return report;
}

double first_variation(const BoundaryProfile& profile,
                       const std::vector<double>& normal_velocity) {
  if (normal_velocity.size() != profile.size())
    throw PreconditionError("normal velocity does not match the profile");
  double sum = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i)
    sum += profile.weight[i] * profile.j[i] * normal_velocity[i];
  return sum;
}

double first_variation_mode(const BoundaryProfile& profile, int k) {
  if (k < 1) throw InvalidSpecError("angular mode must be >= 1");
  std::complex<double> sum = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i)
    sum += profile.weight[i] * profile.j[i] *
           std::exp(std::complex<double>(0.0, k * profile.angle[i]));
  return std::abs(sum);
}

}  // namespace insulopt
