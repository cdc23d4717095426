#include "insulopt/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "insulopt/linsolve.hpp"

namespace insulopt {

namespace {

TraceStats trace_statistics(const AssembledOperators& ops, const Eigen::VectorXd& u) {
  TraceStats stats;
  stats.min = std::numeric_limits<double>::infinity();
  stats.max = -std::numeric_limits<double>::infinity();
  double weighted_sum = 0.0;
  for (int p = 0; p < ops.boundary_count(); ++p) {
    const double value = u[ops.boundary_node_ids[p]];
    stats.min = std::min(stats.min, value);
    stats.max = std::max(stats.max, value);
    weighted_sum += ops.boundary_weights[p] * value;
  }
  stats.mean = weighted_sum / ops.perimeter;
  double variance = 0.0;
  for (int p = 0; p < ops.boundary_count(); ++p) {
    const double d = u[ops.boundary_node_ids[p]] - stats.mean;
    variance += ops.boundary_weights[p] * d * d;
  }
  variance /= ops.perimeter;
  stats.cv = (stats.mean != 0.0) ? std::sqrt(variance) / std::abs(stats.mean)
                                 : std::numeric_limits<double>::infinity();
  return stats;
}

// Joint objective 0.5 u'Ku + 0.5 sum_i w_i u_i^2 / h_i - u'rhs with the
// 0^2/0 = 0 convention on pinned nodes; decreases at every half step of the
// alternating scheme, which is what the descent counter watches.
double joint_energy(const AssembledOperators& ops, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& rhs, const Eigen::VectorXd& h, double floor_abs,
                    const std::vector<std::uint8_t>& pinned) {
  double value = 0.5 * u.dot(ops.stiffness * u) - u.dot(rhs);
  for (int p = 0; p < ops.boundary_count(); ++p) {
    const int v = ops.boundary_node_ids[p];
    if (!pinned.empty() && pinned[v]) continue;  // u is zero there
    const double hp = std::max(h[p], floor_abs);
    value += 0.5 * ops.boundary_weights[p] * u[v] * u[v] / hp;
  }
  return value;
}

}  // namespace

double energy_value(const Eigen::VectorXd& u, const Eigen::VectorXd& rhs, double mass,
                    const AssembledOperators& ops) {
  const double trace_abs = boundary_integral_abs(ops, u);
  return 0.5 * u.dot(ops.stiffness * u) + trace_abs * trace_abs / (2.0 * mass) - u.dot(rhs);
}

double energy_quotient(const Eigen::VectorXd& u, const Eigen::VectorXd& f_nodal, double mass,
                       const AssembledOperators& ops) {
  if (mass <= 0.0) throw PreconditionError("mass must be positive");
  const double source_pairing = u.dot(ops.mass * f_nodal);
  if (source_pairing == 0.0)
    throw PreconditionError("quotient undefined: source pairing integral vanishes");
  const double trace_abs = boundary_integral_abs(ops, u);
  const double numerator = u.dot(ops.stiffness * u) + trace_abs * trace_abs / mass;
  return numerator / (source_pairing * source_pairing);
}

DensityField optimal_density(const ScalarField& u, double mass, const AssembledOperators& ops) {
  if (u.mesh != ops.mesh) throw PreconditionError("field and operators use different meshes");
  if (mass <= 0.0) throw PreconditionError("mass must be positive");
  const double trace_abs = boundary_integral_abs(ops, u.values);
  if (!(trace_abs > 0.0))
    throw UndefinedDensityError("optimal density undefined: boundary trace vanishes");
  DensityField h;
  h.total_mass = mass;
  h.values.resize(ops.boundary_count());
  for (int p = 0; p < ops.boundary_count(); ++p)
    h.values[p] = mass * std::abs(u.values[ops.boundary_node_ids[p]]) / trace_abs;
  return h;
}

double el_residual(const EnergySolution& solution, const EnergyProblem& problem) {
  const AssembledOperators& ops = *problem.ops;
  const Mesh& mesh = *ops.mesh;
  const Eigen::VectorXd& u = solution.u.values;
  const Eigen::VectorXd residual = ops.stiffness * u - solution.rhs;

  // Trace positivity per domain component.
  const double trace_scale = std::max(u.cwiseAbs().maxCoeff(), 1e-300);
  std::vector<double> min_trace(mesh.domain_component_count,
                                std::numeric_limits<double>::infinity());
  std::vector<double> perimeter(mesh.domain_component_count, 0.0);
  for (int p = 0; p < ops.boundary_count(); ++p) {
    const int v = ops.boundary_node_ids[p];
    const int c = mesh.node_component[v];
    min_trace[c] = std::min(min_trace[c], u[v]);
    perimeter[c] += ops.boundary_weights[p];
  }
  std::vector<double> source_integral(mesh.domain_component_count, 0.0);
  for (int v = 0; v < mesh.node_count(); ++v)
    source_integral[mesh.node_component[v]] += solution.rhs[v];

  double worst = -1.0;
  for (int p = 0; p < ops.boundary_count(); ++p) {
    const int v = ops.boundary_node_ids[p];
    const int c = mesh.node_component[v];
    if (!(min_trace[c] > 1e-8 * trace_scale)) continue;
    const double normal_derivative = residual[v] / ops.boundary_weights[p];
    const double target = -source_integral[c] / perimeter[c];
    worst = std::max(worst, std::abs(normal_derivative - target));
  }
  if (worst < 0.0) return std::numeric_limits<double>::infinity();
  return worst;
}

EnergySolution solve_energy(const EnergyProblem& problem) {
  const AssembledOperators& ops = *problem.ops;
  const Mesh& mesh = *ops.mesh;
  const EnergyOptions& opt = problem.options;
  const double mass = problem.mass;
  if (mass <= 0.0) throw PreconditionError("mass must be positive");
  if (problem.source.mesh != ops.mesh)
    throw PreconditionError("source field and operators use different meshes");
  const Eigen::VectorXd& f = problem.source.values;
  if (f.size() != ops.node_count()) throw PreconditionError("source length mismatch");
  if (f.minCoeff() < 0.0) throw PreconditionError("source must be nonnegative");
  if (opt.initial_density) {
    if (opt.initial_density->size() != ops.boundary_count())
      throw PreconditionError("initial density length mismatch");
    if (opt.initial_density->minCoeff() < 0.0)
      throw PreconditionError("initial density must be nonnegative");
    if (!(ops.boundary_weights.dot(*opt.initial_density) > 0.0))
      throw PreconditionError("initial density carries no mass");
  }

  EnergySolution sol;
  sol.mass = mass;
  sol.rhs = ops.mass * f;
  sol.u.mesh = ops.mesh;

  const double density_scale = mass / ops.perimeter;
  const double pin_abs = opt.pin_rel * density_scale;
  const double floor_abs = opt.floor_rel * density_scale;

  // Vanishing source: zero state, no admissible optimal density.
  if (f.maxCoeff() <= 0.0) {
    sol.u.values = Eigen::VectorXd::Zero(ops.node_count());
    sol.energy = 0.0;
    sol.h_defined = false;
    sol.el_residual = std::numeric_limits<double>::infinity();
    for (const int marker : mesh.boundary_markers) sol.degenerate_component[marker] = true;
    sol.trace_stats = trace_statistics(ops, sol.u.values);
    return sol;
  }

  const int n = ops.node_count();

  // Direct route: with a nonnegative source the state stays nonnegative on a
  // connected mesh, |u| = u, and the objective is a plain quadratic.
  bool fast_path_done = false;
  if (!opt.force_alternating && mesh.domain_component_count == 1) {
    MaskedOperator A;
    A.matrix = &ops.stiffness;
    A.rank_one = &ops.boundary_weight_full;
    A.rank_one_coef = 1.0 / mass;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    const PcgResult cg = pcg(A, sol.rhs, u, opt.cg_rel_tol, opt.max_cg);
    if (cg.converged) {
      const double scale = u.cwiseAbs().maxCoeff();
      if (u.minCoeff() >= -opt.negativity_rel * scale) {
        sol.u.values = u;
        sol.fast_path = true;
        sol.iterations = cg.iterations;
        fast_path_done = true;
      }
    }
  }

  if (!fast_path_done) {
    // Alternating minimization: Robin state solve for fixed density, then the
    // closed-form density update, with Dirichlet pinning below the threshold.
    Eigen::VectorXd h;
    if (opt.initial_density) {
      const double total = ops.boundary_weights.dot(*opt.initial_density);
      h = (mass / total) * (*opt.initial_density);
    } else {
      h = Eigen::VectorXd::Constant(ops.boundary_count(), density_scale);
    }

    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    double previous_energy = std::numeric_limits<double>::infinity();
    double previous_joint = std::numeric_limits<double>::infinity();
    int settled = 0;
    bool converged = false;

    for (int iter = 0; iter < opt.max_iterations; ++iter) {
      std::vector<std::uint8_t> pinned(n, 0);
      MaskedOperator A;
      A.matrix = &ops.stiffness;
      A.diagonal_add = Eigen::VectorXd::Zero(n);
      for (int p = 0; p < ops.boundary_count(); ++p) {
        const int v = ops.boundary_node_ids[p];
        if (h[p] < pin_abs)
          pinned[v] = 1;
        else
          A.diagonal_add[v] = ops.boundary_weights[p] / std::max(h[p], floor_abs);
      }
      A.pinned = std::move(pinned);

      const PcgResult cg = pcg(A, sol.rhs, u, opt.cg_rel_tol, opt.max_cg);
      if (!cg.converged)
        throw SolverError("state solve stalled in alternating minimization", sol.energy_trace);

      const double joint_after_state = joint_energy(ops, u, sol.rhs, h, floor_abs, A.pinned);
      if (joint_after_state > previous_joint + 1e-12 * (1.0 + std::abs(previous_joint)))
        ++sol.descent_violations;

      const double trace_abs = boundary_integral_abs(ops, u);
      if (!(trace_abs > 0.0)) {
        // Entire boundary pinned; the state is the Dirichlet solution.
        break;
      }
      for (int p = 0; p < ops.boundary_count(); ++p)
        h[p] = mass * std::abs(u[ops.boundary_node_ids[p]]) / trace_abs;

      const double energy = energy_value(u, sol.rhs, mass, ops);
      sol.energy_trace.push_back(energy);
      if (energy > joint_after_state + 1e-12 * (1.0 + std::abs(joint_after_state)))
        ++sol.descent_violations;
      previous_joint = energy;  // equals the joint objective at the updated density

      sol.iterations = iter + 1;
      const double change = std::abs(energy - previous_energy);
      if (change <= opt.energy_rel_tol * std::max(std::abs(energy), 1e-300)) {
        if (++settled >= 2) {
          converged = true;
          break;
        }
      } else {
        settled = 0;
      }
      previous_energy = energy;
    }
    if (!converged && sol.iterations >= opt.max_iterations)
      throw SolverError("alternating minimization did not converge within " +
                            std::to_string(opt.max_iterations) + " iterations",
                        sol.energy_trace);
    sol.u.values = u;
  }

  sol.energy = energy_value(sol.u.values, sol.rhs, mass, ops);
  if (sol.fast_path) sol.energy_trace.push_back(sol.energy);

  const double trace_abs = boundary_integral_abs(ops, sol.u.values);
  if (trace_abs > 0.0) {
    sol.h_opt = optimal_density(sol.u, mass, ops);
    sol.h_defined = true;
  }

  const double trace_scale = std::max(sol.u.values.cwiseAbs().maxCoeff(), 1e-300);
  for (const int marker : mesh.boundary_markers) {
    double max_trace = 0.0;
    for (const int p : ops.component_positions.at(marker))
      max_trace = std::max(max_trace, std::abs(sol.u.values[ops.boundary_node_ids[p]]));
    sol.degenerate_component[marker] = (max_trace <= 1e-8 * trace_scale);
  }

  sol.trace_stats = trace_statistics(ops, sol.u.values);
  sol.el_residual = el_residual(sol, problem);
  return sol;
}

}  // namespace insulopt
