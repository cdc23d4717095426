#include "insulopt/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "insulopt/linsolve.hpp"

namespace insulopt {

namespace {

constexpr double kTiny = 1e-300;

std::string format_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

struct PairResult {
  double theta = 0.0;           // Rayleigh quotient of the iteration operator
  Eigen::VectorXd v;            // unit mass-matrix norm, projected/deflated
  int iterations = 0;
  std::vector<double> history;  // theta per iteration
};

/// Smallest eigenpair of (A, M) on the free subspace by inverse iteration with
/// Rayleigh-quotient stopping. `deflate` (optional) is applied after every
/// update to keep iterates inside an invariant subspace. `v` is the start
/// vector. A must be positive definite on the (deflated) free subspace.
PairResult smallest_pair(const MaskedOperator& A, const Eigen::SparseMatrix<double>& M,
                         Eigen::VectorXd v, const EigenOptions& options,
                         const std::function<void(Eigen::VectorXd&)>& deflate) {
  PairResult out;
  A.project(v);
  if (deflate) deflate(v);
  {
    const double n2 = v.dot(M * v);
    if (!(n2 > kTiny)) throw PreconditionError("eigen iteration start vector vanishes");
    v /= std::sqrt(n2);
  }
  double theta = A.quadratic_form(v);
  for (int it = 1; it <= options.max_inner; ++it) {
    Eigen::VectorXd rhs = M * v;
    A.project(rhs);
    Eigen::VectorXd x = (theta > kTiny) ? Eigen::VectorXd(v / theta) : v;
    const PcgResult cg = pcg(A, rhs, x, options.cg_rel_tol, options.max_cg);
    if (!cg.converged)
      throw SolverError("eigen inner linear solve stalled (relative residual " +
                            format_double("%.3e", cg.rel_residual) + " after " +
                            std::to_string(cg.iterations) + " iterations)",
                        out.history);
    A.project(x);
    if (deflate) deflate(x);
    const double n2 = x.dot(M * x);
    if (!(n2 > kTiny))
      throw SolverError("eigen iterate collapsed onto the deflated subspace", out.history);
    v = x / std::sqrt(n2);
    const double theta_new = A.quadratic_form(v);
    out.history.push_back(theta_new);
    out.iterations = it;
    if (std::abs(theta_new - theta) <= options.inner_rel_tol * std::max(std::abs(theta_new), kTiny)) {
      out.theta = theta_new;
      out.v = std::move(v);
      return out;
    }
    theta = theta_new;
  }
  throw SolverError("eigen iteration did not converge in " + std::to_string(options.max_inner) +
                        " steps",
                    out.history);
}

struct Block2Result {
  double theta1 = 0.0;  // smaller Ritz value of the iteration operator
  double theta2 = 0.0;
  Eigen::VectorXd r1, r2;  // Ritz vectors, unit mass-matrix norm
  std::vector<double> history;
};

/// Two-vector inverse subspace iteration with Rayleigh-Ritz extraction.
/// Robust when the target eigenvalue is (nearly) double: single-vector
/// iteration grinds between the split pair, while the block converges at the
/// gap to the third eigenvalue. Requirements as in smallest_pair.
Block2Result smallest_pair_block2(const MaskedOperator& A, const Eigen::SparseMatrix<double>& M,
                                  Eigen::VectorXd v1, Eigen::VectorXd v2,
                                  const EigenOptions& options,
                                  const std::function<void(Eigen::VectorXd&)>& deflate) {
  Block2Result out;
  const auto clean = [&](Eigen::VectorXd& x) {
    A.project(x);
    if (deflate) deflate(x);
  };
  const auto m_normalize = [&](Eigen::VectorXd& x) -> bool {
    const double n2 = x.dot(M * x);
    if (!(n2 > kTiny)) return false;
    x /= std::sqrt(n2);
    return true;
  };
  // M-orthonormalize v2 against v1; re-seed deterministically if it collapses.
  const auto orthonormalize_second = [&]() -> bool {
    for (int attempt = 0; attempt < 2; ++attempt) {
      v2 -= v1.dot(M * v2) * v1;
      clean(v2);
      if (m_normalize(v2)) return true;
      for (int i = 0; i < v2.size(); ++i) v2[i] = std::sin(1.3 * (i + 1));
      clean(v2);
    }
    return false;
  };

  clean(v1);
  if (!m_normalize(v1)) throw PreconditionError("eigen iteration start vector vanishes");
  if (!orthonormalize_second())
    throw PreconditionError("eigen block iteration needs two independent directions");

  double theta1 = A.quadratic_form(v1);
  double theta2 = A.quadratic_form(v2);
  for (int it = 1; it <= options.max_inner; ++it) {
    for (auto [v, theta] : {std::pair<Eigen::VectorXd*, double>{&v1, theta1}, {&v2, theta2}}) {
      Eigen::VectorXd rhs = M * (*v);
      A.project(rhs);
      Eigen::VectorXd x = (theta > kTiny) ? Eigen::VectorXd(*v / theta) : *v;
      const PcgResult cg = pcg(A, rhs, x, options.cg_rel_tol, options.max_cg);
      if (!cg.converged)
        throw SolverError("eigen inner linear solve stalled (relative residual " +
                              format_double("%.3e", cg.rel_residual) + " after " +
                              std::to_string(cg.iterations) + " iterations)",
                          out.history);
      *v = std::move(x);
      clean(*v);
    }
    if (!m_normalize(v1))
      throw SolverError("eigen iterate collapsed onto the deflated subspace", out.history);
    if (!orthonormalize_second())
      throw SolverError("eigen block iteration lost its second direction", out.history);

    // Rayleigh-Ritz on span{v1, v2}.
    Eigen::VectorXd a_v1(v1.size());
    A.apply(v1, a_v1);
    const double a11 = v1.dot(a_v1);
    const double a12 = v2.dot(a_v1);
    const double a22 = A.quadratic_form(v2);
    const double phi = 0.5 * std::atan2(2.0 * a12, a11 - a22);
    const double c = std::cos(phi), s = std::sin(phi);
    double ritz_a = c * c * a11 + 2.0 * c * s * a12 + s * s * a22;
    double ritz_b = s * s * a11 - 2.0 * c * s * a12 + c * c * a22;
    Eigen::VectorXd w1 = c * v1 + s * v2;
    Eigen::VectorXd w2 = -s * v1 + c * v2;
    if (ritz_b < ritz_a) {
      std::swap(ritz_a, ritz_b);
      w1.swap(w2);
    }
    v1 = std::move(w1);
    v2 = std::move(w2);
    const double previous = theta1;
    theta1 = ritz_a;
    theta2 = ritz_b;
    out.history.push_back(theta1);
    if (it > 1 &&
        std::abs(theta1 - previous) <= options.inner_rel_tol * std::max(std::abs(theta1), kTiny)) {
      out.theta1 = theta1;
      out.theta2 = theta2;
      out.r1 = std::move(v1);
      out.r2 = std::move(v2);
      return out;
    }
  }
  throw SolverError("eigen block iteration did not converge in " +
                        std::to_string(options.max_inner) + " steps",
                    out.history);
}

struct RobinSetup {
  Eigen::VectorXd diagonal;                // length N: w_i / h_i on unpinned boundary
  std::vector<std::uint8_t> pinned_full;   // length N
  std::vector<int> insulated_components;   // domain components with no pin and no Robin weight
};

/// Builds the Robin diagonal and the full-length pin mask from a boundary
/// density and a boundary-position mask, flagging fully insulated components.
RobinSetup build_robin(const AssembledOperators& ops, const DensityField& h,
                       const std::vector<std::uint8_t>& mask, double floor_abs) {
  const int n = ops.node_count();
  const int bn = ops.boundary_count();
  if (h.values.size() != bn)
    throw PreconditionError("density length does not match the boundary node count");
  if (!mask.empty() && static_cast<int>(mask.size()) != bn)
    throw PreconditionError("Dirichlet mask length does not match the boundary node count");

  RobinSetup setup;
  setup.diagonal = Eigen::VectorXd::Zero(n);
  setup.pinned_full.assign(n, 0);

  const Mesh& mesh = *ops.mesh;
  std::vector<std::uint8_t> component_constrained(mesh.domain_component_count, 0);
  for (int p = 0; p < bn; ++p) {
    const int node = ops.boundary_node_ids[p];
    const bool pinned = !mask.empty() && mask[p] != 0;
    const double hp = h.values[p];
    if (std::isnan(hp) || hp < 0.0)
      throw PreconditionError("density must be nonnegative at boundary node " +
                              std::to_string(node));
    if (pinned) {
      setup.pinned_full[node] = 1;
      component_constrained[mesh.node_component[node]] = 1;
      continue;
    }
    if (std::isinf(hp)) continue;  // perfectly insulated node: zero Robin weight
    if (!(hp >= floor_abs) || hp <= 0.0)
      throw PreconditionError("unmasked density below the floor at boundary node " +
                              std::to_string(node));
    setup.diagonal[node] = ops.boundary_weight_full[node] / hp;
    if (!std::isfinite(setup.diagonal[node]))
      throw PreconditionError("Robin weight overflows at boundary node " + std::to_string(node));
    component_constrained[mesh.node_component[node]] = 1;
  }
  for (int c = 0; c < mesh.domain_component_count; ++c)
    if (!component_constrained[c]) setup.insulated_components.push_back(c);
  return setup;
}

/// Exact ground state of a fully insulated component: eigenvalue zero with the
/// mass-normalized component indicator.
std::pair<double, ScalarField> insulated_ground_state(const AssembledOperators& ops,
                                                      int component) {
  const Mesh& mesh = *ops.mesh;
  Eigen::VectorXd indicator = Eigen::VectorXd::Zero(ops.node_count());
  for (int i = 0; i < ops.node_count(); ++i)
    if (mesh.node_component[i] == component) indicator[i] = 1.0;
  indicator /= std::sqrt(indicator.dot(ops.mass * indicator));
  return {0.0, ScalarField{ops.mesh, std::move(indicator)}};
}

struct RobinEigenResult {
  double lambda = 0.0;
  Eigen::VectorXd u;  // |.| applied, unit mass-matrix norm
  int iterations = 0;
};

/// Inverse-iteration ground state for a prepared Robin setup, with a warm
/// start. The eigenvector is returned nonnegative (absolute value taken).
RobinEigenResult robin_ground_state(const AssembledOperators& ops, const RobinSetup& setup,
                                    const Eigen::VectorXd& start, const EigenOptions& options) {
  MaskedOperator A;
  A.matrix = &ops.stiffness;
  A.diagonal_add = setup.diagonal;
  A.pinned = setup.pinned_full;
  PairResult pr = smallest_pair(A, ops.mass, start, options, nullptr);
  RobinEigenResult out;
  out.lambda = pr.theta;
  out.iterations = pr.iterations;
  out.u = pr.v.cwiseAbs();
  const double n2 = out.u.dot(ops.mass * out.u);
  out.u /= std::sqrt(n2);
  return out;
}

double mean_sign(const AssembledOperators& ops, const Eigen::VectorXd& v) {
  return Eigen::VectorXd::Ones(v.size()).dot(ops.mass * v) < 0.0 ? -1.0 : 1.0;
}

/// Initial boundary density for one start, normalized to total mass m.
Eigen::VectorXd initial_density(const AssembledOperators& ops, const StartSpec& start,
                                double mass) {
  const int bn = ops.boundary_count();
  Eigen::VectorXd h(bn);
  switch (start.kind) {
    case StartSpec::Kind::Uniform:
      h.setOnes();
      break;
    case StartSpec::Kind::Cap: {
      if (!(start.cap_fraction > 0.0) || start.cap_fraction > 1.0)
        throw InvalidSpecError("cap fraction must lie in (0, 1]");
      const auto loops = boundary_loops(*ops.mesh);
      if (loops.size() != 1 || !loop_radius(*ops.mesh, loops[0]))
        throw InvalidSpecError("cap start requires a single circular boundary");
      h.setZero();
      const double half_width = start.cap_fraction * M_PI;
      int inside = 0;
      const BoundaryLoop& loop = loops[0];
      for (std::size_t k = 0; k < loop.node_ids.size(); ++k) {
        const double d = std::remainder(loop.angle[k] - start.cap_center, 2.0 * M_PI);
        if (std::abs(d) <= half_width) {
          h[ops.boundary_pos[loop.node_ids[k]]] = 1.0;
          ++inside;
        }
      }
      if (inside == 0) throw InvalidSpecError("cap start covers no boundary nodes");
      break;
    }
    case StartSpec::Kind::Random: {
      std::mt19937_64 rng(start.seed);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (int p = 0; p < bn; ++p) h[p] = unit(rng);
      break;
    }
    case StartSpec::Kind::Custom: {
      if (start.custom_density.size() != bn)
        throw InvalidSpecError("custom start density length does not match the boundary");
      if ((start.custom_density.array() < 0.0).any())
        throw InvalidSpecError("custom start density must be nonnegative");
      h = start.custom_density;
      break;
    }
  }
  const double carried = ops.boundary_weights.dot(h);
  if (!(carried > kTiny)) throw InvalidSpecError("start density carries no mass");
  return h * (mass / carried);
}

struct StartOutcome {
  bool failed = false;
  std::string error;
  double lambda = 0.0;
  Eigen::VectorXd u;
  Eigen::VectorXd h;
  int iterations = 0;
  int descent_violations = 0;
  std::vector<double> lambda_trace;
};

StartOutcome run_start(const AssembledOperators& ops, double mass, const StartSpec& start,
                       const EigenOptions& options) {
  StartOutcome out;
  const int bn = ops.boundary_count();
  const double pin_abs = options.pin_rel * mass / ops.perimeter;
  const double floor_abs = options.floor_rel * mass / ops.perimeter;
  const double seed_value = 1e-3 * mass / ops.perimeter;

  Eigen::VectorXd h = initial_density(ops, start, mass);
  Eigen::VectorXd u = Eigen::VectorXd::Ones(ops.node_count());
  std::vector<std::uint8_t> mask(bn, 0), previous_mask;
  double lambda_previous = std::numeric_limits<double>::infinity();
  int set_changes = 0;
  int settled = 0;

  try {
    for (int iter = 1; iter <= options.max_outer; ++iter) {
      out.iterations = iter;
      for (int p = 0; p < bn; ++p) mask[p] = h[p] < pin_abs ? 1 : 0;
      const bool mask_stable = !previous_mask.empty() && mask == previous_mask;
      previous_mask = mask;

      DensityField field{h, mass};
      const RobinSetup setup = build_robin(ops, field, mask, floor_abs);
      if (!setup.insulated_components.empty())
        throw SolverError("density update left a component without constraints",
                          out.lambda_trace);
      const RobinEigenResult ground = robin_ground_state(ops, setup, u, options);
      u = ground.u;

      const double lambda = rayleigh_quotient(u, mass, ops);
      out.lambda_trace.push_back(lambda);
      if (mask_stable && lambda > lambda_previous + 1e-12 * (1.0 + std::abs(lambda_previous)))
        ++out.descent_violations;

      // Flux inequality on the pinned set: a pinned node whose reaction drops
      // below the common boundary flux gets its density reopened.
      const Eigen::VectorXd trace = ops.trace(u);
      const double g = ops.boundary_weights.dot(trace) / mass;
      const Eigen::VectorXd residual =
          ops.stiffness * u - ground.lambda * (ops.mass * u);
      std::vector<int> reopen;
      for (int p = 0; p < bn; ++p) {
        if (!mask[p]) continue;
        const double dudn = residual[ops.boundary_node_ids[p]] / ops.boundary_weights[p];
        if (dudn < -g * (1.0 + options.unpin_rel)) reopen.push_back(p);
      }
      if (!reopen.empty()) {
        if (++set_changes > options.max_set_changes)
          throw SolverError("active set failed to settle within " +
                                std::to_string(options.max_set_changes) + " changes",
                            out.lambda_trace);
        for (const int p : reopen) h[p] = seed_value;
        h *= mass / ops.boundary_weights.dot(h);
        lambda_previous = lambda;
        settled = 0;
        continue;  // re-solve with the reopened density before updating it
      }

      const double trace_integral = ops.boundary_weights.dot(trace);
      if (!(trace_integral > kTiny))
        throw SolverError("boundary trace vanished during the density update",
                          out.lambda_trace);
      h = (mass / trace_integral) * trace;

      if (std::isfinite(lambda_previous) && mask_stable &&
          std::abs(lambda - lambda_previous) <=
              options.lambda_rel_tol * std::max(std::abs(lambda), kTiny)) {
        if (++settled >= 2) {
          out.lambda = lambda;
          out.u = u;
          out.h = h;
          return out;
        }
      } else {
        settled = 0;
      }
      lambda_previous = lambda;
    }
    throw SolverError("eigenvalue alternation did not converge in " +
                          std::to_string(options.max_outer) + " iterations",
                      out.lambda_trace);
  } catch (const Error& e) {
    out.failed = true;
    out.error = e.what();
    return out;
  }
}

}  // namespace

std::string StartSpec::name() const {
  switch (kind) {
    case Kind::Uniform:
      return "uniform";
    case Kind::Cap:
      return "cap(center=" + format_double("%.3g", cap_center) + ",fraction=" +
             format_double("%.3g", cap_fraction) + ")";
    case Kind::Random:
      return "random(" + std::to_string(seed) + ")";
    case Kind::Custom:
      return "custom";
  }
  return "unknown";
}

std::vector<StartSpec> default_starts(const Mesh& mesh, std::uint64_t seed) {
  std::vector<StartSpec> starts;
  StartSpec uniform;
  uniform.kind = StartSpec::Kind::Uniform;
  starts.push_back(uniform);
  if (disk_radius(mesh)) {
    StartSpec half;
    half.kind = StartSpec::Kind::Cap;
    half.cap_center = 0.0;
    half.cap_fraction = 0.5;
    starts.push_back(half);
    StartSpec quarter = half;
    quarter.cap_fraction = 0.25;
    starts.push_back(quarter);
  }
  StartSpec random;
  random.kind = StartSpec::Kind::Random;
  random.seed = seed;
  starts.push_back(random);
  return starts;
}

double neumann_lambda1(const AssembledOperators& ops, const EigenOptions& options,
                       const Eigen::VectorXd* align_hint, Eigen::VectorXd* eigenvector) {
  const Mesh& mesh = *ops.mesh;
  const int n = ops.node_count();

  // Locally constant functions span the kernel; deflate them in the
  // mass-matrix inner product.
  std::vector<Eigen::VectorXd> kernel, kernel_m;
  std::vector<double> kernel_norm2;
  for (int c = 0; c < mesh.domain_component_count; ++c) {
    Eigen::VectorXd indicator = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
      if (mesh.node_component[i] == c) indicator[i] = 1.0;
    Eigen::VectorXd m_indicator = ops.mass * indicator;
    kernel_norm2.push_back(indicator.dot(m_indicator));
    kernel.push_back(std::move(indicator));
    kernel_m.push_back(std::move(m_indicator));
  }
  const auto deflate = [&](Eigen::VectorXd& x) {
    for (std::size_t c = 0; c < kernel.size(); ++c)
      x -= (kernel_m[c].dot(x) / kernel_norm2[c]) * kernel[c];
  };

  Eigen::VectorXd v0(n), v1(n);
  for (int i = 0; i < n; ++i) {
    v0[i] = mesh.nodes[i][0] + 0.37 * mesh.nodes[i][1];
    v1[i] = mesh.nodes[i][1] - 0.37 * mesh.nodes[i][0];
  }
  if (align_hint) {
    if (align_hint->size() != n)
      throw PreconditionError("alignment hint length does not match the mesh");
    v1 = v0;
    v0 = *align_hint;
  }
  deflate(v0);
  if (v0.dot(ops.mass * v0) <= kTiny * std::max(1.0, static_cast<double>(n))) {
    for (int i = 0; i < n; ++i) v0[i] = std::sin(0.7 * (i + 1));
    deflate(v0);
    if (v0.dot(ops.mass * v0) <= kTiny)
      throw PreconditionError("no direction left after deflating constants");
  }

  const double theta0 =
      v0.dot(ops.stiffness * v0) / v0.dot(ops.mass * v0);
  const double sigma = 0.1 * std::max(theta0, kTiny);
  Eigen::SparseMatrix<double> shifted = ops.stiffness + sigma * ops.mass;
  shifted.makeCompressed();
  MaskedOperator A;
  A.matrix = &shifted;

  const Block2Result block = smallest_pair_block2(A, ops.mass, v0, v1, options, deflate);
  const double lambda = block.r1.dot(ops.stiffness * block.r1);  // unit mass-matrix norm

  Eigen::VectorXd v = block.r1;
  // Inside a (numerically) degenerate pair, pick the combination of the two
  // Ritz vectors that best matches the alignment hint.
  if (align_hint && block.theta2 - block.theta1 <= 1e-3 * std::abs(block.theta1)) {
    const Eigen::VectorXd m_hint = ops.mass * (*align_hint);
    Eigen::VectorXd combined = m_hint.dot(block.r1) * block.r1 + m_hint.dot(block.r2) * block.r2;
    const double n2 = combined.dot(ops.mass * combined);
    if (n2 > kTiny) v = combined / std::sqrt(n2);
  }
  double sign = 1.0;
  if (align_hint) {
    if (align_hint->dot(ops.mass * v) < 0.0) sign = -1.0;
  } else {
    int arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) sign = -1.0;
  }
  if (eigenvector) *eigenvector = sign * v;
  return lambda;
}

double dirichlet_lambda1(const AssembledOperators& ops, const EigenOptions& options,
                         Eigen::VectorXd* eigenvector) {
  const int n = ops.node_count();
  MaskedOperator A;
  A.matrix = &ops.stiffness;
  A.pinned.assign(n, 0);
  int free_nodes = 0;
  for (int i = 0; i < n; ++i) {
    if (ops.boundary_pos[i] >= 0)
      A.pinned[i] = 1;
    else
      ++free_nodes;
  }
  if (free_nodes == 0)
    throw PreconditionError("Dirichlet eigenproblem has no interior nodes");

  PairResult pr = smallest_pair(A, ops.mass, Eigen::VectorXd::Ones(n), options, nullptr);
  Eigen::VectorXd v = mean_sign(ops, pr.v) * pr.v;
  if (eigenvector) *eigenvector = v;
  return pr.theta;
}

std::pair<double, ScalarField> solve_robin_eigen(const AssembledOperators& ops,
                                                 const DensityField& h,
                                                 const std::vector<std::uint8_t>& dirichlet_mask,
                                                 const EigenOptions& options) {
  const double floor_abs =
      (std::isfinite(h.total_mass) && h.total_mass > 0.0)
          ? options.floor_rel * h.total_mass / ops.perimeter
          : 0.0;
  const RobinSetup setup = build_robin(ops, h, dirichlet_mask, floor_abs);
  if (!setup.insulated_components.empty())
    return insulated_ground_state(ops, setup.insulated_components.front());

  const RobinEigenResult ground =
      robin_ground_state(ops, setup, Eigen::VectorXd::Ones(ops.node_count()), options);
  // |u| already has nonnegative mean; kept explicit for clarity of contract.
  Eigen::VectorXd u = mean_sign(ops, ground.u) * ground.u;
  return {ground.lambda, ScalarField{ops.mesh, std::move(u)}};
}

EigenSolution solve_eigen(const EigenProblem& problem) {
  if (!problem.ops || !problem.ops->mesh)
    throw PreconditionError("eigen problem has no assembled operators");
  if (!(problem.mass > 0.0)) throw InvalidSpecError("mass must be positive");
  const AssembledOperators& ops = *problem.ops;

  std::vector<StartSpec> starts = problem.starts;
  if (starts.empty()) starts = default_starts(*ops.mesh, 0);

  std::vector<StartOutcome> outcomes;
  outcomes.reserve(starts.size());
  for (const StartSpec& start : starts)
    outcomes.push_back(run_start(ops, problem.mass, start, problem.options));

  int best = -1;
  for (std::size_t s = 0; s < outcomes.size(); ++s) {
    if (outcomes[s].failed) continue;
    if (best < 0 || outcomes[s].lambda < outcomes[best].lambda) best = static_cast<int>(s);
  }
  if (best < 0) {
    std::ostringstream msg;
    msg << "all " << starts.size() << " starts failed:";
    for (std::size_t s = 0; s < outcomes.size(); ++s)
      msg << " [" << starts[s].name() << "] " << outcomes[s].error;
    throw SolverError(msg.str(), outcomes.front().lambda_trace);
  }

  const double pin_abs = problem.options.pin_rel * problem.mass / ops.perimeter;
  EigenSolution solution;
  solution.mass = problem.mass;
  solution.best_start = best;
  for (std::size_t s = 0; s < outcomes.size(); ++s) {
    StartResult r;
    r.name = starts[s].name();
    r.iterations = outcomes[s].iterations;
    if (outcomes[s].failed) {
      r.lambda = std::numeric_limits<double>::quiet_NaN();
      r.cv = std::numeric_limits<double>::quiet_NaN();
      r.fourier1_ratio = std::numeric_limits<double>::quiet_NaN();
      r.zero_set_fraction = std::numeric_limits<double>::quiet_NaN();
    } else {
      r.lambda = outcomes[s].lambda;
      r.cv = density_cv(ops, outcomes[s].h);
      r.fourier1_ratio = density_fourier1_ratio(ops, outcomes[s].h);
      r.zero_set_fraction = density_zero_fraction(ops, outcomes[s].h, pin_abs);
    }
    solution.per_start.push_back(std::move(r));
  }

  const StartOutcome& winner = outcomes[best];
  solution.lambda = winner.lambda;
  solution.u = ScalarField{ops.mesh, winner.u};
  solution.h_opt = DensityField{winner.h, problem.mass};
  solution.zero_set_fraction = density_zero_fraction(ops, winner.h, pin_abs);
  solution.descent_violations = winner.descent_violations;
  solution.lambda_trace = winner.lambda_trace;

  // Stationarity diagnostics: the supported trace should carry the common
  // flux -g, pinned nodes a reaction no smaller than it.
  const Eigen::VectorXd trace = ops.trace(winner.u);
  const double g = ops.boundary_weights.dot(trace) / problem.mass;
  const Eigen::VectorXd residual =
      ops.stiffness * winner.u - solution.lambda * (ops.mass * winner.u);
  const double support_abs = problem.options.kkt_support_rel * problem.mass / ops.perimeter;
  double equality_dev = 0.0;
  double inequality_slack = 0.0;
  bool any_pinned = false;
  for (int p = 0; p < ops.boundary_count(); ++p) {
    const double dudn = residual[ops.boundary_node_ids[p]] / ops.boundary_weights[p];
    if (winner.h[p] < pin_abs) {
      const double slack = (dudn + g) / std::max(g, kTiny);
      inequality_slack = any_pinned ? std::min(inequality_slack, slack) : slack;
      any_pinned = true;
    } else if (winner.h[p] >= support_abs) {
      // Nodes between the pin threshold and the support threshold are still
      // migrating between the two sets and are excluded from both checks.
      equality_dev = std::max(equality_dev, std::abs(dudn + g) / std::max(g, kTiny));
    }
  }
  solution.kkt_equality_dev = equality_dev;
  solution.kkt_inequality_slack = any_pinned ? inequality_slack : 0.0;
  return solution;
}

double rayleigh_quotient(const Eigen::VectorXd& u, double mass, const AssembledOperators& ops) {
  if (!(mass > 0.0)) throw InvalidSpecError("mass must be positive");
  if (u.size() != ops.node_count())
    throw PreconditionError("field length does not match the mesh");
  const double u_m_u = u.dot(ops.mass * u);
  if (!(u_m_u > kTiny)) throw PreconditionError("Rayleigh quotient of a zero field");
  const double boundary = boundary_integral_abs(ops, u);
  return (u.dot(ops.stiffness * u) + boundary * boundary / mass) / u_m_u;
}

AntisymmetrySides antisymmetry_sides(const EigenSolution& solution,
                                     const AssembledOperators& ops, const Eigen::VectorXd& v) {
  if (v.size() != ops.node_count())
    throw PreconditionError("test field length does not match the mesh");
  const Eigen::VectorXd& u = solution.u.values;
  if (u.size() != ops.node_count())
    throw PreconditionError("solution does not belong to these operators");
  const Eigen::VectorXd m_v = ops.mass * v;
  const double v_m_v = v.dot(m_v);
  if (!(v_m_v > kTiny)) throw PreconditionError("test field has zero norm");
  const double lambda_v = v.dot(ops.stiffness * v) / v_m_v;

  AntisymmetrySides sides;
  sides.lhs = (solution.lambda - lambda_v) * u.dot(m_v);
  const Eigen::VectorXd residual = ops.stiffness * u - solution.lambda * (ops.mass * u);
  double pairing = 0.0;
  for (const int node : ops.boundary_node_ids) pairing += residual[node] * v[node];
  sides.rhs = -pairing;
  return sides;
}

double neumann_comparison(const EigenSolution& solution, const AssembledOperators& ops,
                          const Eigen::VectorXd& v) {
  const AntisymmetrySides sides = antisymmetry_sides(solution, ops, v);
  return std::abs(sides.lhs - sides.rhs);
}

}  // namespace insulopt
