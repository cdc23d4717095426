#include "insulopt/assembly.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <set>

namespace insulopt {

Eigen::VectorXd AssembledOperators::trace(const Eigen::VectorXd& u) const {
  Eigen::VectorXd t(boundary_count());
  for (int p = 0; p < boundary_count(); ++p) t[p] = u[boundary_node_ids[p]];
  return t;
}

AssembledOperators assemble(const Mesh& mesh) {
  if (!mesh.finalized()) throw PreconditionError("mesh is not finalized");
  const int n = mesh.node_count();

  std::vector<Eigen::Triplet<double>> k_triplets;
  std::vector<Eigen::Triplet<double>> m_triplets;
  k_triplets.reserve(mesh.element_count() * 9);
  m_triplets.reserve(mesh.element_count() * 9);

  if (mesh.dim == 1) {
    for (const auto& el : mesh.elements) {
      const double length = mesh.nodes[el[1]][0] - mesh.nodes[el[0]][0];
      const double k = 1.0 / length;
      const int idx[2] = {el[0], el[1]};
      const double k_local[2][2] = {{k, -k}, {-k, k}};
      const double m_local[2][2] = {{length / 3.0, length / 6.0}, {length / 6.0, length / 3.0}};
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          k_triplets.emplace_back(idx[a], idx[b], k_local[a][b]);
          m_triplets.emplace_back(idx[a], idx[b], m_local[a][b]);
        }
    }
  } else {
    for (const auto& el : mesh.elements) {
      const auto& p0 = mesh.nodes[el[0]];
      const auto& p1 = mesh.nodes[el[1]];
      const auto& p2 = mesh.nodes[el[2]];
      const double twice_area =
          (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
      const double area = 0.5 * twice_area;
      // Barycentric gradients: grad phi_a = (y_b - y_c, x_c - x_b) / (2A), cyclic.
      const std::array<std::array<double, 2>, 3> grad = {{
          {(p1[1] - p2[1]) / twice_area, (p2[0] - p1[0]) / twice_area},
          {(p2[1] - p0[1]) / twice_area, (p0[0] - p2[0]) / twice_area},
          {(p0[1] - p1[1]) / twice_area, (p1[0] - p0[0]) / twice_area},
      }};
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const double k_ab = area * (grad[a][0] * grad[b][0] + grad[a][1] * grad[b][1]);
          const double m_ab = (a == b) ? area / 6.0 : area / 12.0;
          k_triplets.emplace_back(el[a], el[b], k_ab);
          m_triplets.emplace_back(el[a], el[b], m_ab);
        }
    }
  }

  AssembledOperators ops;
  ops.mesh = &mesh;
  ops.stiffness.resize(n, n);
  ops.mass.resize(n, n);
  ops.stiffness.setFromTriplets(k_triplets.begin(), k_triplets.end());
  ops.mass.setFromTriplets(m_triplets.begin(), m_triplets.end());
  ops.stiffness.makeCompressed();
  ops.mass.makeCompressed();

  // Lumped boundary weights.
  std::vector<double> weight_of_node(n, 0.0);
  std::vector<int> marker_of_node(n, 0);
  std::set<int> boundary_set;
  for (const auto& bf : mesh.boundary) {
    if (mesh.dim == 1) {
      weight_of_node[bf.nodes[0]] += 1.0;
      marker_of_node[bf.nodes[0]] = bf.marker;
      boundary_set.insert(bf.nodes[0]);
    } else {
      const auto& p = mesh.nodes[bf.nodes[0]];
      const auto& q = mesh.nodes[bf.nodes[1]];
      const double half = 0.5 * std::hypot(q[0] - p[0], q[1] - p[1]);
      for (int k = 0; k < 2; ++k) {
        weight_of_node[bf.nodes[k]] += half;
        marker_of_node[bf.nodes[k]] = bf.marker;
        boundary_set.insert(bf.nodes[k]);
      }
    }
  }

  ops.boundary_node_ids.assign(boundary_set.begin(), boundary_set.end());
  const int bn = static_cast<int>(ops.boundary_node_ids.size());
  ops.boundary_weights.resize(bn);
  ops.boundary_weight_full = Eigen::VectorXd::Zero(n);
  ops.boundary_pos.assign(n, -1);
  for (int p = 0; p < bn; ++p) {
    const int v = ops.boundary_node_ids[p];
    ops.boundary_weights[p] = weight_of_node[v];
    ops.boundary_weight_full[v] = weight_of_node[v];
    ops.boundary_pos[v] = p;
    ops.perimeter += weight_of_node[v];
    ops.component_positions[marker_of_node[v]].push_back(p);
    ops.component_perimeter[marker_of_node[v]] += weight_of_node[v];
  }
  for (const auto& [marker, positions] : ops.component_positions) {
    Eigen::VectorXd sub(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) sub[i] = ops.boundary_weights[positions[i]];
    ops.per_component_weights.emplace(marker, std::move(sub));
  }
  return ops;
}

double boundary_integral_abs(const AssembledOperators& ops, const Eigen::VectorXd& nodal,
                             std::optional<int> marker) {
  if (nodal.size() != ops.node_count())
    throw PreconditionError("field length does not match the mesh");
  double sum = 0.0;
  if (marker) {
    const auto it = ops.component_positions.find(*marker);
    if (it == ops.component_positions.end())
      throw PreconditionError("unknown boundary marker " + std::to_string(*marker));
    for (const int p : it->second)
      sum += ops.boundary_weights[p] * std::abs(nodal[ops.boundary_node_ids[p]]);
  } else {
    for (int p = 0; p < ops.boundary_count(); ++p)
      sum += ops.boundary_weights[p] * std::abs(nodal[ops.boundary_node_ids[p]]);
  }
  return sum;
}

double boundary_integral(const AssembledOperators& ops, const ScalarField& field,
                         std::optional<int> marker) {
  if (field.mesh != ops.mesh) throw PreconditionError("field and operators use different meshes");
  return boundary_integral_abs(ops, field.values, marker);
}

double density_cv(const AssembledOperators& ops, const Eigen::VectorXd& h) {
  if (h.size() != ops.boundary_count())
    throw PreconditionError("density length does not match the boundary node count");
  const double total_weight = ops.boundary_weights.sum();
  const double mean = ops.boundary_weights.dot(h) / total_weight;
  if (mean == 0.0) return 0.0;
  double var = 0.0;
  for (int p = 0; p < ops.boundary_count(); ++p) {
    const double d = h[p] - mean;
    var += ops.boundary_weights[p] * d * d;
  }
  var /= total_weight;
  return std::sqrt(std::max(var, 0.0)) / std::abs(mean);
}

double density_zero_fraction(const AssembledOperators& ops, const Eigen::VectorXd& h,
                             double threshold) {
  if (h.size() != ops.boundary_count())
    throw PreconditionError("density length does not match the boundary node count");
  double zero_weight = 0.0;
  for (int p = 0; p < ops.boundary_count(); ++p)
    if (h[p] < threshold) zero_weight += ops.boundary_weights[p];
  return zero_weight / ops.boundary_weights.sum();
}

double density_fourier1_ratio(const AssembledOperators& ops, const Eigen::VectorXd& h) {
  if (h.size() != ops.boundary_count())
    throw PreconditionError("density length does not match the boundary node count");
  const auto loops = boundary_loops(*ops.mesh);
  if (loops.size() != 1 || !loop_radius(*ops.mesh, loops[0]))
    return std::numeric_limits<double>::quiet_NaN();
  const BoundaryLoop& loop = loops[0];
  double re = 0.0, im = 0.0, total = 0.0;
  for (std::size_t k = 0; k < loop.node_ids.size(); ++k) {
    const int p = ops.boundary_pos[loop.node_ids[k]];
    const double wh = ops.boundary_weights[p] * h[p];
    re += wh * std::cos(loop.angle[k]);
    im += wh * std::sin(loop.angle[k]);
    total += wh;
  }
  if (total == 0.0) return 0.0;
  return std::hypot(re, im) / total;
}

}  // namespace insulopt
