#pragma once

#include <Eigen/Sparse>
#include <map>
#include <optional>
#include <vector>

#include "insulopt/mesh.hpp"

namespace insulopt {

/// Piecewise-linear finite element operators: stiffness (grad-grad form),
/// consistent mass, and node-lumped boundary weights. In 2d every boundary
/// facet contributes half its length to each endpoint; in 1d each boundary
/// node carries counting weight 1.
struct AssembledOperators {
  const Mesh* mesh = nullptr;
  Eigen::SparseMatrix<double> stiffness;
  Eigen::SparseMatrix<double> mass;

  std::vector<int> boundary_node_ids;    // ascending node ids
  Eigen::VectorXd boundary_weights;      // aligned with boundary_node_ids
  Eigen::VectorXd boundary_weight_full;  // length N, zero off the boundary
  std::vector<int> boundary_pos;         // length N; position in the lists, -1 elsewhere

  std::map<int, std::vector<int>> component_positions;   // marker -> positions
  std::map<int, Eigen::VectorXd> per_component_weights;  // marker -> weight sub-vector
  double perimeter = 0.0;
  std::map<int, double> component_perimeter;

  int node_count() const { return static_cast<int>(stiffness.rows()); }
  int boundary_count() const { return static_cast<int>(boundary_node_ids.size()); }

  /// Boundary trace of a nodal vector, aligned with boundary_node_ids.
  Eigen::VectorXd trace(const Eigen::VectorXd& u) const;
};

AssembledOperators assemble(const Mesh& mesh);

/// Integral of |u| over the whole boundary or over one marked component.
double boundary_integral(const AssembledOperators& ops, const ScalarField& field,
                         std::optional<int> marker = std::nullopt);
double boundary_integral_abs(const AssembledOperators& ops, const Eigen::VectorXd& nodal,
                             std::optional<int> marker = std::nullopt);

// Density diagnostics (h given per boundary node) -----------------------------

/// Weight-adjusted coefficient of variation of h over the boundary measure.
double density_cv(const AssembledOperators& ops, const Eigen::VectorXd& h);

/// Boundary measure fraction where h < threshold.
double density_zero_fraction(const AssembledOperators& ops, const Eigen::VectorXd& h,
                             double threshold);

/// |sum w h exp(-i theta)| / (sum w h) over a single circular boundary loop;
/// NaN when the boundary is not one circle.
double density_fourier1_ratio(const AssembledOperators& ops, const Eigen::VectorXd& h);

}  // namespace insulopt
