#pragma once

#include <Eigen/Sparse>
#include <cstdint>
#include <vector>

#include "insulopt/types.hpp"

namespace insulopt {

struct PcgResult {
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

/// Symmetric operator
///     A = K + diag(diagonal_add) + rank_one_coef * b b^T
/// restricted to unpinned coordinates, acting as the identity on pinned ones.
/// The rank-one term is applied matrix-free (one dot product and one axpy);
/// it is never formed as a matrix.
struct MaskedOperator {
  const Eigen::SparseMatrix<double>* matrix = nullptr;
  Eigen::VectorXd diagonal_add;               // empty or length N
  const Eigen::VectorXd* rank_one = nullptr;  // optional b
  double rank_one_coef = 0.0;
  std::vector<std::uint8_t> pinned;           // empty or length N

  int size() const { return static_cast<int>(matrix->rows()); }
  bool is_pinned(int i) const { return !pinned.empty() && pinned[i] != 0; }

  void project(Eigen::VectorXd& x) const;                        // zero pinned entries
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  double quadratic_form(const Eigen::VectorXd& x) const;         // x^T A x on the free part
  Eigen::VectorXd jacobi_diagonal() const;                       // positive by construction
};

/// Preconditioned conjugate gradients with the Jacobi preconditioner of A.
/// `x` is the initial guess on entry and the solution on exit. Convergence is
/// |r|/|rhs| <= rel_tol in the Euclidean norm.
PcgResult pcg(const MaskedOperator& A, const Eigen::VectorXd& rhs, Eigen::VectorXd& x,
              double rel_tol, int max_iterations);

}  // namespace insulopt
