#include "insulopt/linsolve.hpp"

#include <cmath>

namespace insulopt {

void MaskedOperator::project(Eigen::VectorXd& x) const {
  if (pinned.empty()) return;
  for (int i = 0; i < x.size(); ++i)
    if (pinned[i]) x[i] = 0.0;
}

void MaskedOperator::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  Eigen::VectorXd xf = x;
  project(xf);
  y.noalias() = (*matrix) * xf;
  if (diagonal_add.size() > 0) y.array() += diagonal_add.array() * xf.array();
  if (rank_one != nullptr && rank_one_coef != 0.0) {
    const double scale = rank_one_coef * rank_one->dot(xf);
    y.noalias() += scale * (*rank_one);
  }
  if (!pinned.empty()) {
    for (int i = 0; i < y.size(); ++i)
      if (pinned[i]) y[i] = x[i];
  }
}

double MaskedOperator::quadratic_form(const Eigen::VectorXd& x) const {
  Eigen::VectorXd xf = x;
  project(xf);
  double value = xf.dot((*matrix) * xf);
  if (diagonal_add.size() > 0) value += (diagonal_add.array() * xf.array().square()).sum();
  if (rank_one != nullptr && rank_one_coef != 0.0) {
    const double dot = rank_one->dot(xf);
    value += rank_one_coef * dot * dot;
  }
  return value;
}

Eigen::VectorXd MaskedOperator::jacobi_diagonal() const {
  Eigen::VectorXd d = matrix->diagonal();
  if (diagonal_add.size() > 0) d += diagonal_add;
  if (rank_one != nullptr && rank_one_coef != 0.0)
    d.array() += rank_one_coef * rank_one->array().square();
  for (int i = 0; i < d.size(); ++i) {
    if (is_pinned(i) || d[i] <= 0.0) d[i] = 1.0;
  }
  return d;
}

PcgResult pcg(const MaskedOperator& A, const Eigen::VectorXd& rhs, Eigen::VectorXd& x,
              double rel_tol, int max_iterations) {
  PcgResult result;
  const int n = A.size();
  Eigen::VectorXd b = rhs;
  A.project(b);
  if (x.size() != n) x = Eigen::VectorXd::Zero(n);
  A.project(x);

  const double b_norm = b.norm();
  if (b_norm == 0.0) {
    x.setZero();
    result.converged = true;
    return result;
  }

  const Eigen::VectorXd inv_diag = A.jacobi_diagonal().cwiseInverse();
  Eigen::VectorXd ax(n);
  A.apply(x, ax);
  Eigen::VectorXd r = b - ax;
  A.project(r);
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);

  for (int it = 0; it < max_iterations; ++it) {
    result.rel_residual = r.norm() / b_norm;
    if (result.rel_residual <= rel_tol) {
      result.converged = true;
      result.iterations = it;
      return result;
    }
    Eigen::VectorXd ap(n);
    A.apply(p, ap);
    const double p_ap = p.dot(ap);
    if (!(p_ap > 0.0)) break;  // lost positive definiteness (singular system)
    const double alpha = rz / p_ap;
    x.noalias() += alpha * p;
    r.noalias() -= alpha * ap;
    A.project(r);
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
    result.iterations = it + 1;
  }
  result.rel_residual = r.norm() / b_norm;
  result.converged = result.rel_residual <= rel_tol;
  return result;
}

}  // namespace insulopt
