#pragma once

#include <utility>

#include <Eigen/Dense>

namespace loopcoord {

/// Symmetric part convention used throughout: sym(M) = M + M^T (the sum, not
/// the average). "sym(M) negative definite" therefore means M + M^T < 0.
inline Eigen::MatrixXd sym(const Eigen::MatrixXd& m) {
  return m + m.transpose();
}

/// Largest singular value.
double spectral_norm(const Eigen::MatrixXd& m);

/// Spectral (2-norm) condition number; +inf for singular input.
double cond2(const Eigen::MatrixXd& m);

/// Relative invertibility test: smallest singular value must exceed
/// rel_tol * largest. Outputs extreme singular values if requested.
bool is_invertible(const Eigen::MatrixXd& m, double rel_tol = 1e-10,
                   double* smin = nullptr, double* smax = nullptr);

/// Largest eigenvalue of a symmetric matrix together with its eigenvector,
/// and the gap to the second-largest eigenvalue.
struct SymTopEig {
  double lambda_max;
  Eigen::VectorXd v;
  double gap;
};
SymTopEig top_eig_sym(const Eigen::MatrixXd& s);

/// Matrix exponential by scaling-and-squaring with order-13 Pade
/// approximation (Higham 2005 coefficients, fixed order).
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

}  // namespace loopcoord
