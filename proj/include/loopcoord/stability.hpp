#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "loopcoord/system_model.hpp"
#include "loopcoord/trajectory.hpp"

namespace loopcoord {

enum class StabilityMethod { Eigen, Routh2, Routh3, Lyapunov };

std::string to_string(StabilityMethod m);

struct StabilityReport {
  bool is_hurwitz = false;
  double spectral_abscissa = 0.0;  // max real part of eigenvalues, 1/s
  StabilityMethod method = StabilityMethod::Eigen;
  std::optional<Eigen::MatrixXd> lyapunov_X;
  Eigen::VectorXcd eigenvalues;

  nlohmann::json to_json() const;
};

/// Hurwitz test via a dense nonsymmetric eigensolver. is_hurwitz is true iff
/// the spectral abscissa is below -margin. Eigensolver non-convergence throws
/// EigensolverFailure (a distinct failure, not "unstable").
StabilityReport is_hurwitz_eigen(const Eigen::MatrixXd& m, double margin = 0.0);

/// 2x2 Routh-Hurwitz: Hurwitz iff det(M) > 0 and tr(M) < 0.
/// Throws DegenerateMatrix when |det| is below tolerance.
bool routh_hurwitz_2(const Eigen::Matrix2d& m);

/// 3x3 Routh-Hurwitz: Hurwitz iff det(M) < 0, tr(M) < 0 and
/// tr(M) tr(M^-1) > 1.
bool routh_hurwitz_3(const Eigen::Matrix3d& m);

/// Solves M^T X + X M = -I for symmetric X by Kronecker vectorization and
/// returns X when it is positive definite (then V = (theta-theta*)^T X
/// (theta-theta*) is a Lyapunov function). Returns nullopt when X exists but
/// is not positive definite. Throws NoUniqueSolution when the Lyapunov
/// operator is singular (eigenvalue pair with lambda_i + lambda_j = 0).
std::optional<Eigen::MatrixXd> lyapunov_certificate(const Eigen::MatrixXd& m);

/// Sufficient condition for diagonal strict concavity: with Jw = diag(w)*J,
/// returns true iff lambda_max(Jw + Jw^T) < 0.
bool diag_strict_concavity_check(const Eigen::MatrixXd& J,
                                 const WeightVector& w);

/// Closed-form linear trajectory theta(t) = theta* + e^{tA}(theta0 - theta*),
/// sampled every dt via one matrix exponential per step size.
Trajectory integrate_linear(const LinearLoopSystem& system,
                            const Eigen::VectorXd& theta0, double t_end,
                            double dt);

}  // namespace loopcoord
