#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "loopcoord/system_model.hpp"

namespace loopcoord {

/// Fully distributed (diagonal) coordinator: per-loop feedback gains.
struct DiagonalCoordinator {
  Eigen::VectorXd c;
  std::optional<double> epsilon;
  /// Whether the construction certified sym(CA) < 0 (stronger than Hurwitz;
  /// not achievable for every input, see fisher_fuller).
  bool sym_negative_definite = false;

  Eigen::MatrixXd C() const { return Eigen::MatrixXd(c.asDiagonal()); }
  nlohmann::json to_json() const;
};

/// I=2 closed form: c = (1, sign(det A) |A11| / (2 |A22|)). Requires
/// stand-alone stability (both diagonal entries strictly negative), else
/// throws StandAloneUnstable; near-singular A throws DegenerateMatrix.
DiagonalCoordinator coordinate_2(const Eigen::Matrix2d& A);

/// Default epsilon schedule: geometric 1, 1/2, ..., 2^-30.
std::vector<double> default_epsilon_schedule();

/// I=3 construction. Internally permutes indices so that A(0,0) < 0 and
/// B(1,1) != 0 with B = A^-1 (the permutation is inverted on output), picks
/// (c2, c3) in closed form and returns C(eps) = diag(1, eps c2, eps c3) for
/// the largest schedule eps that passes the 3x3 Routh-Hurwitz test.
/// A with null-diagonal inverse throws NotCoordinatable; exhausted schedule
/// throws EpsilonNotFound.
DiagonalCoordinator coordinate_3(const Eigen::Matrix3d& A,
                                 std::span<const double> epsilon_schedule = {});

/// General-I sequential scaling: signs chosen so the leading principal minors
/// of CA alternate starting negative, magnitudes |c_i| = gamma^(i-1) with
/// gamma shrinking 10x per retry (<= 6 retries). Certifies sym(CA) < 0 when
/// some retry achieves it; otherwise falls back to the first Hurwitz
/// candidate with sym_negative_definite = false (sym-definiteness is not
/// attainable for every full-rank-minor matrix, Hurwitz stability is).
/// Singular leading principal submatrix throws HypothesisViolated.
DiagonalCoordinator fisher_fuller(const Eigen::MatrixXd& A);

/// Gradient coordinator C = -A^T W: CA = -A^T W A is symmetric and, for
/// invertible A, negative definite. When A is singular the matrix is still
/// returned and *definiteness_warning (if given) is set.
Eigen::MatrixXd gradient_coordinator(const Eigen::MatrixXd& A,
                                     const WeightVector& w,
                                     bool* definiteness_warning = nullptr);

}  // namespace loopcoord
