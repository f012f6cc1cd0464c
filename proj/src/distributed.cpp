#include "loopcoord/distributed.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <nlohmann/json.hpp>

#include "loopcoord/errors.hpp"
#include "loopcoord/linalg.hpp"
#include "loopcoord/stability.hpp"

namespace loopcoord {

nlohmann::json DiagonalCoordinator::to_json() const {
  nlohmann::json j;
  nlohmann::json cj = nlohmann::json::array();
  for (Eigen::Index i = 0; i < c.size(); ++i) cj.push_back(c(i));
  j["c"] = std::move(cj);
  if (epsilon) j["epsilon"] = *epsilon;
  j["sym_negative_definite"] = sym_negative_definite;
  return j;
}

namespace {

double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

}  // namespace

DiagonalCoordinator coordinate_2(const Eigen::Matrix2d& A) {
  const double det = A.determinant();
  if (std::abs(det) < 1e-12 * std::max(1.0, A.norm() * A.norm())) {
    throw DegenerateMatrix("coordinate_2 requires invertible A");
  }
  if (!(A(0, 0) < 0.0) || !(A(1, 1) < 0.0)) {
    throw StandAloneUnstable(
        "coordinate_2 requires strictly negative diagonal entries");
  }
  DiagonalCoordinator coord;
  coord.c = Eigen::Vector2d(
      1.0, sign_of(det) * std::abs(A(0, 0)) / (2.0 * std::abs(A(1, 1))));
  return coord;
}

std::vector<double> default_epsilon_schedule() {
  std::vector<double> s;
  s.reserve(31);
  for (int k = 0; k <= 30; ++k) s.push_back(std::ldexp(1.0, -k));
  return s;
}

DiagonalCoordinator coordinate_3(const Eigen::Matrix3d& A,
                                 std::span<const double> epsilon_schedule) {
  std::vector<double> fallback;
  if (epsilon_schedule.empty()) {
    fallback = default_epsilon_schedule();
    epsilon_schedule = fallback;
  }

  const double det = A.determinant();
  const double scale = std::max(1.0, A.norm());
  if (std::abs(det) < 1e-12 * scale * scale * scale) {
    throw DegenerateMatrix("coordinate_3 requires invertible A");
  }
  const Eigen::Matrix3d B = A.inverse();
  const double diag_tol = 1e-12 * std::max(1.0, B.norm());
  if (std::abs(B(0, 0)) <= diag_tol && std::abs(B(1, 1)) <= diag_tol &&
      std::abs(B(2, 2)) <= diag_tol) {
    throw NotCoordinatable("A^-1 has a null diagonal");
  }

  // Find an index ordering with A(0,0) < 0 and B(1,1) != 0. The closed form
  // below assumes that ordering; the permutation is inverted on output.
  static const std::array<std::array<int, 3>, 6> perms = {{
      {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (const auto& p : perms) {
    Eigen::Matrix3d Ap, Bp;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        Ap(i, j) = A(p[i], p[j]);
        Bp(i, j) = B(p[i], p[j]);
      }
    }
    if (!(Ap(0, 0) < 0.0) || std::abs(Bp(1, 1)) <= diag_tol) continue;

    const double c2 = -Bp(1, 1);
    const double c3 = std::abs(Bp(2, 2)) > diag_tol
                          ? -2.0 * sign_of(det * c2) * std::abs(Bp(2, 2))
                          : -sign_of(det * c2);
    for (double eps : epsilon_schedule) {
      Eigen::Vector3d cp(1.0, eps * c2, eps * c3);
      const Eigen::Matrix3d M = cp.asDiagonal() * Ap;
      bool ok = false;
      try {
        ok = routh_hurwitz_3(M);
      } catch (const DegenerateMatrix&) {
        ok = false;  // candidate too close to singular, keep shrinking
      }
      if (ok) {
        DiagonalCoordinator coord;
        coord.c = Eigen::Vector3d::Zero();
        for (int i = 0; i < 3; ++i) coord.c(p[i]) = cp(i);
        coord.epsilon = eps;
        return coord;
      }
    }
    throw EpsilonNotFound("epsilon schedule exhausted in coordinate_3");
  }
  throw StandAloneUnstable(
      "no index ordering with A(0,0) < 0 and nonzero B(1,1)");
}

DiagonalCoordinator fisher_fuller(const Eigen::MatrixXd& A) {
  const int n = static_cast<int>(A.rows());
  if (n != A.cols()) throw ConfigError("fisher_fuller requires a square matrix");

  std::vector<double> minors(n);
  const double scale = std::max(1.0, A.norm());
  for (int k = 1; k <= n; ++k) {
    minors[k - 1] = A.topLeftCorner(k, k).determinant();
    if (std::abs(minors[k - 1]) < 1e-10 * std::pow(scale, k)) {
      throw HypothesisViolated("leading principal submatrix " +
                               std::to_string(k) + " is singular");
    }
  }

  // Sign of the partial product c1..ci must equal (-1)^i sign(det [A]_ii).
  Eigen::VectorXd signs(n);
  double prev_prod_sign = 1.0;
  for (int i = 0; i < n; ++i) {
    const double target = ((i + 1) % 2 == 0 ? 1.0 : -1.0) * sign_of(minors[i]);
    signs(i) = target / prev_prod_sign;
    prev_prod_sign = target;
  }

  std::optional<DiagonalCoordinator> hurwitz_fallback;
  double gamma = 1e-2;
  for (int attempt = 0; attempt <= 6; ++attempt, gamma /= 10.0) {
    Eigen::VectorXd c(n);
    double mag = 1.0;
    for (int i = 0; i < n; ++i) {
      c(i) = signs(i) * mag;
      mag *= gamma;
    }
    const Eigen::MatrixXd CA = c.asDiagonal() * A;
    if (top_eig_sym(sym(CA)).lambda_max < 0.0) {
      DiagonalCoordinator coord;
      coord.c = c;
      coord.sym_negative_definite = true;
      return coord;
    }
    if (!hurwitz_fallback && is_hurwitz_eigen(CA).is_hurwitz) {
      DiagonalCoordinator coord;
      coord.c = c;
      hurwitz_fallback = coord;
    }
  }
  // Extend the magnitude hierarchy further for the Hurwitz fallback; the
  // perturbation argument only needs gamma small enough.
  if (!hurwitz_fallback) {
    for (; gamma >= 1e-14; gamma /= 10.0) {
      Eigen::VectorXd c(n);
      double mag = 1.0;
      for (int i = 0; i < n; ++i) {
        c(i) = signs(i) * mag;
        mag *= gamma;
      }
      if (is_hurwitz_eigen(c.asDiagonal() * A).is_hurwitz) {
        DiagonalCoordinator coord;
        coord.c = c;
        hurwitz_fallback = coord;
        break;
      }
    }
  }
  if (!hurwitz_fallback) {
    throw EpsilonNotFound("magnitude schedule exhausted in fisher_fuller");
  }
  return *hurwitz_fallback;
}

Eigen::MatrixXd gradient_coordinator(const Eigen::MatrixXd& A,
                                     const WeightVector& w,
                                     bool* definiteness_warning) {
  if (A.rows() != A.cols()) throw ConfigError("A must be square");
  if (w.w.size() != A.rows()) throw ConfigError("weight dimension mismatch");
  if (definiteness_warning) {
    *definiteness_warning = !is_invertible(A);
  }
  return -A.transpose() * w.w.asDiagonal();
}

}  // namespace loopcoord
