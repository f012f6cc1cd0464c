#include "loopcoord/stability.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "loopcoord/errors.hpp"
#include "loopcoord/linalg.hpp"

namespace loopcoord {

std::string to_string(StabilityMethod m) {
  switch (m) {
    case StabilityMethod::Eigen: return "Eigen";
    case StabilityMethod::Routh2: return "Routh2";
    case StabilityMethod::Routh3: return "Routh3";
    case StabilityMethod::Lyapunov: return "Lyapunov";
  }
  return "?";
}

nlohmann::json StabilityReport::to_json() const {
  nlohmann::json j;
  j["is_hurwitz"] = is_hurwitz;
  j["spectral_abscissa"] = spectral_abscissa;
  j["method"] = loopcoord::to_string(method);
  nlohmann::json eigs = nlohmann::json::array();
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    eigs.push_back({{"re", eigenvalues(i).real()}, {"im", eigenvalues(i).imag()}});
  }
  j["eigenvalues"] = std::move(eigs);
  j["has_lyapunov_certificate"] = lyapunov_X.has_value();
  if (lyapunov_X) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < lyapunov_X->rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index k = 0; k < lyapunov_X->cols(); ++k) {
        row.push_back((*lyapunov_X)(i, k));
      }
      rows.push_back(std::move(row));
    }
    j["lyapunov_X"] = std::move(rows);
  }
  return j;
}

StabilityReport is_hurwitz_eigen(const Eigen::MatrixXd& m, double margin) {
  if (m.rows() != m.cols()) throw ConfigError("matrix must be square");
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw EigensolverFailure("nonsymmetric eigensolver did not converge");
  }
  StabilityReport report;
  report.method = StabilityMethod::Eigen;
  report.eigenvalues = es.eigenvalues();
  report.spectral_abscissa = report.eigenvalues.real().maxCoeff();
  report.is_hurwitz = report.spectral_abscissa < -margin;
  return report;
}

namespace {

// Degeneracy tolerance for sign decisions on det: 1e-9 relative to the
// matrix norm, scaled to det's units (norm^dim).
double det_tolerance(const Eigen::MatrixXd& m) {
  const double scale = std::max(m.norm(), 1.0);
  return 1e-9 * std::pow(scale, static_cast<double>(m.rows()));
}

}  // namespace

bool routh_hurwitz_2(const Eigen::Matrix2d& m) {
  const double det = m.determinant();
  if (std::abs(det) < det_tolerance(m)) {
    throw DegenerateMatrix("2x2 determinant below tolerance");
  }
  return det > 0.0 && m.trace() < 0.0;
}

bool routh_hurwitz_3(const Eigen::Matrix3d& m) {
  const double det = m.determinant();
  if (std::abs(det) < det_tolerance(m)) {
    throw DegenerateMatrix("3x3 determinant below tolerance");
  }
  const double tr = m.trace();
  const double tr_inv = m.inverse().trace();
  return det < 0.0 && tr < 0.0 && tr * tr_inv > 1.0;
}

std::optional<Eigen::MatrixXd> lyapunov_certificate(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  if (n != m.cols()) throw ConfigError("matrix must be square");
  if (n > 200) throw ConfigError("lyapunov_certificate limited to dim <= 200");

  // Vectorized operator L vec(X) = vec(M^T X + X M), column-major vec:
  // L = I (x) M^T + M^T (x) I.
  const Eigen::Index nn = n * n;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(nn, nn);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index row = j * n + i;
      for (Eigen::Index k = 0; k < n; ++k) {
        L(row, j * n + k) += m(k, i);  // (I (x) M^T) term
        L(row, k * n + i) += m(k, j);  // (M^T (x) I) term
      }
    }
  }
  Eigen::VectorXd rhs(nn);
  rhs.setZero();
  for (Eigen::Index i = 0; i < n; ++i) rhs(i * n + i) = -1.0;

  Eigen::FullPivLu<Eigen::MatrixXd> lu(L);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    throw NoUniqueSolution(
        "Lyapunov operator singular: M has eigenvalues with "
        "lambda_i + lambda_j = 0");
  }
  const Eigen::VectorXd xv = lu.solve(rhs);
  Eigen::MatrixXd X(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = xv(j * n + i);
  }
  X = 0.5 * (X + X.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X);
  if (es.info() != Eigen::Success) {
    throw EigensolverFailure("eigensolver failed on Lyapunov solution");
  }
  if (es.eigenvalues()(0) <= 0.0) return std::nullopt;
  return X;
}

bool diag_strict_concavity_check(const Eigen::MatrixXd& J,
                                 const WeightVector& w) {
  if (J.rows() != J.cols()) throw ConfigError("Jacobian must be square");
  if (w.w.size() != J.rows()) throw ConfigError("weight dimension mismatch");
  const Eigen::MatrixXd Jw = w.w.asDiagonal() * J;
  return top_eig_sym(sym(Jw)).lambda_max < 0.0;
}

Trajectory integrate_linear(const LinearLoopSystem& system,
                            const Eigen::VectorXd& theta0, double t_end,
                            double dt) {
  if (dt <= 0.0) throw ConfigError("dt must be positive");
  if (t_end < dt) throw ConfigError("t_end must be at least dt");
  const int n = system.dim();
  if (theta0.size() != n) throw ConfigError("theta0 dimension mismatch");

  // Augmented form handles b != 0 (and even singular A) uniformly:
  // d/dt [theta; 1] = [[A, b], [0, 0]] [theta; 1].
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + 1, n + 1);
  aug.topLeftCorner(n, n) = system.A;
  aug.topRightCorner(n, 1) = system.b;
  const Eigen::MatrixXd step = expm(aug * dt);
  const Eigen::MatrixXd E = step.topLeftCorner(n, n);
  const Eigen::VectorXd f = step.topRightCorner(n, 1);

  const auto steps = static_cast<long>(std::floor(t_end / dt + 1e-9));
  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  Eigen::VectorXd theta = theta0;
  traj.times.push_back(0.0);
  traj.states.push_back(theta);
  for (long k = 1; k <= steps; ++k) {
    theta = (E * theta + f).eval();
    traj.times.push_back(static_cast<double>(k) * dt);
    traj.states.push_back(theta);
  }
  if (system.invertible) {
    traj.final_error = (theta - system.theta_star).lpNorm<Eigen::Infinity>();
  }
  return traj;
}

}  // namespace loopcoord
