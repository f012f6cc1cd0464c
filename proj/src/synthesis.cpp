#include "loopcoord/synthesis.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "loopcoord/errors.hpp"
#include "loopcoord/linalg.hpp"
#include "loopcoord/rng.hpp"

namespace loopcoord {

std::string to_string(SynthesisStatus s) {
  switch (s) {
    case SynthesisStatus::Feasible: return "Feasible";
    case SynthesisStatus::Infeasible: return "Infeasible";
    case SynthesisStatus::MaxIterations: return "MaxIterations";
  }
  return "?";
}

nlohmann::json SynthesisSolution::to_json() const {
  nlohmann::json j;
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < C.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < C.cols(); ++k) row.push_back(C(i, k));
    rows.push_back(std::move(row));
  }
  j["C"] = std::move(rows);
  j["objective"] = objective;
  j["lambda_max_sym"] = lambda_max_sym;
  j["iterations"] = iterations;
  j["status"] = loopcoord::to_string(status);
  j["cond_CA"] = cond_CA;
  if (!certificate.empty()) j["certificate"] = certificate;
  return j;
}

SynthesisProblem SynthesisProblem::make(LinearLoopSystem system,
                                        SparsityPattern pattern, double delta,
                                        std::optional<WeightVector> weights) {
  if (pattern.dim() != system.dim()) {
    throw ConfigError("pattern dimension must match system dimension");
  }
  if (weights && weights->w.size() != system.dim()) {
    throw ConfigError("weight dimension must match system dimension");
  }
  SynthesisProblem p;
  p.system = std::move(system);
  p.pattern = std::move(pattern);
  p.delta = delta > 0.0 ? delta : 1e-2 * spectral_norm(p.system.A);
  p.weights = std::move(weights);
  return p;
}

namespace {

// Closed-form infeasibility certificates for diagonal-only patterns.
// sym(CA) < 0 implies CA Hurwitz, so tests ruling out the stronger property
// must themselves be exact.
std::string diagonal_infeasibility_certificate(const Eigen::MatrixXd& A) {
  const Eigen::Index n = A.rows();
  if (n == 3) {
    // Null-diagonal inverse: no diagonal C makes CA Hurwitz at all.
    const Eigen::Matrix3d B = Eigen::Matrix3d(A).inverse();
    const double tol = 1e-12 * std::max(1.0, B.norm());
    if (std::abs(B(0, 0)) <= tol && std::abs(B(1, 1)) <= tol &&
        std::abs(B(2, 2)) <= tol) {
      return "A^-1 has a null diagonal: diagonal coordination impossible";
    }
  }
  if (n == 2) {
    // Exact feasibility condition for exists diag(c) with sym(CA) < 0:
    // both diagonal entries nonzero and either the cross term is cancellable
    // (sign(A11*A22) * A12*A21 < 0) or |A11*A22| > |A12*A21| (AM-GM bound).
    const double dd = A(0, 0) * A(1, 1);
    const double oo = A(0, 1) * A(1, 0);
    const double tol = 1e-14 * std::max(1.0, A.norm() * A.norm());
    if (std::abs(A(0, 0)) <= tol || std::abs(A(1, 1)) <= tol) {
      return "a diagonal entry of A vanishes: sym(CA) cannot be definite";
    }
    const bool cancellable = (dd < 0.0 ? -oo : oo) < -tol;
    if (!cancellable && std::abs(dd) <= std::abs(oo) + tol) {
      return "|A11*A22| <= |A12*A21| with non-cancellable coupling: "
             "no diagonal C satisfies sym(CA) < 0";
    }
  }
  return {};
}

}  // namespace

SynthesisSolution synthesize(const SynthesisProblem& problem,
                             const SynthesisConfig& config) {
  const Eigen::MatrixXd& A = problem.system.A;
  const int n = problem.system.dim();
  if (!is_invertible(A)) {
    throw SingularSystem("synthesis requires an invertible system matrix");
  }
  const Eigen::MatrixXd Ainv = A.partialPivLu().inverse();
  const Eigen::MatrixXd target = -Ainv;
  const double delta = problem.delta;

  Eigen::VectorXd w2 = Eigen::VectorXd::Ones(n);
  if (problem.weights) w2 = problem.weights->w.array().square();

  auto weighted_residual_sq = [&](const Eigen::MatrixXd& C) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += w2(i) * (C.row(i) - target.row(i)).squaredNorm();
    }
    return acc;
  };
  auto lambda_max_of = [&](const Eigen::MatrixXd& C, Eigen::VectorXd* v) {
    const SymTopEig te = top_eig_sym(sym(C * A));
    if (v) *v = te.v;
    return te.lambda_max;
  };

  Eigen::MatrixXd C = problem.pattern.project(target);
  if (config.restart_seed) {
    Rng rng(*config.restart_seed);
    Eigen::MatrixXd noise(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) noise(i, j) = rng.normal();
    }
    const double scale = std::max(1.0, target.norm());
    C = problem.pattern.project(C + 0.5 * scale * noise);
  }

  SynthesisSolution sol;
  sol.objective_trace.reserve(config.outer_rounds);

  Eigen::MatrixXd best_C;
  double best_weighted = std::numeric_limits<double>::infinity();
  bool have_feasible = false;

  double mu = config.mu0;
  int total_iters = 0;
  for (int round = 0; round < config.outer_rounds; ++round) {
    double step = 1.0;
    for (int it = 0; it < config.inner_steps; ++it) {
      Eigen::VectorXd v;
      const double lam = lambda_max_of(C, &v);
      const double res = weighted_residual_sq(C);
      const double viol = std::max(0.0, lam + delta);
      const double f = res + mu * viol * viol;

      if (lam <= -delta / 2.0) {
        const double wobj = res;
        if (!have_feasible || wobj < best_weighted) {
          have_feasible = true;
          best_weighted = wobj;
          best_C = C;
        }
      }

      // Gradient of the weighted residual plus the active penalty term;
      // d lambda_max / dC = 2 v (Av)^T for the sum convention sym(M)=M+M^T.
      Eigen::MatrixXd G = 2.0 * (w2.asDiagonal() * (C - target));
      if (viol > 0.0) {
        G += (4.0 * mu * viol) * (v * (A * v).transpose());
      }
      G = problem.pattern.project(G);

      const double gnorm2 = G.squaredNorm();
      ++total_iters;
      if (gnorm2 <= config.grad_tol * config.grad_tol * std::max(1.0, C.squaredNorm())) {
        break;
      }

      // Backtracking line search (Armijo).
      step = std::min(step * 2.0, 1e6);
      bool moved = false;
      while (step > 1e-18) {
        const Eigen::MatrixXd Cn = problem.pattern.project(C - step * G);
        Eigen::VectorXd vn;
        const double lamn = lambda_max_of(Cn, &vn);
        const double violn = std::max(0.0, lamn + delta);
        const double fn = weighted_residual_sq(Cn) + mu * violn * violn;
        if (fn <= f - 1e-4 * step * gnorm2) {
          C = Cn;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    sol.objective_trace.push_back(
        have_feasible ? std::sqrt(weighted_residual_sq(best_C))
                      : std::numeric_limits<double>::quiet_NaN());
    mu *= config.mu_growth;
  }

  // Final bookkeeping on the last iterate as well: it may be feasible even
  // if no intermediate check fired this round.
  {
    const double lam = lambda_max_of(C, nullptr);
    if (lam <= -delta / 2.0) {
      const double wobj = weighted_residual_sq(C);
      if (!have_feasible || wobj < best_weighted) {
        have_feasible = true;
        best_weighted = wobj;
        best_C = C;
      }
    }
  }

  sol.iterations = total_iters;
  if (have_feasible) {
    sol.C = best_C;
    sol.status = SynthesisStatus::Feasible;
  } else {
    sol.C = C;
    if (problem.pattern.is_diagonal_only()) {
      sol.certificate = diagonal_infeasibility_certificate(A);
    }
    sol.status = sol.certificate.empty() ? SynthesisStatus::MaxIterations
                                         : SynthesisStatus::Infeasible;
  }
  sol.objective = (sol.C + Ainv).norm();
  sol.lambda_max_sym = lambda_max_of(sol.C, nullptr);
  sol.cond_CA = cond2(sol.C * A);
  return sol;
}

double subgradient_check(const Eigen::MatrixXd& C, const Eigen::MatrixXd& A,
                         const SparsityPattern* pattern) {
  if (C.rows() != C.cols() || A.rows() != A.cols() || C.rows() != A.rows()) {
    throw ConfigError("C and A must be square with equal dimension");
  }
  const int n = static_cast<int>(C.rows());
  const SymTopEig te = top_eig_sym(sym(C * A));
  if (te.gap <= 1e-8) {
    throw SkippedDegenerate("top eigenvalue of sym(CA) is not simple");
  }
  const Eigen::VectorXd Av = A * te.v;

  const double h = 1e-6;
  auto lam_at = [&](const Eigen::MatrixXd& M) {
    return top_eig_sym(sym(M * A)).lambda_max;
  };

  // First pass: analytic derivatives, to set the scale for tiny entries.
  Eigen::MatrixXd analytic(n, n);
  double scale = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (pattern && !pattern->allowed(i, j)) continue;
      analytic(i, j) = 2.0 * te.v(i) * Av(j);
      scale = std::max(scale, std::abs(analytic(i, j)));
    }
  }
  const double floor = std::max(1e-6, 1e-3 * scale);

  double max_rel = 0.0;
  Eigen::MatrixXd Cp = C;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (pattern && !pattern->allowed(i, j)) continue;
      Cp(i, j) = C(i, j) + h;
      const double lp = lam_at(Cp);
      Cp(i, j) = C(i, j) - h;
      const double lm = lam_at(Cp);
      Cp(i, j) = C(i, j);
      const double fd = (lp - lm) / (2.0 * h);
      const double denom = std::max({std::abs(analytic(i, j)), std::abs(fd), floor});
      max_rel = std::max(max_rel, std::abs(analytic(i, j) - fd) / denom);
    }
  }
  return max_rel;
}

}  // namespace loopcoord
