#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "loopcoord/system_model.hpp"

namespace loopcoord {

/// Synthesis problem: minimize ||C + A^-1||_F subject to sym(CA) <= -delta I
/// and the sparsity pattern. Optional row weights scale residual rows (loop
/// prioritization); they do not alter the stability constraint.
struct SynthesisProblem {
  LinearLoopSystem system;
  SparsityPattern pattern;
  double delta = 0.0;
  std::optional<WeightVector> weights;

  /// delta <= 0 selects the default margin 1e-2 * ||A||_2.
  static SynthesisProblem make(LinearLoopSystem system, SparsityPattern pattern,
                               double delta = 0.0,
                               std::optional<WeightVector> weights = {});
};

enum class SynthesisStatus { Feasible, Infeasible, MaxIterations };

std::string to_string(SynthesisStatus s);

struct SynthesisSolution {
  Eigen::MatrixXd C;
  double objective = 0.0;        // ||C + A^-1||_F
  double lambda_max_sym = 0.0;   // lambda_max(CA + (CA)^T)
  int iterations = 0;
  SynthesisStatus status = SynthesisStatus::MaxIterations;
  double cond_CA = 0.0;          // spectral condition number, diagnostic only
  std::string certificate;       // set for certified Infeasible results
  /// Best feasible objective after each outer penalty round (NaN before the
  /// first feasible iterate). Non-increasing by construction.
  std::vector<double> objective_trace;

  nlohmann::json to_json() const;
};

struct SynthesisConfig {
  int outer_rounds = 20;
  int inner_steps = 2000;
  double mu0 = 1.0;
  double mu_growth = 10.0;
  double grad_tol = 1e-12;
  /// When set, the initial iterate is perturbed by seeded Gaussian noise
  /// (used for the one-random-restart policy on shortfall instances).
  std::optional<std::uint64_t> restart_seed;
};

/// First-order penalty solver for the synthesis problem: projected gradient
/// descent on ||W(C + A^-1)||_F^2 + mu * max(0, lambda_max(sym(CA)) + delta)^2
/// with exact pattern projection after each step, analytic lambda_max
/// subgradient via the leading eigenvector, and geometric mu growth across
/// outer rounds. Throws SingularSystem when A fails the invertibility test.
SynthesisSolution synthesize(const SynthesisProblem& problem,
                             const SynthesisConfig& config = {});

/// Validation utility: max relative error between the analytic derivatives of
/// lambda_max(sym(CA)) with respect to the allowed entries of C and central
/// finite differences with step 1e-6. Requires a simple top eigenvalue
/// (gap > 1e-8), else throws SkippedDegenerate. Tiny derivatives are compared
/// relative to the largest derivative magnitude.
double subgradient_check(const Eigen::MatrixXd& C, const Eigen::MatrixXd& A,
                         const SparsityPattern* pattern = nullptr);

}  // namespace loopcoord
