#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "loopcoord/rng.hpp"

namespace loopcoord {

/// Linearized multi-loop model: update vector F(theta) = A*theta + b.
/// theta_star = -A^{-1} b is computed on construction when A passes the
/// relative invertibility test (smallest singular value > 1e-10 * largest).
struct LinearLoopSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd theta_star;  // empty when A is (numerically) singular
  bool invertible = false;
  std::vector<std::string> names;  // optional per-loop labels

  int dim() const { return static_cast<int>(A.rows()); }

  /// Validates shapes and computes theta_star.
  static LinearLoopSystem make(Eigen::MatrixXd A, Eigen::VectorXd b,
                               std::vector<std::string> names = {});
};

/// Strictly positive per-loop priorities.
struct WeightVector {
  Eigen::VectorXd w;

  static WeightVector ones(int n);
  static WeightVector make(Eigen::VectorXd w);  // rejects non-positive entries
  Eigen::MatrixXd diag() const { return w.asDiagonal(); }
};

/// Allowed nonzero entries of a coordination matrix. The diagonal is always
/// allowed: a loop may always rescale its own feedback.
class SparsityPattern {
 public:
  static SparsityPattern full(int n);
  static SparsityPattern diagonal(int n);
  /// allowed[i][j] = adjacency[i][j] or i == j. Rejects non-square input.
  static SparsityPattern from_adjacency(
      const std::vector<std::vector<bool>>& adjacency);
  static SparsityPattern from_mask(Eigen::Matrix<bool, Eigen::Dynamic,
                                                 Eigen::Dynamic> mask);

  int dim() const { return static_cast<int>(mask_.rows()); }
  bool allowed(int i, int j) const { return mask_(i, j); }
  bool is_diagonal_only() const;
  bool is_full() const;
  /// Zero out all disallowed entries.
  Eigen::MatrixXd project(const Eigen::MatrixXd& m) const;

  const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& mask() const {
    return mask_;
  }

 private:
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask_;
};

/// Evaluation contract for a vector of performance indicators. Implementations
/// must be deterministic; stochastic observation is layered on via
/// NoisyKpiEvaluator.
class KpiEvaluator {
 public:
  virtual ~KpiEvaluator() = default;
  virtual int dim() const = 0;
  virtual Eigen::VectorXd evaluate(const Eigen::VectorXd& theta) const = 0;
  /// Per-loop target values f_bar, where the zero-finding form applies.
  virtual std::optional<Eigen::VectorXd> targets() const { return std::nullopt; }
};

/// F(theta) = A*theta + b; targets are -b (zero-finding form).
class LinearKpiEvaluator : public KpiEvaluator {
 public:
  explicit LinearKpiEvaluator(LinearLoopSystem sys) : sys_(std::move(sys)) {}
  int dim() const override { return sys_.dim(); }
  Eigen::VectorXd evaluate(const Eigen::VectorXd& theta) const override {
    return sys_.A * theta + sys_.b;
  }
  std::optional<Eigen::VectorXd> targets() const override { return -sys_.b; }
  const LinearLoopSystem& system() const { return sys_; }

 private:
  LinearLoopSystem sys_;
};

/// Adds i.i.d. zero-mean Gaussian observation noise to a base evaluator.
/// noise_std == 0 is the null source: evaluations are then deterministic.
class NoisyKpiEvaluator : public KpiEvaluator {
 public:
  NoisyKpiEvaluator(const KpiEvaluator& base, double noise_std,
                    std::uint64_t seed)
      : base_(base), noise_std_(noise_std), rng_(seed) {}
  int dim() const override { return base_.dim(); }
  Eigen::VectorXd evaluate(const Eigen::VectorXd& theta) const override {
    Eigen::VectorXd y = base_.evaluate(theta);
    if (noise_std_ > 0.0) y += noise_std_ * rng_.normal_vector(base_.dim());
    return y;
  }
  std::optional<Eigen::VectorXd> targets() const override {
    return base_.targets();
  }

 private:
  const KpiEvaluator& base_;
  double noise_std_;
  mutable Rng rng_;
};

/// Neighbor sets I_i = {i} ∪ {j : |A(j,i)| > zero_tol}. Self-neighborhood is
/// always included: stand-alone operation requires reading one's own
/// indicator. Indices are 0-based.
std::vector<std::vector<int>> neighbor_sets(const LinearLoopSystem& system,
                                            double zero_tol = 1e-12);

SparsityPattern pattern_from_adjacency(
    const std::vector<std::vector<bool>>& adjacency);

// JSON serialization. LinearLoopSystem: {"A": rows, "b": vector,
// "names": optional}; SparsityPattern: {"allowed": rows of 0/1}.
nlohmann::json to_json(const LinearLoopSystem& sys);
LinearLoopSystem system_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SparsityPattern& p);
SparsityPattern pattern_from_json(const nlohmann::json& j);

}  // namespace loopcoord
