#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "loopcoord/system_model.hpp"
#include "loopcoord/trajectory.hpp"

namespace loopcoord {

/// Step-size schedule. Harmonic(a, b) yields eps_k = a/(k+b), which satisfies
/// the standard SA conditions (sum eps = inf, sum eps^2 < inf).
struct StepSchedule {
  enum class Kind { Constant, Harmonic };
  Kind kind = Kind::Constant;
  double a = 0.1;  // Constant: the step; Harmonic: numerator
  double b = 10.0; // Harmonic: offset

  static StepSchedule constant(double eps) {
    return StepSchedule{Kind::Constant, eps, 0.0};
  }
  static StepSchedule harmonic(double a = 1.0, double b = 10.0) {
    return StepSchedule{Kind::Harmonic, a, b};
  }
  double at(long k) const {
    return kind == Kind::Constant ? a : a / (static_cast<double>(k) + b);
  }
};

enum class UpdateMode { Synchronous, RoundRobin, RandomSingle };

struct SaConfig {
  long steps = 1000;
  StepSchedule schedule = StepSchedule::constant(0.1);
  /// Per-loop projection intervals S_i = [lo, hi]. Empty selects the default
  /// theta* +- 10*||theta0 - theta*||_inf when theta* is supplied, else a
  /// huge box.
  std::vector<std::pair<double, double>> boxes;
  double noise_std = 0.0;
  UpdateMode mode = UpdateMode::Synchronous;
  std::uint64_t seed = 0;
  /// Record every k-th iterate (iterate 0 and the final one are always kept).
  long record_every = 1;
};

/// Projected stochastic-approximation recursion
///   theta_i[k+1] = proj_{S_i}( theta_i[k] + eps_k * sum_j C_ij (f_j + N_k^j) )
/// with i.i.d. zero-mean Gaussian noise per loop per step (a martingale
/// difference sequence). RoundRobin updates component k mod I at step k;
/// RandomSingle updates one uniformly chosen component (same average update
/// frequency per loop).
Trajectory simulate_sa(const KpiEvaluator& evaluator, const Eigen::MatrixXd& C,
                       const Eigen::VectorXd& theta0, const SaConfig& config,
                       const Eigen::VectorXd* theta_star = nullptr);

/// Classical RK4 on theta_dot = C * F(theta). When the state norm exceeds
/// 1e12 the trajectory is truncated and flagged diverged (reported, not
/// thrown).
Trajectory integrate_ode(const KpiEvaluator& evaluator, const Eigen::MatrixXd& C,
                         const Eigen::VectorXd& theta0, double t_end, double dt,
                         const Eigen::VectorXd* theta_star = nullptr);

/// Martingale-difference proxy statistic for mixed noise samples M_k = C*N_k:
/// the max over loops of |normalized sample mean| and |normalized
/// autocorrelation| at lags 1..lags, each scaled by sigma/sqrt(K) so that an
/// i.i.d. zero-mean sequence yields values of order 1. Requires >= 1e4
/// samples.
double noise_martingale_check(const std::vector<Eigen::VectorXd>& mixed_noise,
                              int lags);

}  // namespace loopcoord
