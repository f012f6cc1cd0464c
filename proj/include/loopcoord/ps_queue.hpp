#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace loopcoord {

/// Processor-sharing queue with logistic admission control. Arrivals are
/// Poisson(lambda); file sizes exponential with mean `mean_size`; full-rate
/// capacity x*R is shared equally among active users; a new user finding n in
/// the system is accepted with probability phi(n - beta), phi(u) = 1/(1+e^u).
struct PsQueueModel {
  double lambda = 0.5;      // users/s
  double mean_size = 10.0;  // Mbit
  double R = 15.0;          // Mbit/s at full resources
  double R_min = 2.0;       // Mbit/s QoS floor
  double x_max = 1.0;
  /// State-space truncation; <= 0 selects the smallest n with geometric
  /// envelope tail below 1e-12 (at least 200). When set explicitly, a tail
  /// mass above 1e-10 throws TruncationTooSmall.
  int n_max = -1;

  void validate() const;
};

struct OperatingPoint {
  double x = 1.0;    // resources in (0, x_max]
  double beta = 0.0; // admission threshold (any real)
};

/// Logistic admission probability phi(u) = 1/(1+e^u).
double logistic_phi(double u);

/// rho(x) = lambda E[sigma] / (x R); x <= 0 throws DomainError.
double load(const PsQueueModel& model, double x);

/// Birth-death stationary law for a given load and threshold:
/// pi(n) proportional to rho^n prod_{k<n} phi(k - beta). Shared by the queue
/// model and the cellular blocking computation.
Eigen::VectorXd stationary_from_load(double rho, double beta, int n_max = -1);

/// pi(n) over n = 0..n_max, sums to 1 within 1e-12.
Eigen::VectorXd stationary_distribution(const PsQueueModel& model,
                                        const OperatingPoint& point);

/// Little's law with all arrivals counted in lambda (blocked included),
/// exactly as T = (1/lambda) sum n pi(n).
double mean_transfer_time(const PsQueueModel& model,
                          const OperatingPoint& point);

/// Outage probability: mass on states with n > xR/R_min. The smoothed variant
/// replaces the indicator with a logistic of the given steepness and is
/// continuously differentiable in x.
double outage(const PsQueueModel& model, const OperatingPoint& point,
              bool smoothed, double steepness = 10.0);

/// Blocking probability seen by arrivals (PASTA): sum pi(n) (1 - phi(n-beta)).
double blocking_probability(const PsQueueModel& model,
                            const OperatingPoint& point);
double blocking_from_load(double rho, double beta);

/// Central-difference Jacobian of (f1, f2) = (smoothed outage, -T) with
/// respect to (x, beta); row order (f1, f2), column order (x, beta).
/// Steps crossing x <= 0 throw DomainError.
Eigen::Matrix2d jacobian_at(const PsQueueModel& model,
                            const OperatingPoint& point,
                            std::pair<double, double> fd_step = {1e-4, 1e-4});

struct RegionScan {
  std::vector<double> x;
  std::vector<double> beta;
  /// Row-major over (x, beta); true = unstable (det of the Jacobian < 0,
  /// equivalently one positive and one negative real eigenvalue).
  std::vector<bool> unstable;

  /// CSV "x,beta,unstable" with 0/1 flags.
  void write_csv(std::ostream& os) const;
};

/// Marks each grid point unstable iff
/// -dO/dx * dT/dbeta + dO/dbeta * dT/dx < 0 (the smoothed outage O).
RegionScan stability_region_scan(const PsQueueModel& model,
                                 const std::vector<double>& x_grid,
                                 const std::vector<double>& beta_grid);

}  // namespace loopcoord
