#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace loopcoord {

/// Time-stamped parameter trajectory from ODE integration or SA simulation.
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  /// ||theta_end - theta_star||_inf when theta_star is known, else NaN.
  double final_error = std::numeric_limits<double>::quiet_NaN();
  /// Set when unprojected integration exceeded the divergence threshold and
  /// the trajectory was truncated.
  bool diverged = false;

  int dim() const { return states.empty() ? 0 : static_cast<int>(states[0].size()); }
  const Eigen::VectorXd& back() const { return states.back(); }

  /// CSV export: header "t,theta_1,...,theta_I", one row per sample.
  void write_csv(std::ostream& os) const;
};

}  // namespace loopcoord
