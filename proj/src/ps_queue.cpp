#include "loopcoord/ps_queue.hpp"

#include <cmath>
#include <ostream>

#include "loopcoord/errors.hpp"

namespace loopcoord {

void PsQueueModel::validate() const {
  if (lambda <= 0.0 || mean_size <= 0.0 || R <= 0.0 || R_min <= 0.0 ||
      x_max <= 0.0) {
    throw ConfigError("queue model rates and sizes must be strictly positive");
  }
}

double logistic_phi(double u) {
  if (u > 700.0) return 0.0;
  return 1.0 / (1.0 + std::exp(u));
}

double load(const PsQueueModel& model, double x) {
  model.validate();
  if (x <= 0.0) throw DomainError("load requires x > 0");
  return model.lambda * model.mean_size / (x * model.R);
}

Eigen::VectorXd stationary_from_load(double rho, double beta, int n_max) {
  if (rho <= 0.0) throw DomainError("load must be positive");
  constexpr double kTailTol = 1e-12;
  constexpr int kHardCap = 1000000;

  std::vector<double> u;
  u.push_back(1.0);
  double sum = 1.0;
  const bool auto_trunc = n_max <= 0;
  const int floor_n = auto_trunc ? 200 : n_max;
  int n = 0;
  while (true) {
    const double q = rho * logistic_phi(static_cast<double>(n) - beta);
    const double next = u.back() * q;
    if (n + 1 > (auto_trunc ? kHardCap : n_max)) {
      // Explicit truncation: verify the remaining mass via the geometric
      // envelope before accepting it.
      if (!auto_trunc) {
        if (q < 1.0) {
          const double tail = next / (1.0 - q);
          if (tail > 1e-10 * sum) {
            throw TruncationTooSmall("stationary tail mass above 1e-10");
          }
        } else {
          throw TruncationTooSmall("state space truncated inside growing regime");
        }
        break;
      }
      throw TruncationTooSmall("auto truncation exceeded hard cap");
    }
    u.push_back(next);
    sum += next;
    ++n;
    if (auto_trunc && n >= floor_n && q < 1.0) {
      const double tail = next * q / (1.0 - q);
      if (tail <= kTailTol * sum) break;
    }
  }

  Eigen::VectorXd pi(static_cast<Eigen::Index>(u.size()));
  for (std::size_t i = 0; i < u.size(); ++i) {
    pi(static_cast<Eigen::Index>(i)) = u[i] / sum;
  }
  return pi;
}

Eigen::VectorXd stationary_distribution(const PsQueueModel& model,
                                        const OperatingPoint& point) {
  return stationary_from_load(load(model, point.x), point.beta, model.n_max);
}

double mean_transfer_time(const PsQueueModel& model,
                          const OperatingPoint& point) {
  const Eigen::VectorXd pi = stationary_distribution(model, point);
  double en = 0.0;
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    en += static_cast<double>(i) * pi(i);
  }
  return en / model.lambda;
}

double outage(const PsQueueModel& model, const OperatingPoint& point,
              bool smoothed, double steepness) {
  const Eigen::VectorXd pi = stationary_distribution(model, point);
  const double threshold = point.x * model.R / model.R_min;
  double out = 0.0;
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    const double u = static_cast<double>(i) - threshold;
    if (smoothed) {
      out += pi(i) * logistic_phi(-steepness * u);
    } else if (u > 0.0) {
      out += pi(i);
    }
  }
  return out;
}

double blocking_from_load(double rho, double beta) {
  const Eigen::VectorXd pi = stationary_from_load(rho, beta);
  double blocked = 0.0;
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    blocked += pi(i) * (1.0 - logistic_phi(static_cast<double>(i) - beta));
  }
  return blocked;
}

double blocking_probability(const PsQueueModel& model,
                            const OperatingPoint& point) {
  return blocking_from_load(load(model, point.x), point.beta);
}

namespace {

struct Partials {
  double dO_dx, dO_dbeta, dT_dx, dT_dbeta;
};

Partials partials_at(const PsQueueModel& model, const OperatingPoint& point,
                     std::pair<double, double> fd_step) {
  const auto [hx, hb] = fd_step;
  if (hx <= 0.0 || hb <= 0.0) throw ConfigError("fd steps must be positive");
  if (point.x - hx <= 0.0) {
    throw DomainError("finite-difference step crosses x <= 0");
  }
  auto O = [&](double x, double beta) {
    return outage(model, {x, beta}, /*smoothed=*/true);
  };
  auto T = [&](double x, double beta) {
    return mean_transfer_time(model, {x, beta});
  };
  Partials p;
  p.dO_dx = (O(point.x + hx, point.beta) - O(point.x - hx, point.beta)) / (2 * hx);
  p.dO_dbeta =
      (O(point.x, point.beta + hb) - O(point.x, point.beta - hb)) / (2 * hb);
  p.dT_dx = (T(point.x + hx, point.beta) - T(point.x - hx, point.beta)) / (2 * hx);
  p.dT_dbeta =
      (T(point.x, point.beta + hb) - T(point.x, point.beta - hb)) / (2 * hb);
  return p;
}

}  // namespace

Eigen::Matrix2d jacobian_at(const PsQueueModel& model,
                            const OperatingPoint& point,
                            std::pair<double, double> fd_step) {
  const Partials p = partials_at(model, point, fd_step);
  Eigen::Matrix2d J;
  J(0, 0) = p.dO_dx;
  J(0, 1) = p.dO_dbeta;
  J(1, 0) = -p.dT_dx;
  J(1, 1) = -p.dT_dbeta;
  return J;
}

void RegionScan::write_csv(std::ostream& os) const {
  os << "x,beta,unstable\n";
  char buf[32];
  std::size_t idx = 0;
  for (double xv : x) {
    for (double bv : beta) {
      std::snprintf(buf, sizeof buf, "%.17g", xv);
      os << buf << ',';
      std::snprintf(buf, sizeof buf, "%.17g", bv);
      os << buf << ',' << (unstable[idx++] ? 1 : 0) << "\n";
    }
  }
}

RegionScan stability_region_scan(const PsQueueModel& model,
                                 const std::vector<double>& x_grid,
                                 const std::vector<double>& beta_grid) {
  RegionScan scan;
  scan.x = x_grid;
  scan.beta = beta_grid;
  scan.unstable.reserve(x_grid.size() * beta_grid.size());
  for (double xv : x_grid) {
    for (double bv : beta_grid) {
      const Partials p = partials_at(model, {xv, bv}, {1e-4, 1e-4});
      // Instability condition: two real eigenvalues of opposite sign.
      const double det_expr = -p.dO_dx * p.dT_dbeta + p.dO_dbeta * p.dT_dx;
      scan.unstable.push_back(det_expr < 0.0);
    }
  }
  return scan;
}

}  // namespace loopcoord
