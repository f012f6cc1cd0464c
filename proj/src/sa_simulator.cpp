#include "loopcoord/sa_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "loopcoord/errors.hpp"
#include "loopcoord/rng.hpp"

namespace loopcoord {

void Trajectory::write_csv(std::ostream& os) const {
  const int n = dim();
  os << "t";
  for (int i = 1; i <= n; ++i) os << ",theta_" << i;
  os << "\n";
  char buf[32];
  for (std::size_t k = 0; k < times.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", times[k]);
    os << buf;
    for (int i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", states[k](i));
      os << ',' << buf;
    }
    os << "\n";
  }
}

namespace {

std::vector<std::pair<double, double>> resolve_boxes(
    const SaConfig& config, const Eigen::VectorXd& theta0,
    const Eigen::VectorXd* theta_star, int n) {
  if (!config.boxes.empty()) {
    if (static_cast<int>(config.boxes.size()) != n) {
      throw ConfigError("box count must match the loop count");
    }
    for (const auto& [lo, hi] : config.boxes) {
      if (!(lo < hi)) throw ConfigError("box intervals must satisfy lo < hi");
    }
    return config.boxes;
  }
  std::vector<std::pair<double, double>> boxes(n);
  if (theta_star) {
    const double radius =
        std::max(1e-6, 10.0 * (theta0 - *theta_star).lpNorm<Eigen::Infinity>());
    for (int i = 0; i < n; ++i) {
      boxes[i] = {(*theta_star)(i) - radius, (*theta_star)(i) + radius};
    }
  } else {
    for (int i = 0; i < n; ++i) boxes[i] = {-1e12, 1e12};
  }
  return boxes;
}

double clamp(double x, double lo, double hi) {
  return std::min(std::max(x, lo), hi);
}

}  // namespace

Trajectory simulate_sa(const KpiEvaluator& evaluator, const Eigen::MatrixXd& C,
                       const Eigen::VectorXd& theta0, const SaConfig& config,
                       const Eigen::VectorXd* theta_star) {
  const int n = evaluator.dim();
  if (C.rows() != n || C.cols() != n || theta0.size() != n) {
    throw ConfigError("dimension mismatch in simulate_sa");
  }
  if (config.steps < 1) throw ConfigError("steps must be positive");
  const auto boxes = resolve_boxes(config, theta0, theta_star, n);
  const long every = std::max<long>(1, config.record_every);

  Rng rng(config.seed);
  Eigen::VectorXd theta = theta0;
  for (int i = 0; i < n; ++i) {
    theta(i) = clamp(theta(i), boxes[i].first, boxes[i].second);
  }

  Trajectory traj;
  traj.times.reserve(config.steps / every + 2);
  traj.states.reserve(config.steps / every + 2);
  traj.times.push_back(0.0);
  traj.states.push_back(theta);

  Eigen::VectorXd noise = Eigen::VectorXd::Zero(n);
  for (long k = 0; k < config.steps; ++k) {
    Eigen::VectorXd f = evaluator.evaluate(theta);
    if (config.noise_std > 0.0) {
      noise = config.noise_std * rng.normal_vector(n);
      f += noise;
    }
    const Eigen::VectorXd update = C * f;
    const double eps = config.schedule.at(k);
    if (eps <= 0.0) throw ConfigError("step sizes must be positive");

    switch (config.mode) {
      case UpdateMode::Synchronous:
        for (int i = 0; i < n; ++i) {
          theta(i) = clamp(theta(i) + eps * update(i), boxes[i].first,
                           boxes[i].second);
        }
        break;
      case UpdateMode::RoundRobin: {
        const int i = static_cast<int>(k % n);
        theta(i) = clamp(theta(i) + eps * update(i), boxes[i].first,
                         boxes[i].second);
        break;
      }
      case UpdateMode::RandomSingle: {
        const int i = static_cast<int>(rng.uniform_int(n));
        theta(i) = clamp(theta(i) + eps * update(i), boxes[i].first,
                         boxes[i].second);
        break;
      }
    }
    if ((k + 1) % every == 0 || k + 1 == config.steps) {
      traj.times.push_back(static_cast<double>(k + 1));
      traj.states.push_back(theta);
    }
  }
  if (theta_star) {
    traj.final_error = (theta - *theta_star).lpNorm<Eigen::Infinity>();
  }
  return traj;
}

Trajectory integrate_ode(const KpiEvaluator& evaluator, const Eigen::MatrixXd& C,
                         const Eigen::VectorXd& theta0, double t_end, double dt,
                         const Eigen::VectorXd* theta_star) {
  const int n = evaluator.dim();
  if (C.rows() != n || C.cols() != n || theta0.size() != n) {
    throw ConfigError("dimension mismatch in integrate_ode");
  }
  if (dt <= 0.0) throw ConfigError("dt must be positive");
  constexpr double kDivergenceThreshold = 1e12;

  auto field = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return C * evaluator.evaluate(x);
  };

  const auto steps = static_cast<long>(std::floor(t_end / dt + 1e-9));
  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  Eigen::VectorXd x = theta0;
  traj.times.push_back(0.0);
  traj.states.push_back(x);
  for (long k = 1; k <= steps; ++k) {
    const Eigen::VectorXd k1 = field(x);
    const Eigen::VectorXd k2 = field(x + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = field(x + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = field(x + dt * k3);
    x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite() || x.lpNorm<Eigen::Infinity>() > kDivergenceThreshold) {
      traj.diverged = true;
      break;
    }
    traj.times.push_back(static_cast<double>(k) * dt);
    traj.states.push_back(x);
  }
  if (theta_star && !traj.diverged) {
    traj.final_error = (x - *theta_star).lpNorm<Eigen::Infinity>();
  }
  return traj;
}

double noise_martingale_check(const std::vector<Eigen::VectorXd>& mixed_noise,
                              int lags) {
  const auto K = static_cast<long>(mixed_noise.size());
  if (K < 10000) throw ConfigError("martingale check needs >= 1e4 samples");
  if (lags < 1) throw ConfigError("lags must be >= 1");
  const int n = static_cast<int>(mixed_noise[0].size());

  double stat = 0.0;
  for (int i = 0; i < n; ++i) {
    double mean = 0.0, rms2 = 0.0;
    for (long k = 0; k < K; ++k) {
      const double v = mixed_noise[k](i);
      mean += v;
      rms2 += v * v;
    }
    mean /= static_cast<double>(K);
    rms2 /= static_cast<double>(K);
    const double rms = std::sqrt(rms2);
    if (rms == 0.0) continue;  // identically-zero stream contributes 0

    // |sample mean| / (sigma / sqrt(K)): ~|N(0,1)| under H0.
    stat = std::max(stat, std::abs(mean) * std::sqrt(static_cast<double>(K)) / rms);

    for (int lag = 1; lag <= lags; ++lag) {
      double acc = 0.0;
      for (long k = 0; k + lag < K; ++k) {
        acc += mixed_noise[k](i) * mixed_noise[k + lag](i);
      }
      const double m = static_cast<double>(K - lag);
      const double z = (acc / m) / (rms2 / std::sqrt(m));
      stat = std::max(stat, std::abs(z));
    }
  }
  return stat;
}

}  // namespace loopcoord
