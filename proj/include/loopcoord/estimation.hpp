#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "loopcoord/system_model.hpp"

namespace loopcoord {

/// Logged observations: rows of (theta, y) with y = F(theta) + noise.
struct SampleSet {
  Eigen::MatrixXd thetas;  // n_samples x I
  Eigen::MatrixXd ys;      // n_samples x I

  int size() const { return static_cast<int>(thetas.rows()); }
  int dim() const { return static_cast<int>(thetas.cols()); }

  /// CSV format: "theta_1..theta_I,y_1..y_I", one header row.
  void write_csv(std::ostream& os) const;
  static SampleSet read_csv(std::istream& is);
};

struct FdEstimate {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

/// Central-difference estimate of (A, b) around theta0, each quotient
/// averaged over `repeats` evaluations. A(j,i) estimates dF_j/dtheta_i;
/// b is the mean of F(theta0) - A_hat * theta0 (reduces to F(0) at the
/// origin).
FdEstimate finite_difference_estimate(const KpiEvaluator& evaluator,
                                      const Eigen::VectorXd& theta0,
                                      const Eigen::VectorXd& delta,
                                      int repeats);

struct LsEstimate {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  double residual_rms = 0.0;
};

/// QR-based affine regression y ~ A theta + b per output row. Throws
/// RankDeficient (reporting a deficient direction) when the design matrix
/// loses full column rank at relative tolerance 1e-10.
LsEstimate least_squares_estimate(const SampleSet& samples);

/// Operating-condition database: per-key estimated (A, b) with bookkeeping.
/// Keys are opaque labels chosen by the caller (e.g. hour-of-day "H14").
class ConditionDatabase {
 public:
  struct Entry {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    long sample_count = 0;
    double residual_rms = 0.0;
  };

  /// Upsert.
  void put(const std::string& key, Entry entry);
  /// Throws NotFound for missing keys.
  const Entry& get(const std::string& key) const;
  bool contains(const std::string& key) const;
  std::size_t size() const { return entries_.size(); }

  /// Single-document JSON: {key: {"A": rows, "b": vector, "n": int,
  /// "rms": real}}.
  nlohmann::json to_json() const;
  static ConditionDatabase from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static ConditionDatabase load(const std::string& path);

 private:
  std::map<std::string, Entry> entries_;
};

}  // namespace loopcoord
