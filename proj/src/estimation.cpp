#include "loopcoord/estimation.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "loopcoord/errors.hpp"

namespace loopcoord {

void SampleSet::write_csv(std::ostream& os) const {
  const int n = dim();
  for (int i = 1; i <= n; ++i) os << "theta_" << i << ",";
  for (int i = 1; i <= n; ++i) os << "y_" << i << (i == n ? "" : ",");
  os << "\n";
  char buf[32];
  for (int r = 0; r < size(); ++r) {
    for (int i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", thetas(r, i));
      os << buf << ",";
    }
    for (int i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", ys(r, i));
      os << buf << (i == n - 1 ? "" : ",");
    }
    os << "\n";
  }
}

SampleSet SampleSet::read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty sample CSV");
  // Header: count theta_* columns to get the dimension.
  int n = 0;
  {
    std::stringstream ss(line);
    std::string col;
    int total = 0;
    while (std::getline(ss, col, ',')) {
      ++total;
      if (col.rfind("theta_", 0) == 0) ++n;
    }
    if (n == 0 || total != 2 * n) {
      throw ConfigError("sample CSV header must be theta_1..theta_I,y_1..y_I");
    }
  }
  std::vector<Eigen::VectorXd> th, yy;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Eigen::VectorXd t(n), y(n);
    for (int i = 0; i < 2 * n; ++i) {
      if (!std::getline(ss, cell, ',')) {
        throw ConfigError("short row in sample CSV");
      }
      (i < n ? t(i) : y(i - n)) = std::stod(cell);
    }
    th.push_back(std::move(t));
    yy.push_back(std::move(y));
  }
  SampleSet s;
  s.thetas.resize(static_cast<Eigen::Index>(th.size()), n);
  s.ys.resize(static_cast<Eigen::Index>(yy.size()), n);
  for (std::size_t r = 0; r < th.size(); ++r) {
    s.thetas.row(static_cast<Eigen::Index>(r)) = th[r];
    s.ys.row(static_cast<Eigen::Index>(r)) = yy[r];
  }
  return s;
}

FdEstimate finite_difference_estimate(const KpiEvaluator& evaluator,
                                      const Eigen::VectorXd& theta0,
                                      const Eigen::VectorXd& delta,
                                      int repeats) {
  const int n = evaluator.dim();
  if (theta0.size() != n || delta.size() != n) {
    throw ConfigError("dimension mismatch in finite_difference_estimate");
  }
  if (delta.minCoeff() <= 0.0) throw ConfigError("steps must be positive");
  if (repeats < 1) throw ConfigError("repeats must be >= 1");

  FdEstimate est;
  est.A.resize(n, n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd plus = theta0, minus = theta0;
    plus(i) += delta(i);
    minus(i) -= delta(i);
    Eigen::VectorXd quotient = Eigen::VectorXd::Zero(n);
    for (int r = 0; r < repeats; ++r) {
      quotient += (evaluator.evaluate(plus) - evaluator.evaluate(minus)) /
                  (2.0 * delta(i));
    }
    est.A.col(i) = quotient / static_cast<double>(repeats);
  }
  Eigen::VectorXd f0 = Eigen::VectorXd::Zero(n);
  for (int r = 0; r < repeats; ++r) f0 += evaluator.evaluate(theta0);
  f0 /= static_cast<double>(repeats);
  est.b = f0 - est.A * theta0;
  return est;
}

LsEstimate least_squares_estimate(const SampleSet& samples) {
  const int n = samples.dim();
  const int m = samples.size();
  if (m < n + 1) {
    throw RankDeficient("need at least I+1 samples for an affine fit");
  }
  Eigen::MatrixXd X(m, n + 1);
  X.leftCols(n) = samples.thetas;
  X.col(n).setOnes();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU |
                                               Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-10 * sv(0)) {
    // Report the deficient direction (right singular vector of the smallest
    // singular value, in (theta, 1) coordinates).
    std::ostringstream msg;
    msg << "design matrix rank-deficient; deficient direction:";
    const Eigen::VectorXd dir = svd.matrixV().col(sv.size() - 1);
    for (Eigen::Index i = 0; i < dir.size(); ++i) msg << ' ' << dir(i);
    throw RankDeficient(msg.str());
  }

  const Eigen::MatrixXd beta = svd.solve(samples.ys);  // (n+1) x n
  LsEstimate est;
  est.A = beta.topRows(n).transpose();
  est.b = beta.row(n).transpose();
  const Eigen::MatrixXd residual = samples.ys - X * beta;
  est.residual_rms = std::sqrt(residual.squaredNorm() /
                               static_cast<double>(residual.size()));
  return est;
}

void ConditionDatabase::put(const std::string& key, Entry entry) {
  if (key.empty()) throw ConfigError("database key must be nonempty");
  entries_[key] = std::move(entry);
}

const ConditionDatabase::Entry& ConditionDatabase::get(
    const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw NotFound("no entry for key \"" + key + "\"");
  return it->second;
}

bool ConditionDatabase::contains(const std::string& key) const {
  return entries_.count(key) > 0;
}

nlohmann::json ConditionDatabase::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, e] : entries_) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < e.A.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index k = 0; k < e.A.cols(); ++k) row.push_back(e.A(i, k));
      rows.push_back(std::move(row));
    }
    nlohmann::json bj = nlohmann::json::array();
    for (Eigen::Index i = 0; i < e.b.size(); ++i) bj.push_back(e.b(i));
    j[key] = {{"A", std::move(rows)},
              {"b", std::move(bj)},
              {"n", e.sample_count},
              {"rms", e.residual_rms}};
  }
  return j;
}

ConditionDatabase ConditionDatabase::from_json(const nlohmann::json& j) {
  ConditionDatabase db;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& v = it.value();
    Entry e;
    const auto& rows = v.at("A");
    const auto nr = rows.size();
    const auto nc = nr > 0 ? rows[0].size() : 0;
    e.A.resize(static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(nc));
    for (std::size_t r = 0; r < nr; ++r) {
      for (std::size_t c = 0; c < nc; ++c) {
        e.A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            rows[r][c].get<double>();
      }
    }
    const auto& bj = v.at("b");
    e.b.resize(static_cast<Eigen::Index>(bj.size()));
    for (std::size_t i = 0; i < bj.size(); ++i) {
      e.b(static_cast<Eigen::Index>(i)) = bj[i].get<double>();
    }
    e.sample_count = v.at("n").get<long>();
    e.residual_rms = v.at("rms").get<double>();
    db.put(it.key(), std::move(e));
  }
  return db;
}

void ConditionDatabase::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write database file: " + path);
  os << to_json().dump(2) << "\n";
}

ConditionDatabase ConditionDatabase::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw NotFound("database file not found: " + path);
  nlohmann::json j;
  is >> j;
  return from_json(j);
}

}  // namespace loopcoord
