#include "loopcoord/system_model.hpp"

#include <nlohmann/json.hpp>

#include "loopcoord/errors.hpp"
#include "loopcoord/linalg.hpp"

namespace loopcoord {

LinearLoopSystem LinearLoopSystem::make(Eigen::MatrixXd A, Eigen::VectorXd b,
                                        std::vector<std::string> names) {
  if (A.rows() != A.cols()) {
    throw ConfigError("system matrix A must be square");
  }
  if (b.size() != A.rows()) {
    throw ConfigError("offset b must have the system dimension");
  }
  if (!names.empty() && static_cast<Eigen::Index>(names.size()) != A.rows()) {
    throw ConfigError("names must match the system dimension");
  }
  LinearLoopSystem sys;
  sys.A = std::move(A);
  sys.b = std::move(b);
  sys.names = std::move(names);
  sys.invertible = is_invertible(sys.A);
  if (sys.invertible) {
    sys.theta_star = sys.A.colPivHouseholderQr().solve(-sys.b);
  }
  return sys;
}

WeightVector WeightVector::ones(int n) {
  return WeightVector{Eigen::VectorXd::Ones(n)};
}

WeightVector WeightVector::make(Eigen::VectorXd w) {
  if (w.size() == 0 || w.minCoeff() <= 0.0) {
    throw ConfigError("weights must be strictly positive");
  }
  return WeightVector{std::move(w)};
}

SparsityPattern SparsityPattern::full(int n) {
  SparsityPattern p;
  p.mask_ = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
      n, n, true);
  return p;
}

SparsityPattern SparsityPattern::diagonal(int n) {
  SparsityPattern p;
  p.mask_ = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
      n, n, false);
  for (int i = 0; i < n; ++i) p.mask_(i, i) = true;
  return p;
}

SparsityPattern SparsityPattern::from_adjacency(
    const std::vector<std::vector<bool>>& adjacency) {
  const int n = static_cast<int>(adjacency.size());
  for (const auto& row : adjacency) {
    if (static_cast<int>(row.size()) != n) {
      throw ConfigError("adjacency matrix must be square");
    }
  }
  SparsityPattern p;
  p.mask_ = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
      n, n, false);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      p.mask_(i, j) = adjacency[i][j] || i == j;
    }
  }
  return p;
}

SparsityPattern SparsityPattern::from_mask(
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask) {
  if (mask.rows() != mask.cols()) {
    throw ConfigError("pattern mask must be square");
  }
  for (Eigen::Index i = 0; i < mask.rows(); ++i) mask(i, i) = true;
  SparsityPattern p;
  p.mask_ = std::move(mask);
  return p;
}

bool SparsityPattern::is_diagonal_only() const {
  for (Eigen::Index i = 0; i < mask_.rows(); ++i) {
    for (Eigen::Index j = 0; j < mask_.cols(); ++j) {
      if (i != j && mask_(i, j)) return false;
    }
  }
  return true;
}

bool SparsityPattern::is_full() const { return mask_.all(); }

Eigen::MatrixXd SparsityPattern::project(const Eigen::MatrixXd& m) const {
  Eigen::MatrixXd out = m;
  for (Eigen::Index i = 0; i < mask_.rows(); ++i) {
    for (Eigen::Index j = 0; j < mask_.cols(); ++j) {
      if (!mask_(i, j)) out(i, j) = 0.0;
    }
  }
  return out;
}

std::vector<std::vector<int>> neighbor_sets(const LinearLoopSystem& system,
                                            double zero_tol) {
  if (zero_tol < 0.0) throw ConfigError("zero_tol must be nonnegative");
  const int n = system.dim();
  std::vector<std::vector<int>> sets(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      // j is a neighbor of i when f_j responds to theta_i: dF_j/dtheta_i =
      // A(j, i). Self-neighborhood is unconditional.
      if (j == i || std::abs(system.A(j, i)) > zero_tol) {
        sets[i].push_back(j);
      }
    }
  }
  return sets;
}

SparsityPattern pattern_from_adjacency(
    const std::vector<std::vector<bool>>& adjacency) {
  return SparsityPattern::from_adjacency(adjacency);
}

namespace {

nlohmann::json matrix_rows(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd rows_to_matrix(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(std::string(what) + " must be a nonempty array of rows");
  }
  const auto nrows = j.size();
  const auto ncols = j[0].size();
  Eigen::MatrixXd m(nrows, ncols);
  for (std::size_t i = 0; i < nrows; ++i) {
    if (!j[i].is_array() || j[i].size() != ncols) {
      throw ConfigError(std::string(what) + " rows must have equal length");
    }
    for (std::size_t k = 0; k < ncols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

}  // namespace

nlohmann::json to_json(const LinearLoopSystem& sys) {
  nlohmann::json j;
  j["A"] = matrix_rows(sys.A);
  nlohmann::json b = nlohmann::json::array();
  for (Eigen::Index i = 0; i < sys.b.size(); ++i) b.push_back(sys.b(i));
  j["b"] = std::move(b);
  if (!sys.names.empty()) j["names"] = sys.names;
  return j;
}

LinearLoopSystem system_from_json(const nlohmann::json& j) {
  if (!j.contains("A") || !j.contains("b")) {
    throw ConfigError("system JSON requires fields \"A\" and \"b\"");
  }
  Eigen::MatrixXd A = rows_to_matrix(j.at("A"), "A");
  const auto& jb = j.at("b");
  Eigen::VectorXd b(jb.size());
  for (std::size_t i = 0; i < jb.size(); ++i) b(i) = jb[i].get<double>();
  std::vector<std::string> names;
  if (j.contains("names")) {
    names = j.at("names").get<std::vector<std::string>>();
  }
  return LinearLoopSystem::make(std::move(A), std::move(b), std::move(names));
}

nlohmann::json to_json(const SparsityPattern& p) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < p.dim(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < p.dim(); ++j) row.push_back(p.allowed(i, j) ? 1 : 0);
    rows.push_back(std::move(row));
  }
  return nlohmann::json{{"allowed", rows}};
}

SparsityPattern pattern_from_json(const nlohmann::json& j) {
  if (!j.contains("allowed")) {
    throw ConfigError("pattern JSON requires field \"allowed\"");
  }
  Eigen::MatrixXd m = rows_to_matrix(j.at("allowed"), "allowed");
  if (m.rows() != m.cols()) throw ConfigError("pattern must be square");
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask(m.rows(), m.cols());
  for (Eigen::Index a = 0; a < m.rows(); ++a) {
    for (Eigen::Index b = 0; b < m.cols(); ++b) mask(a, b) = m(a, b) != 0.0;
  }
  return SparsityPattern::from_mask(std::move(mask));
}

}  // namespace loopcoord
