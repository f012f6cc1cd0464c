#include "loopcoord/linalg.hpp"

#include <cmath>
#include <limits>

#include "loopcoord/errors.hpp"

namespace loopcoord {

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

double cond2(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

bool is_invertible(const Eigen::MatrixXd& m, double rel_tol, double* smin,
                   double* smax) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  const double lo = s(s.size() - 1);
  const double hi = s(0);
  if (smin) *smin = lo;
  if (smax) *smax = hi;
  return hi > 0.0 && lo > rel_tol * hi;
}

SymTopEig top_eig_sym(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success) {
    throw EigensolverFailure("symmetric eigensolver did not converge");
  }
  const auto& vals = es.eigenvalues();
  const int n = static_cast<int>(vals.size());
  SymTopEig out;
  out.lambda_max = vals(n - 1);
  out.v = es.eigenvectors().col(n - 1);
  out.gap = n >= 2 ? vals(n - 1) - vals(n - 2)
                   : std::numeric_limits<double>::infinity();
  return out;
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
  // Order-13 Pade numerator coefficients (Higham, "The scaling and squaring
  // method for the matrix exponential revisited", 2005).
  static const double b[14] = {64764752532480000.0, 32382376266240000.0,
                               7771770303897600.0,  1187353796428800.0,
                               129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,
                               1323241920.0,        40840800.0,
                               960960.0,            16380.0,
                               182.0,               1.0};
  static const double theta13 = 5.371920351148152;

  const Eigen::Index n = a.rows();
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  }
  const Eigen::MatrixXd as = a / std::ldexp(1.0, squarings);

  const Eigen::MatrixXd a2 = as * as;
  const Eigen::MatrixXd a4 = a2 * a2;
  const Eigen::MatrixXd a6 = a2 * a4;
  const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(n, n);

  const Eigen::MatrixXd u =
      as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
            b[5] * a4 + b[3] * a2 + b[1] * ident);
  const Eigen::MatrixXd v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
                            b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;

  Eigen::MatrixXd r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

}  // namespace loopcoord
