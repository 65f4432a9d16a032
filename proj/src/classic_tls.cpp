#include "wtls/classic_tls.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

#include "wtls/errors.hpp"

namespace wtls {

ClassicTlsSolution solve_classic_tls(const Matrix& A, const Vector& b) {
  detail::require_dims(A.rows() == b.size() && A.rows() >= 1 && A.cols() >= 1, "A vs b");
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();

  Matrix Ab(m, n + 1);
  Ab << A, b;
  Eigen::JacobiSVD<Matrix> svd(Ab, Eigen::ComputeFullU | Eigen::ComputeFullV);

  // Singular values of (A | b) padded with zeros up to n + 1 entries.
  Vector s = Vector::Zero(n + 1);
  s.head(svd.singularValues().size()) = svd.singularValues();
  const Matrix& V = svd.matrixV();
  const double sigma = s(n);

  if (n >= 1 && s(n - 1) - sigma <= 1e-10 * std::max(1.0, s(0))) {
    std::ostringstream os;
    os << "classic TLS nongeneric: smallest singular value " << sigma
       << " of (A|b) is repeated (next " << s(n - 1) << ")";
    throw ClassicTlsError(ClassicTlsError::Kind::repeated_sigma_min, os.str(),
                          {V.col(n), V.col(n - 1)});
  }
  const Vector v = V.col(n);
  if (std::abs(v(n)) <= 1e-12) {
    throw ClassicTlsError(ClassicTlsError::Kind::nongeneric,
                          "classic TLS nongeneric: last component of the minimal right "
                          "singular vector vanishes",
                          {v});
  }

  ClassicTlsSolution out;
  out.sigma_min = sigma;
  out.x = -v.head(n) / v(n);
  out.X = A;
  if (n < svd.singularValues().size() && sigma > 0.0)
    out.X -= sigma * svd.matrixU().col(n) * v.head(n).transpose();
  Matrix corrected(m, n + 1);
  corrected << out.X, out.X * out.x;
  out.residual = (Ab - corrected).squaredNorm();
  return out;
}

MinDirection min_direction(const Matrix& M, double eps) {
  if (M.rows() != M.cols() || M.rows() < 1) throw DimensionError("dimension mismatch: M must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (M + M.transpose()));
  MinDirection out;
  out.lambda_min = eig.eigenvalues()(0);
  out.x = eig.eigenvectors().col(0);
  out.value = std::sqrt(std::max(out.lambda_min, 0.0));
  out.below_eps = out.value < eps;
  return out;
}

}  // namespace wtls
