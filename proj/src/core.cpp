#include "wtls/core.hpp"

#include <Eigen/SVD>

#include <cmath>

#include "wtls/errors.hpp"

namespace wtls {
namespace {

// Minimizes ||M y - v|| with a truncated pseudo-inverse.
Vector truncated_lstsq(const Matrix& M, const Vector& v) {
  if (M.cols() == 0) return Vector::Zero(0);
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? kRankCutoff * s(0) : 0.0;
  Vector coeffs = svd.matrixU().transpose() * v;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    coeffs(i) = (s(i) > cutoff && s(i) > 0.0) ? coeffs(i) / s(i) : 0.0;
  return svd.matrixV() * coeffs;
}

TrivialityResult weighted_membership(const ProblemSpec& p, const Matrix& basis, double tol) {
  if (!(tol > 0.0)) throw PreconditionError("triviality tolerance must be positive");
  const Matrix& S = p.W().sqrt();
  const Vector sb = S * p.b();
  const Matrix sab = S * p.A() * basis;
  const Vector y = truncated_lstsq(sab, sb);

  TrivialityResult out;
  out.residual = (sab * y - sb).norm();
  out.trivial = out.residual <= tol * (1.0 + sb.norm());
  out.witness = basis * y;
  return out;
}

}  // namespace

double w_vec_seminorm(const WeightOperator& W, const Vector& z) {
  detail::require_dims(W.dim() == z.size(), "weight vs vector");
  return (W.sqrt() * z).norm();
}

double w_hs_seminorm(const WeightOperator& W, const Matrix& X) {
  detail::require_dims(W.dim() == X.rows(), "weight vs operator rows");
  return (W.sqrt() * X).norm();
}

double objective_tls(const ProblemSpec& p, const Matrix& X, const Vector& x) {
  detail::require_dims(X.rows() == p.rows() && X.cols() == p.cols(), "X vs A");
  detail::require_dims(x.size() == p.cols(), "x vs columns of A");
  const double op_term = std::pow(w_hs_seminorm(p.W(), p.A() - X), 2);
  const double fit_term = std::pow(w_vec_seminorm(p.W(), X * x - p.b()), 2);
  return op_term + fit_term;
}

double objective_rtls(const ProblemSpec& p, const Matrix& X, const Vector& x) {
  const double base = objective_tls(p, X, x);
  return p.T().norm_sq(x) + base;
}

Matrix regularizer_nullspace(const RegularizerSpec& T, Eigen::Index n) {
  if (T.is_identity_scaled()) return Matrix::Zero(n, 0);
  const Matrix& M = T.dense_matrix();
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? kRankCutoff * s(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff && s(i) > 0.0) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

TrivialityResult is_trivial_tls(const ProblemSpec& p, double tol) {
  return weighted_membership(p, Matrix::Identity(p.cols(), p.cols()), tol);
}

TrivialityResult is_trivial_rtls(const ProblemSpec& p, double tol) {
  return weighted_membership(p, regularizer_nullspace(p.T(), p.cols()), tol);
}

FrechetErrors frechet_check(const WeightOperator& W1, const WeightOperator& W2,
                            const Vector& x0, const Matrix& X, const Matrix& Y, double h) {
  if (!(h > 0.0)) throw PreconditionError("finite-difference step must be positive");
  detail::require_dims(X.rows() == Y.rows() && X.cols() == Y.cols(), "X vs Y");
  detail::require_dims(W1.dim() == X.rows() && W2.dim() == X.rows(), "weights vs X");
  detail::require_dims(x0.size() == X.cols(), "x0 vs X");

  auto K = [&](const Matrix& Z) { return (W1.sqrt() * Z).squaredNorm(); };
  auto k = [&](const Matrix& Z) {
    const Vector v = Z * x0;
    return v.dot(W2.matrix() * v);
  };
  auto rel = [](double approx, double exact) {
    const double err = std::abs(approx - exact);
    return std::abs(exact) < 1e-8 ? err : err / std::abs(exact);
  };

  const double dK = 2.0 * (X.transpose() * W1.matrix() * Y).trace();
  const double dk = 2.0 * (W2.matrix() * X * x0).dot(Y * x0);
  const double fdK = (K(X + h * Y) - K(X - h * Y)) / (2.0 * h);
  const double fdk = (k(X + h * Y) - k(X - h * Y)) / (2.0 * h);
  return {rel(fdK, dK), rel(fdk, dk)};
}

std::string to_string(PairStatus s) {
  switch (s) {
    case PairStatus::solved: return "solved";
    case PairStatus::infimum_only: return "infimum_only";
    case PairStatus::trivial: return "trivial";
    case PairStatus::heuristic: return "heuristic";
  }
  return "heuristic";
}

}  // namespace wtls
