#include "wtls/problem.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

#include "wtls/errors.hpp"

namespace wtls {
namespace {

bool all_finite(const Matrix& M) { return M.allFinite(); }

}  // namespace

WeightOperator WeightOperator::identity(Eigen::Index m) {
  return diagonal(Vector::Ones(m));
}

WeightOperator WeightOperator::diagonal(const Vector& w, double eig_floor) {
  if (w.size() < 1) throw DimensionError("weight must have dimension >= 1");
  if (!w.allFinite()) throw PreconditionError("weight has non-finite entries");
  WeightOperator op;
  op.kind_ = Kind::diagonal;
  op.eig_floor_ = eig_floor;
  op.lambda_max_ = w.maxCoeff();
  op.lambda_min_ = w.minCoeff();
  const double floor = eig_floor * std::max(op.lambda_max_, 0.0);
  if (op.lambda_min_ < -floor) {
    std::ostringstream os;
    os << "weight is not positive semidefinite (min entry " << op.lambda_min_ << ")";
    throw PreconditionError(os.str());
  }
  op.lambda_min_ = std::max(op.lambda_min_, 0.0);
  op.matrix_ = w.asDiagonal();
  op.sqrt_ = w.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  return op;
}

WeightOperator WeightOperator::dense(const Matrix& w, double eig_floor) {
  if (w.rows() < 1 || w.rows() != w.cols())
    throw DimensionError("dense weight must be square with dimension >= 1");
  if (!all_finite(w)) throw PreconditionError("weight has non-finite entries");
  const double scale = w.cwiseAbs().maxCoeff();
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw PreconditionError("weight is not symmetric");

  WeightOperator op;
  op.kind_ = Kind::dense;
  op.eig_floor_ = eig_floor;
  op.matrix_ = 0.5 * (w + w.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> eig(op.matrix_);
  const Vector& lam = eig.eigenvalues();
  op.lambda_min_ = lam.minCoeff();
  op.lambda_max_ = lam.maxCoeff();
  const double floor = eig_floor * std::max(op.lambda_max_, 0.0);
  if (op.lambda_min_ < -floor) {
    std::ostringstream os;
    os << "weight is not positive semidefinite (lambda_min " << op.lambda_min_ << ")";
    throw PreconditionError(os.str());
  }
  op.lambda_min_ = std::max(op.lambda_min_, 0.0);
  const Vector root = lam.cwiseMax(0.0).cwiseSqrt();
  const Matrix& Q = eig.eigenvectors();
  op.sqrt_ = Q * root.asDiagonal() * Q.transpose();
  op.sqrt_ = 0.5 * (op.sqrt_ + op.sqrt_.transpose()).eval();
  return op;
}

WeightOperator WeightOperator::scaled(double c) const {
  if (kind_ == Kind::diagonal) return diagonal(c * matrix_.diagonal(), eig_floor_);
  return dense(c * matrix_, eig_floor_);
}

RegularizerSpec RegularizerSpec::identity_scaled(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw PreconditionError("identity_scaled regularizer requires finite rho > 0");
  return RegularizerSpec(IdentityScaled{rho});
}

RegularizerSpec RegularizerSpec::dense(Matrix T) {
  if (T.rows() < 1 || T.cols() < 1) throw DimensionError("dense regularizer must be non-empty");
  if (!all_finite(T)) throw PreconditionError("regularizer has non-finite entries");
  return RegularizerSpec(Dense{std::move(T)});
}

double RegularizerSpec::rho() const {
  if (const auto* s = std::get_if<IdentityScaled>(&value_)) return s->rho;
  throw PreconditionError("regularizer is not identity_scaled");
}

const Matrix& RegularizerSpec::dense_matrix() const {
  if (const auto* d = std::get_if<Dense>(&value_)) return d->T;
  throw PreconditionError("regularizer is not dense");
}

Vector RegularizerSpec::apply(const Vector& x) const {
  if (const auto* s = std::get_if<IdentityScaled>(&value_)) return std::sqrt(s->rho) * x;
  const Matrix& T = std::get<Dense>(value_).T;
  detail::require_dims(T.cols() == x.size(), "regularizer columns vs x");
  return T * x;
}

double RegularizerSpec::norm_sq(const Vector& x) const {
  if (const auto* s = std::get_if<IdentityScaled>(&value_)) return s->rho * x.squaredNorm();
  return apply(x).squaredNorm();
}

Matrix RegularizerSpec::gram(Eigen::Index n) const {
  if (const auto* s = std::get_if<IdentityScaled>(&value_))
    return s->rho * Matrix::Identity(n, n);
  const Matrix& T = std::get<Dense>(value_).T;
  detail::require_dims(T.cols() == n, "regularizer columns vs n");
  return T.transpose() * T;
}

Matrix RegularizerSpec::as_dense(Eigen::Index n) const {
  if (const auto* s = std::get_if<IdentityScaled>(&value_))
    return std::sqrt(s->rho) * Matrix::Identity(n, n);
  const Matrix& T = std::get<Dense>(value_).T;
  detail::require_dims(T.cols() == n, "regularizer columns vs n");
  return T;
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::diagonal: return "diagonal";
    case ModelKind::integral: return "integral";
    case ModelKind::dense: return "dense";
  }
  return "dense";
}

ProblemSpec::ProblemSpec(Matrix A, Vector b, WeightOperator W, RegularizerSpec T,
                         std::optional<Origin> origin)
    : A_(std::move(A)), b_(std::move(b)), W_(std::move(W)), T_(std::move(T)),
      origin_(origin) {
  if (A_.rows() < 1 || A_.cols() < 1) throw DimensionError("A must be at least 1 x 1");
  detail::require_dims(b_.size() == A_.rows(), "b has " + std::to_string(b_.size()) +
                                                   " entries, A has " +
                                                   std::to_string(A_.rows()) + " rows");
  detail::require_dims(W_.dim() == A_.rows(), "W acts on dimension " +
                                                  std::to_string(W_.dim()) + ", A has " +
                                                  std::to_string(A_.rows()) + " rows");
  if (!T_.is_identity_scaled())
    detail::require_dims(T_.dense_matrix().cols() == A_.cols(),
                         "T has " + std::to_string(T_.dense_matrix().cols()) +
                             " columns, A has " + std::to_string(A_.cols()));
  if (!A_.allFinite()) throw PreconditionError("A has non-finite entries");
  if (!b_.allFinite()) throw PreconditionError("b has non-finite entries");
  if (origin_ && origin_->truncation_order < 1)
    throw PreconditionError("origin.truncation_order must be positive");
}

double ProblemSpec::b_norm_sq() const { return (W_.sqrt() * b_).squaredNorm(); }

ProblemSpec ProblemSpec::with_regularizer(RegularizerSpec T) const {
  return ProblemSpec(A_, b_, W_, std::move(T), origin_);
}

ProblemSpec ProblemSpec::with_weight(WeightOperator W) const {
  return ProblemSpec(A_, b_, std::move(W), T_, origin_);
}

}  // namespace wtls
