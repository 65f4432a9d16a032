#pragma once

#include <Eigen/Core>

namespace wtls {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Eigendecomposition of a symmetric PSD quadratic S together with its
/// linear term c, reused across many sphere radii.
///
///   minimize <S x, x> - 2 <c, x>   subject to |x| = r
class SphereQuadratic {
 public:
  SphereQuadratic(const Matrix& S, const Vector& c);

  Eigen::Index dim() const { return c_.size(); }
  const Vector& eigenvalues() const { return lambda_; }
  const Matrix& eigenvectors() const { return Q_; }
  /// Linear term in the eigenbasis, Q^T c.
  const Vector& gamma() const { return gamma_; }
  double lambda_min() const { return lambda_(0); }

  /// Indices whose eigenvalue lies in the minimal eigenspace.
  Eigen::Index min_multiplicity() const { return min_mult_; }
  /// Norm of the solution on the boundary of the hard case, i.e.
  /// |(S - lambda_min I)^+ c|, or +inf when c has weight in the minimal eigenspace.
  double hard_case_radius() const { return hard_radius_; }

 private:
  Matrix Q_;
  Vector lambda_;
  Vector c_;
  Vector gamma_;
  Eigen::Index min_mult_ = 1;
  double hard_radius_ = 0.0;
};

struct TrsSolution {
  double r = 0.0;
  Vector x;
  /// Multiplier with (S + lambda I) x = c and lambda >= -lambda_min(S).
  double lambda = 0.0;
  bool hard_case = false;
};

/// Global minimizer of <Sx, x> - 2<c, x> over the sphere |x| = r, via the
/// secular equation sum_i gamma_i^2 / (lambda_i + lambda)^2 = r^2. When c has
/// no weight in the minimal eigenspace and the secular root would fall below
/// -lambda_min, the solution picks up a component along the first minimal
/// eigenvector. r = 0 returns x = 0.
TrsSolution trs_equality(const SphereQuadratic& q, double r);

/// Convenience overload that decomposes S on every call.
TrsSolution trs_equality(const Matrix& S, const Vector& c, double r);

}  // namespace wtls
