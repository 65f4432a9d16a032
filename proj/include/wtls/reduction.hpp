#pragma once

#include "wtls/core.hpp"

namespace wtls {

/// G(x) = ||Ax - b||_W^2 / (1 + ||x||^2) + ||Tx||^2, split into its terms.
struct GValue {
  Vector x;
  double g = 0.0;
  double data_term = 0.0;
  double reg_term = 0.0;
};

GValue eval_G(const ProblemSpec& p, const Vector& x);

/// Gradient of G:
///   [2 A^T W (Ax - b)(1 + |x|^2) - 2 |Ax - b|_W^2 x] / (1 + |x|^2)^2 + 2 T^T T x
Vector grad_G(const ProblemSpec& p, const Vector& x);

/// The minimizer of X -> F_x(X) for fixed x:
///   A_x = A + <., x> (b - Ax) / (1 + |x|^2).
RankOneLift lift_operator(const ProblemSpec& p, const Vector& x);

/// ||W (X - A) + W (X x - b) x^T||_F: stationarity of X -> F_x(X).
double lift_stationarity_residual(const ProblemSpec& p, const Matrix& X, const Vector& x);

struct IdentityPair {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;  ///< |lhs - rhs| / max(|lhs|, |rhs|); zero when both vanish
};

struct LiftIdentityReport {
  /// (1 + |x|^2)^2 ||A_x x - b||_W^2  vs  ||Ax - b||_W^2
  IdentityPair fit;
  /// ||A - A_x||_{2,W}^2  vs  |x|^2 ||A_x x - b||_W^2
  IdentityPair operator_gap;
  /// max_i |(A_x x - b)_i - ((Ax - b) / (1 + |x|^2))_i|
  double vector_identity = 0.0;
};

LiftIdentityReport verify_lift_identities(const ProblemSpec& p, const Vector& x);

/// Scaled residual of
///   (1 + |x|^2) T^T T x + A^T W (Ax - b) = (|Ax - b|_W^2 / (1 + |x|^2)) x,
/// divided by (1 + |x| + |A^T W b|). Vanishes at every minimizer of G.
double normal_residual(const ProblemSpec& p, const Vector& x);

/// Bundles x with its lift, G value and first-order residuals. The returned
/// status is heuristic; callers that certify x upgrade it.
PairReport recover_pair(const ProblemSpec& p, const Vector& x);

}  // namespace wtls
