#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "wtls/problem.hpp"

namespace wtls {

/// Unweighted TLS solution read off the SVD of the augmented matrix (A | b).
struct ClassicTlsSolution {
  Matrix X;
  Vector x;
  /// Smallest singular value of (A | b).
  double sigma_min = 0.0;
  /// ||(A | b) - (X | X x)||_F^2, equal to sigma_min^2.
  double residual = 0.0;
};

class ClassicTlsError : public std::runtime_error {
 public:
  enum class Kind { nongeneric, repeated_sigma_min };

  ClassicTlsError(Kind kind, std::string msg, std::vector<Vector> candidates)
      : std::runtime_error(std::move(msg)), kind_(kind), candidates_(std::move(candidates)) {}

  Kind kind() const { return kind_; }
  /// Right singular vectors of (A | b) involved in the failure.
  const std::vector<Vector>& candidates() const { return candidates_; }

 private:
  Kind kind_;
  std::vector<Vector> candidates_;
};

/// Closed-form TLS: with v the right singular vector of sigma_min(A | b),
/// x = -v_{1..n} / v_{n+1} and X = A - sigma_min u v_{1..n}^T.
///
/// Throws ClassicTlsError when sigma_min is repeated (within 1e-10 relative)
/// or when v_{n+1} vanishes.
ClassicTlsSolution solve_classic_tls(const Matrix& A, const Vector& b);

struct MinDirection {
  Vector x;      ///< unit eigenvector of lambda_min(M)
  double value;  ///< ||M^{1/2} x|| = sqrt(lambda_min), clamped at 0
  double lambda_min;
  bool below_eps;  ///< value < eps
};

/// Unit direction where the PSD matrix M is smallest.
MinDirection min_direction(const Matrix& M, double eps);

}  // namespace wtls
