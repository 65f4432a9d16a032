#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <variant>

namespace wtls {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Positive semidefinite weight W on the data space, with W^{1/2} computed
/// once at construction.
///
/// Negative eigenvalues down to -eig_floor * lambda_max are treated as
/// round-off and clamped to zero before the square root is formed; anything
/// more negative is rejected.
class WeightOperator {
 public:
  enum class Kind { diagonal, dense };

  static constexpr double kDefaultEigFloor = 1e-12;

  static WeightOperator identity(Eigen::Index m);
  static WeightOperator diagonal(const Vector& w, double eig_floor = kDefaultEigFloor);
  static WeightOperator dense(const Matrix& w, double eig_floor = kDefaultEigFloor);

  Kind kind() const { return kind_; }
  Eigen::Index dim() const { return matrix_.rows(); }
  double eig_floor() const { return eig_floor_; }

  /// The weight as stored (symmetrized for dense input).
  const Matrix& matrix() const { return matrix_; }
  /// Diagonal entries for Kind::diagonal; the diagonal of the matrix otherwise.
  Vector diagonal_entries() const { return matrix_.diagonal(); }
  const Matrix& sqrt() const { return sqrt_; }

  double lambda_min() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }

  WeightOperator scaled(double c) const;

 private:
  WeightOperator() = default;

  Kind kind_ = Kind::diagonal;
  Matrix matrix_;
  Matrix sqrt_;
  double eig_floor_ = kDefaultEigFloor;
  double lambda_min_ = 0.0;
  double lambda_max_ = 0.0;
};

/// Tikhonov term ||T x||^2. identity_scaled stores rho, so T = sqrt(rho) I.
class RegularizerSpec {
 public:
  struct IdentityScaled {
    double rho;
  };
  struct Dense {
    Matrix T;
  };

  static RegularizerSpec identity_scaled(double rho);
  static RegularizerSpec dense(Matrix T);

  bool is_identity_scaled() const { return std::holds_alternative<IdentityScaled>(value_); }
  /// rho for identity_scaled; throws PreconditionError for dense.
  double rho() const;
  /// The p x n matrix for dense; throws PreconditionError for identity_scaled.
  const Matrix& dense_matrix() const;

  Vector apply(const Vector& x) const;
  double norm_sq(const Vector& x) const;
  /// T^T T as an n x n matrix.
  Matrix gram(Eigen::Index n) const;
  /// The regularizer written as a dense matrix acting on R^n.
  Matrix as_dense(Eigen::Index n) const;

 private:
  explicit RegularizerSpec(std::variant<IdentityScaled, Dense> v) : value_(std::move(v)) {}
  std::variant<IdentityScaled, Dense> value_;
};

enum class ModelKind { diagonal, integral, dense };

std::string to_string(ModelKind kind);

/// Records which infinite-dimensional model a finite instance truncates.
struct Origin {
  ModelKind model_kind = ModelKind::dense;
  int truncation_order = 1;
};

/// A finite-dimensional (R)WTLS instance.
///
/// Invariants: A is m x n with m, n >= 1, b has m entries, W acts on R^m,
/// the regularizer maps R^n, and every entry is finite. Checked in the
/// constructor.
class ProblemSpec {
 public:
  ProblemSpec(Matrix A, Vector b, WeightOperator W, RegularizerSpec T,
              std::optional<Origin> origin = std::nullopt);

  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  const WeightOperator& W() const { return W_; }
  const RegularizerSpec& T() const { return T_; }
  const std::optional<Origin>& origin() const { return origin_; }

  Eigen::Index rows() const { return A_.rows(); }
  Eigen::Index cols() const { return A_.cols(); }

  /// ||b||_W^2, which equals G(0).
  double b_norm_sq() const;

  ProblemSpec with_regularizer(RegularizerSpec T) const;
  ProblemSpec with_weight(WeightOperator W) const;

 private:
  Matrix A_;
  Vector b_;
  WeightOperator W_;
  RegularizerSpec T_;
  std::optional<Origin> origin_;
};

}  // namespace wtls
