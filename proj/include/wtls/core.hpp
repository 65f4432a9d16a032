#pragma once

#include <string>
#include <utility>

#include "wtls/problem.hpp"

namespace wtls {

/// ||z||_W = ||W^{1/2} z||.
double w_vec_seminorm(const WeightOperator& W, const Vector& z);

/// ||X||_{2,W} = ||W^{1/2} X||_F.
double w_hs_seminorm(const WeightOperator& W, const Matrix& X);

/// ||Tx||^2 + ||A - X||_{2,W}^2 + ||Xx - b||_W^2.
double objective_rtls(const ProblemSpec& p, const Matrix& X, const Vector& x);

/// ||A - X||_{2,W}^2 + ||Xx - b||_W^2. The regularizer of p is ignored.
double objective_tls(const ProblemSpec& p, const Matrix& X, const Vector& x);

/// Relative singular-value cutoff used for range and nullspace decisions.
inline constexpr double kRankCutoff = 1e-10;

struct TrivialityResult {
  bool trivial = false;
  /// Least-squares residual ||W^{1/2}(A x - b)|| at the witness.
  double residual = 0.0;
  /// Minimizer of the residual; meaningful as a zero-objective point when trivial.
  Vector witness;
};

/// b in R(A) + N(W), decided by weighted least squares with residual
/// threshold tol * (1 + ||W^{1/2} b||).
TrivialityResult is_trivial_tls(const ProblemSpec& p, double tol);

/// b in A(N(T)) + N(W). N(T) comes from an SVD of T with the relative
/// cutoff kRankCutoff.
TrivialityResult is_trivial_rtls(const ProblemSpec& p, double tol);

/// Orthonormal basis of N(T) in R^n (n x k, possibly k = 0).
Matrix regularizer_nullspace(const RegularizerSpec& T, Eigen::Index n);

struct FrechetErrors {
  double hs_term = 0.0;   ///< K(X) = ||W1^{1/2} X||_2^2
  double quad_term = 0.0; ///< k(X) = <W2 X x0, X x0>
};

/// Compares central differences of K and k along Y with the analytic
/// derivatives 2 tr(X^T W1 Y) and 2 <W2 X x0, Y x0>. Errors are relative to
/// the analytic value, or absolute when it is below 1e-8.
FrechetErrors frechet_check(const WeightOperator& W1, const WeightOperator& W2,
                            const Vector& x0, const Matrix& X, const Matrix& Y, double h);

/// X = A + correction * x^T, kept unmaterialized.
struct RankOneLift {
  Matrix base;
  Vector x;
  Vector correction;

  Matrix materialize() const { return base + correction * x.transpose(); }
  Vector apply(const Vector& v) const { return base * v + correction * x.dot(v); }
};

enum class PairStatus { solved, infimum_only, trivial, heuristic };

std::string to_string(PairStatus s);

struct PairReport {
  Vector x;
  RankOneLift lift;
  double objective = 0.0;
  double data_term = 0.0;
  double reg_term = 0.0;
  double residual_normal_eq = 0.0;
  double residual_rank_one = 0.0;
  /// ||A0^T W (A0 - A)||_F. Zero only when T^T T x0 = 0.
  double adjoint_norm = 0.0;
  /// ||A0^T W (A0 - A) - T^T T x0 x0^T||_F, which vanishes at solutions.
  double adjoint_gap = 0.0;
  PairStatus status = PairStatus::heuristic;
};

}  // namespace wtls
