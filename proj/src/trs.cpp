#include "wtls/trs.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>

#include "wtls/errors.hpp"

namespace wtls {
namespace {

constexpr int kMaxSecularIterations = 200;

}  // namespace

SphereQuadratic::SphereQuadratic(const Matrix& S, const Vector& c) : c_(c) {
  if (S.rows() != S.cols() || S.rows() != c.size() || c.size() < 1)
    throw DimensionError("dimension mismatch: sphere quadratic needs square S matching c");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (S + S.transpose()));
  lambda_ = eig.eigenvalues();
  Q_ = eig.eigenvectors();
  gamma_ = Q_.transpose() * c_;

  const Eigen::Index n = lambda_.size();
  const double eig_tol = 1e-12 * std::max(1.0, std::abs(lambda_(n - 1)));
  min_mult_ = 1;
  while (min_mult_ < n && lambda_(min_mult_) - lambda_(0) <= eig_tol) ++min_mult_;

  const double g_min = gamma_.head(min_mult_).norm();
  if (g_min <= 1e-12 * std::max(gamma_.norm(), std::numeric_limits<double>::min())) {
    double sq = 0.0;
    for (Eigen::Index i = min_mult_; i < n; ++i) {
      const double d = lambda_(i) - lambda_(0);
      sq += gamma_(i) * gamma_(i) / (d * d);
    }
    hard_radius_ = std::sqrt(sq);
  } else {
    hard_radius_ = std::numeric_limits<double>::infinity();
  }
}

TrsSolution trs_equality(const SphereQuadratic& q, double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw PreconditionError("sphere radius must be finite and >= 0");
  const Eigen::Index n = q.dim();
  const Vector& lam = q.eigenvalues();
  const Vector& g = q.gamma();
  const Eigen::Index mult = q.min_multiplicity();
  const bool hard_candidate = std::isfinite(q.hard_case_radius());

  TrsSolution out;
  out.r = r;
  if (r == 0.0) {
    out.x = Vector::Zero(n);
    out.lambda = std::numeric_limits<double>::infinity();
    return out;
  }

  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = lam(i) - lam(0);
  // Components of c in the minimal eigenspace are dropped in the hard-case candidate.
  Vector coef = g;
  if (hard_candidate) coef.head(mult).setZero();

  if (hard_candidate && r > q.hard_case_radius()) {
    Vector y = Vector::Zero(n);
    for (Eigen::Index i = mult; i < n; ++i) y(i) = coef(i) / d(i);
    y(0) = std::sqrt(std::max(r * r - y.squaredNorm(), 0.0));
    out.x = q.eigenvectors() * y;
    out.lambda = -lam(0);
    out.hard_case = true;
    return out;
  }

  // Solve 1/|x(delta)| = 1/r for delta = lambda + lambda_min > 0.
  auto norm_at = [&](double delta) {
    double sq = 0.0;
    double cube = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (coef(i) == 0.0) continue;
      const double den = d(i) + delta;
      const double t = coef(i) * coef(i) / (den * den);
      sq += t;
      cube += t / den;
    }
    return std::pair<double, double>{std::sqrt(sq), cube};
  };

  double lo = hard_candidate ? 0.0 : coef.head(mult).norm() / r;
  double hi = coef.norm() / r;
  if (!(hi >= lo)) {
    std::ostringstream os;
    os << "secular equation not bracketed (lo=" << lo << ", hi=" << hi << ", r=" << r << ")";
    throw NumericalError(os.str());
  }

  double delta = lo;
  for (int it = 0; it < kMaxSecularIterations; ++it) {
    const auto [N, cube] = norm_at(delta);
    if (std::abs(N - r) <= 1e-15 * (1.0 + r)) break;
    if (N > r)
      lo = delta;
    else
      hi = delta;
    if (hi - lo <= 1e-17 * std::max(hi, 1e-300)) break;
    // f(delta) = 1/N - 1/r is increasing and concave in delta.
    const double f = 1.0 / N - 1.0 / r;
    const double fp = cube / (N * N * N);
    double next = (fp > 0.0 && std::isfinite(fp)) ? delta - f / fp : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == delta) break;
    delta = next;
  }

  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = coef(i) == 0.0 ? 0.0 : coef(i) / (d(i) + delta);
  const double yn = y.norm();
  if (yn > 0.0) y *= r / yn;
  out.x = q.eigenvectors() * y;
  out.lambda = delta - lam(0);
  return out;
}

TrsSolution trs_equality(const Matrix& S, const Vector& c, double r) {
  return trs_equality(SphereQuadratic(S, c), r);
}

}  // namespace wtls
