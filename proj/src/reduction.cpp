#include "wtls/reduction.hpp"

#include <algorithm>
#include <cmath>

#include "wtls/errors.hpp"

namespace wtls {
namespace {

IdentityPair make_pair(double lhs, double rhs) {
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  return {lhs, rhs, scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0};
}

void check_x(const ProblemSpec& p, const Vector& x) {
  detail::require_dims(x.size() == p.cols(), "x has " + std::to_string(x.size()) +
                                                 " entries, A has " +
                                                 std::to_string(p.cols()) + " columns");
}

}  // namespace

GValue eval_G(const ProblemSpec& p, const Vector& x) {
  check_x(p, x);
  GValue out;
  out.x = x;
  const double r = w_vec_seminorm(p.W(), p.A() * x - p.b());
  out.data_term = r * r / (1.0 + x.squaredNorm());
  out.reg_term = p.T().norm_sq(x);
  out.g = out.data_term + out.reg_term;
  return out;
}

Vector grad_G(const ProblemSpec& p, const Vector& x) {
  check_x(p, x);
  const Vector res = p.A() * x - p.b();
  const Vector wres = p.W().matrix() * res;
  const double res_sq = res.dot(wres);
  const double d = 1.0 + x.squaredNorm();
  return (2.0 * p.A().transpose() * wres * d - 2.0 * res_sq * x) / (d * d) +
         2.0 * p.T().gram(p.cols()) * x;
}

RankOneLift lift_operator(const ProblemSpec& p, const Vector& x) {
  check_x(p, x);
  return {p.A(), x, (p.b() - p.A() * x) / (1.0 + x.squaredNorm())};
}

double lift_stationarity_residual(const ProblemSpec& p, const Matrix& X, const Vector& x) {
  const Matrix& W = p.W().matrix();
  return (W * (X - p.A()) + (W * (X * x - p.b())) * x.transpose()).norm();
}

LiftIdentityReport verify_lift_identities(const ProblemSpec& p, const Vector& x) {
  const RankOneLift lift = lift_operator(p, x);
  const double d = 1.0 + x.squaredNorm();
  const Vector lifted_res = lift.apply(x) - p.b();
  const Vector res = p.A() * x - p.b();
  const double lifted_sq = std::pow(w_vec_seminorm(p.W(), lifted_res), 2);

  LiftIdentityReport out;
  out.fit = make_pair(d * d * lifted_sq, std::pow(w_vec_seminorm(p.W(), res), 2));
  // A - A_x = -correction x^T, so its weighted HS norm is |W^{1/2} c| |x|.
  const double op_sq = std::pow(w_hs_seminorm(p.W(), p.A() - lift.materialize()), 2);
  out.operator_gap = make_pair(op_sq, x.squaredNorm() * lifted_sq);
  out.vector_identity = (lifted_res - res / d).cwiseAbs().maxCoeff();
  return out;
}

double normal_residual(const ProblemSpec& p, const Vector& x) {
  check_x(p, x);
  const Matrix& W = p.W().matrix();
  const Vector res = p.A() * x - p.b();
  const Vector wres = W * res;
  const double d = 1.0 + x.squaredNorm();
  const Vector lhs = d * (p.T().gram(p.cols()) * x) + p.A().transpose() * wres;
  const Vector rhs = (res.dot(wres) / d) * x;
  const double scale = 1.0 + x.norm() + (p.A().transpose() * (W * p.b())).norm();
  return (lhs - rhs).norm() / scale;
}

PairReport recover_pair(const ProblemSpec& p, const Vector& x) {
  const GValue g = eval_G(p, x);
  PairReport out;
  out.x = x;
  out.lift = lift_operator(p, x);
  out.objective = g.g;
  out.data_term = g.data_term;
  out.reg_term = g.reg_term;
  out.residual_normal_eq = normal_residual(p, x);

  const Matrix A0 = out.lift.materialize();
  const Matrix& W = p.W().matrix();
  // W A0 = W A - <., x> W (A0 x - b)
  out.residual_rank_one = (W * A0 - W * p.A() + (W * (A0 * x - p.b())) * x.transpose()).norm();
  const Matrix adjoint = A0.transpose() * W * (A0 - p.A());
  out.adjoint_norm = adjoint.norm();
  out.adjoint_gap = (adjoint - p.T().gram(p.cols()) * x * x.transpose()).norm();
  out.status = PairStatus::heuristic;
  return out;
}

}  // namespace wtls
