#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "wtls/errors.hpp"
#include "wtls/lab.hpp"
#include "wtls/reduction.hpp"

using namespace wtls;
using namespace wtls::lab;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("sequence rules") {
  CHECK(SequenceRule::parse("1/k").at(4) == doctest::Approx(0.25));
  CHECK(SequenceRule::parse("1/k^2").at(3) == doctest::Approx(1.0 / 9));
  CHECK(SequenceRule::parse("2/k^0.5").at(4) == doctest::Approx(1.0));
  CHECK(SequenceRule::parse("k^-3").at(2) == doctest::Approx(0.125));
  CHECK(SequenceRule::parse("0").at(7) == 0.0);
  CHECK(SequenceRule::parse("1.5").at(7) == 1.5);
  CHECK_THROWS_AS(SequenceRule::parse("sin(k)"), ParseError);
  const auto l = SequenceRule::list({1, 0.5});
  CHECK(l.at(2) == 0.5);
  CHECK(l.at(3) == 0.0);
  CHECK(l.support() == 2);
  CHECK(SequenceRule::power(1, 1).support() == -1);
  CHECK_THROWS_AS(l.at(0), PreconditionError);
}

TEST_CASE("diagonal model build") {
  const auto m = default_nonexistence_model();
  const auto p = m.build(5);
  CHECK(p.rows() == 10);
  CHECK(p.cols() == 5);
  CHECK(p.A()(2, 2) == doctest::Approx(1.0 / 3));
  CHECK(p.W().matrix()(9, 9) == doctest::Approx(0.01));
  CHECK(p.b()(9) == doctest::Approx(0.1));
  CHECK_FALSE(p.T().is_identity_scaled());
  CHECK(p.T().dense_matrix()(4, 4) == doctest::Approx(1.0 / 25));
  REQUIRE(p.origin().has_value());
  CHECK(p.origin()->model_kind == ModelKind::diagonal);
  CHECK(p.origin()->truncation_order == 5);
}

TEST_CASE("integral model build") {
  IntegralModel m;
  m.kernel = IntegralModel::Kernel::cosine_demo;
  m.grid = 129;
  const auto p = m.build(8);
  CHECK(p.cols() == 8);
  // k(s, t) = (2 + cos s)(2 - cos t) is rank one.
  Eigen::JacobiSVD<Matrix> svd(p.A());
  CHECK(svd.singularValues()(1) <= 1e-10 * svd.singularValues()(0));
  m.grid = 21;
  CHECK_THROWS_AS(m.build(8), PreconditionError);
  IntegralModel g;
  const auto pg = g.build(6);
  CHECK((pg.A() - pg.A().transpose()).norm() <= 1e-12 * pg.A().norm());
  CHECK(IntegralModel::parse_kernel("named:gaussian") == IntegralModel::Kernel::gaussian);
  CHECK_THROWS_AS(IntegralModel::parse_kernel("named:bessel"), ParseError);
}

TEST_CASE("Simpson rule") {
  CHECK(composite_simpson([](double t) { return t * t * t; }, 0.0, 2.0, 3) == doctest::Approx(4.0));
  CHECK_THROWS_AS(composite_simpson([](double) { return 1.0; }, 0.0, 1.0, 4), PreconditionError);
}

TEST_CASE("TLS nonexistence sequence") {
  SUBCASE("square diagonal model with b = e1 is trivial and refused") {
    DiagonalModel m;
    m.b = SequenceRule::list({1.0});
    const auto p = m.build(100);
    CHECK(is_trivial_tls(p, 1e-10).trivial);
    CHECK_THROWS_AS(nonexistence_tls_sequence(p, {0.01}), PreconditionError);
  }
  SUBCASE("consistent instance refused") {
    std::mt19937_64 rng(501);
    const Matrix A = oracle::random_matrix(rng, 3, 3);
    ProblemSpec p(A, A * Vector::Ones(3), WeightOperator::identity(3), RegularizerSpec::identity_scaled(1.0));
    CHECK_THROWS_AS(nonexistence_tls_sequence(p, {0.1}), PreconditionError);
  }
  SUBCASE("default model") {
    const auto p = default_nonexistence_model().build(200);
    CHECK_FALSE(is_trivial_tls(p, 1e-10).trivial);
    const double nb = std::sqrt(oracle::w_quad(p.W().matrix(), p.b()));
    std::vector<double> eps{0.1, 0.05, 0.025, 0.0125, 1e-3, 1e-4};
    const auto seq = nonexistence_tls_sequence(p, eps);
    REQUIRE(seq.points.size() == eps.size());
    for (std::size_t i = 0; i < seq.points.size(); ++i) {
      const auto& pt = seq.points[i];
      CHECK(pt.bound == doctest::Approx(pt.eps * pt.eps * (nb + 1) * (nb + 1)));
      CHECK(pt.objective <= pt.bound * (1 + 1e-8));
      CHECK(pt.interpolation_residual <= 1e-12);
      if (i > 0 && i < 4) CHECK(pt.objective <= 0.3 * seq.points[i - 1].objective);
    }
  }
  SUBCASE("unavailable when bounded below") {
    ProblemSpec q(Matrix::Identity(3, 2), vec({1, 1, 1}), WeightOperator::identity(3),
                  RegularizerSpec::identity_scaled(1.0));
    CHECK_THROWS_AS(nonexistence_tls_sequence(q, {0.5}), PreconditionError);
  }
}

TEST_CASE("RTLS nonexistence sequence") {
  SUBCASE("square diagonal model with decaying T") {
    DiagonalModel m;
    m.b = SequenceRule::list({1.0});
    m.T = SequenceRule::power(1.0, 2.0);
    const auto p = m.build(200);
    CHECK_FALSE(is_trivial_rtls(p, 1e-10).trivial);
    const auto seq = nonexistence_rtls_sequence(p, {0.1});
    REQUIRE(seq.points.size() == 1);
    const auto& pt = seq.points[0];
    // |W^{1/2} b| = 1, so the bound is 0.01 (1 + (1 + 0.01)^2) = 0.020201.
    CHECK(pt.bound == doctest::Approx(0.020201));
    CHECK(pt.objective <= pt.bound);
    CHECK(pt.t_norm <= pt.m_norm + 1e-15);
    CHECK(pt.wa_norm <= pt.m_norm + 1e-15);
    CHECK(pt.interpolation_residual <= 1e-12);
  }
  SUBCASE("scaled identity regularizer refuses") {
    std::mt19937_64 rng(503);
    ProblemSpec p(oracle::random_matrix(rng, 3, 3), oracle::random_vector(rng, 3), WeightOperator::identity(3),
                  RegularizerSpec::identity_scaled(0.01));
    CHECK_THROWS_AS(nonexistence_rtls_sequence(p, {0.1, 0.05}), PreconditionError);
  }
  SUBCASE("default model decays with eps and skips what the truncation cannot reach") {
    const auto p = default_nonexistence_model().build(200);
    const auto seq = nonexistence_rtls_sequence(p, {0.1, 0.03, 0.01, 1e-3, 1e-4});
    CHECK(seq.points.size() == 3);
    CHECK(seq.skipped.size() == 2);
    CHECK(seq.min_value == doctest::Approx(std::sqrt(2.0) / (200.0 * 200.0)).epsilon(1e-8));
    for (std::size_t i = 0; i < seq.points.size(); ++i) {
      CHECK(seq.points[i].objective <= seq.points[i].bound);
      CHECK(seq.points[i].objective <= seq.points[i].bound_rigorous);
      if (i > 0) CHECK(seq.points[i].objective < seq.points[i - 1].objective);
    }
  }
}

TEST_CASE("diagonal example") {
  SUBCASE("zero data") {
    const auto r = diagonal_solve(vec({1, 1}), vec({1, 1}), vec({0, 0}), 1.0, 4);
    CHECK(r.outcome.report.x.norm() == 0.0);
  }
  SUBCASE("all w_j a_j nonzero: no tail mass") {
    const auto r = diagonal_solve(vec({1, 1}), vec({1, 1}), vec({1, 0}), 2.0, 6);
    CHECK(r.outcome.report.status == PairStatus::solved);
    REQUIRE(r.outcome.existence.has_value());
    CHECK(*r.outcome.existence == Existence::unique_solution);
    CHECK(r.audit.tail_mass_ratio <= 1e-8);
    CHECK(r.audit.critical_ok);
    // Grid oracle over (alpha1, alpha2, |s|) for h.
    double best = 1e300;
    for (int i = 0; i <= 200; ++i)
      for (int j = -20; j <= 20; ++j)
        for (int k = 0; k <= 20; ++k) {
          const Vector al = vec({i * 0.005, j * 0.005});
          best = std::min(best, h_value(vec({1, 1}), vec({1, 1}), vec({1, 0}), 2.0, al, k * 0.01));
        }
    CHECK(r.audit.h_star <= best + 1e-9);
    CHECK(r.audit.h_star == doctest::Approx(best).epsilon(1e-3));
  }
  SUBCASE("C nonempty: rebalancing keeps h") {
    const Vector a = vec({0, 1}), w = vec({1, 1}), b = vec({1, 2});
    const auto r = diagonal_solve(a, w, b, 0.1, 5);
    CHECK(r.audit.c_indices == std::vector<int>{0});
    REQUIRE(r.audit.h_rebalanced.has_value());
    CHECK(std::abs(*r.audit.h_rebalanced - r.audit.h_star) <= 1e-10 * std::max(1.0, r.audit.h_star));
    // Hand-built point alpha* = (1, 2), |s*| = 2 moves to alpha_hat = (sqrt(5), 2).
    const Vector alpha = vec({1, 2});
    const Vector hat = rebalance_onto(a, w, alpha, 2.0, 0);
    CHECK(hat(0) == doctest::Approx(std::sqrt(5.0)));
    CHECK(hat(1) == doctest::Approx(2.0));
    CHECK(h_value(a, w, b, 0.1, hat, 0.0) == doctest::Approx(h_value(a, w, b, 0.1, alpha, 2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(rebalance_onto(a, w, alpha, 2.0, 1), PreconditionError);
  }
  SUBCASE("agrees with the plain solver") {
    const auto r = diagonal_solve(vec({1, 0.5}), vec({1, 0.25}), vec({0.8}), 1.0, 5);
    Vector a = Vector::Zero(5), w = Vector::Zero(5), b = Vector::Zero(5);
    a.head(2) << 1, 0.5;
    w.head(2) << 1, 0.25;
    b(0) = 0.8;
    ProblemSpec p(Matrix(a.asDiagonal()), b, WeightOperator::diagonal(w), RegularizerSpec::identity_scaled(1.0));
    const auto direct = solve_rtls(p);
    CHECK(r.outcome.report.objective == doctest::Approx(direct.report.objective).epsilon(1e-12));
  }
}

TEST_CASE("truncation sweeps") {
  SUBCASE("finitely supported b gives constant t*") {
    DiagonalModel m;
    const auto rows = truncation_sweep(m, {4, 8, 16, 32}, 1.0);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].status == PairStatus::solved);
      CHECK(rows[i].existence == "unique_solution");
      if (i > 0) CHECK(std::abs(rows[i].t_star - rows[i - 1].t_star) <= 1e-8);
    }
  }
  SUBCASE("decaying regularizer: constructed objectives fall with N") {
    DiagonalModel m;
    m.T = SequenceRule::power(1.0, 2.0);
    const auto rows = truncation_sweep(m, {4, 8, 16, 32}, 1.0);
    double prev = 1e300;
    int with_points = 0;
    for (const auto& r : rows) {
      CHECK(std::isfinite(r.t_star));
      if (r.construction_objective) {
        ++with_points;
        CHECK(*r.construction_objective <= prev);
        prev = *r.construction_objective;
      }
    }
    CHECK(with_points >= 3);
  }
  SUBCASE("integral model") {
    IntegralModel m;
    m.grid = 129;
    const auto rows = truncation_sweep(m, {2, 4, 8}, 1.0);
    for (const auto& r : rows) CHECK(r.status == PairStatus::solved);
  }
  CHECK_THROWS_AS(truncation_sweep(DiagonalModel{}, {4, 4}, 1.0), PreconditionError);
}

TEST_CASE("weak continuity") {
  const auto t = weak_continuity_demo({1, 2, 8, 32}, 8193);
  CHECK(t.passed);
  for (const auto& r : t.rows) CHECK(std::abs(r.integral - 7 * std::numbers::pi) <= 1e-8);
  double spread = 0.0;
  for (const auto& r : t.rows) spread = std::max(spread, std::abs(r.integral - t.rows[0].integral));
  CHECK(spread <= 1e-10);
  CHECK(std::abs(t.limit_value - 8 * std::numbers::pi) <= 1e-12);
  // n = 1: 8 pi - [t/2 + sin(2t)/4] from 0 to 2 pi.
  const double antiderivative = 8 * std::numbers::pi - (std::numbers::pi + std::sin(4 * std::numbers::pi) / 4);
  CHECK(t.rows[0].integral == doctest::Approx(antiderivative).epsilon(1e-12));
  CHECK_THROWS_AS(weak_continuity_demo({32}, 1025), PreconditionError);
  CHECK_THROWS_AS(weak_continuity_demo({1}, 1000), PreconditionError);
}
