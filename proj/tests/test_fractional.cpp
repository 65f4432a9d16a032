#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wtls/errors.hpp"
#include "wtls/fractional.hpp"
#include "wtls/reduction.hpp"

using namespace wtls;

namespace {

ProblemSpec closed_form(double rho = 1.0) {
  Vector b(2);
  b << 3, 4;
  return ProblemSpec(Matrix::Zero(2, 2), b, WeightOperator::identity(2), RegularizerSpec::identity_scaled(rho));
}

struct Instance {
  Matrix A;
  Vector b;
  Matrix W;
  double rho;
  ProblemSpec p;
};

Instance random_instance(std::mt19937_64& rng, int n, double rho_scale) {
  Matrix A = oracle::random_matrix(rng, n, n);
  Vector b = oracle::random_vector(rng, n);
  Matrix W = oracle::random_psd(rng, n);
  const double B = oracle::w_quad(W, b);
  const double rho = rho_scale * B * oracle::uniform(rng, 1.0, 2.0);
  ProblemSpec p(A, b, WeightOperator::dense(W), RegularizerSpec::identity_scaled(rho));
  return {A, b, W, rho, std::move(p)};
}

}  // namespace

TEST_CASE("phi on the closed-form instance") {
  const auto p = closed_form();
  // 25 + r^4 - 8 r^2 - 9 = (r^2 - 4)^2 is minimized at r^2 = 4 with value 0.
  const auto v = eval_phi(p, 9.0);
  CHECK(std::abs(v.phi) <= 1e-9);
  CHECK(v.x.squaredNorm() == doctest::Approx(4.0).epsilon(1e-6));
  CHECK_THROWS_AS(eval_phi(ProblemSpec(Matrix::Zero(2, 2), Vector::Ones(2), WeightOperator::identity(2),
                                       RegularizerSpec::dense(Matrix::Identity(2, 2))),
                           1.0),
                  PreconditionError);
}

TEST_CASE("phi is nonincreasing") {
  std::mt19937_64 rng(201);
  for (int trial = 0; trial < 5; ++trial) {
    auto inst = random_instance(rng, 3, trial % 2 == 0 ? 1.0 : 0.1);
    const SphericalReduction red(inst.p);
    const double B = red.b_norm_sq();
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 50; ++i) {
      const double t = -0.5 * B + 2.0 * B * i / 49.0;
      const double phi = eval_phi(red, inst.rho, t).phi;
      CHECK(phi <= prev + 1e-10 * (1 + std::abs(prev)));
      prev = phi;
    }
  }
}

TEST_CASE("Dinkelbach on fixed instances") {
  SUBCASE("zero data") {
    ProblemSpec p(Matrix::Identity(2, 2), Vector::Zero(2), WeightOperator::identity(2),
                  RegularizerSpec::identity_scaled(1.0));
    const auto tr = solve_tstar(p);
    CHECK(tr.t_star == 0.0);
    CHECK(tr.x_star.norm() == 0.0);
    CHECK(classify_existence(p, tr) == Existence::trivial);
    const auto q = solve_rls_quartic(p);
    CHECK(q.a_star == 0.0);
    CHECK(q.x.norm() == 0.0);
  }
  SUBCASE("closed form") {
    const auto p = closed_form();
    const double frozen_t = 9.0;
    CHECK(oracle::closed_form_tstar(25.0, 1.0) == doctest::Approx(frozen_t));
    const auto tr = solve_tstar(p);
    CHECK(tr.found_root());
    CHECK(tr.t_star == doctest::Approx(frozen_t).epsilon(1e-7));
    CHECK(tr.x_star.squaredNorm() == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(std::abs(tr.phi_star) <= tr.tol_phi);
    CHECK(tr.verdict == TraceVerdict::nonconvex_inner_flagged);
    CHECK(classify_existence(p, tr) == Existence::not_certified);
    const auto out = solve_rtls(p);
    CHECK(out.report.status == PairStatus::heuristic);
    CHECK(out.report.objective == doctest::Approx(9.0).epsilon(1e-9));
  }
  SUBCASE("iterates decrease from G(0)") {
    const auto tr = solve_tstar(closed_form());
    REQUIRE(!tr.iterates.empty());
    CHECK(tr.iterates.front().t == doctest::Approx(25.0));
    for (std::size_t k = 1; k < tr.iterates.size(); ++k)
      if (!tr.iterates[k].bisection) CHECK(tr.iterates[k].t <= tr.iterates[k - 1].t + 1e-12);
  }
  SUBCASE("large rho certifies a unique solution") {
    const auto p = closed_form(30.0);
    const auto tr = solve_tstar(p);
    CHECK(tr.t_star == doctest::Approx(25.0));
    CHECK(classify_existence(p, tr) == Existence::unique_solution);
    CHECK(solve_rtls(p).report.status == PairStatus::solved);
  }
}

TEST_CASE("Dinkelbach against the radial grid oracle") {
  std::mt19937_64 rng(203);
  for (int trial = 0; trial < 4; ++trial) {
    auto inst = random_instance(rng, 5, 1.0);
    const double B = oracle::w_quad(inst.W, inst.b);
    const double ref = oracle::grid_tstar(inst.A, inst.b, inst.W, inst.rho, std::sqrt(B / inst.rho) * 1.01);
    const auto tr = solve_tstar(inst.p);
    CHECK(std::abs(tr.t_star - ref) <= 1e-6);
    CHECK(tr.t_star <= B + 1e-9);
    CHECK(std::abs(eval_G(inst.p, tr.x_star).g - tr.t_star) <= 10 * tr.tol_phi);
    // A second run on a different grid lands on the same minimizer.
    SolverOptions other;
    other.grid = 1500;
    const auto tr2 = solve_tstar(inst.p, other);
    CHECK((tr.x_star - tr2.x_star).norm() <= 1e-6);
  }
}

TEST_CASE("minimizer equivalence and rho < t* regime") {
  std::mt19937_64 rng(207);
  for (int trial = 0; trial < 4; ++trial) {
    auto inst = random_instance(rng, 3, 0.05);
    const double B = oracle::w_quad(inst.W, inst.b);
    const auto tr = solve_tstar(inst.p);
    CHECK(tr.found_root());
    const double ref = oracle::grid_tstar(inst.A, inst.b, inst.W, inst.rho, 1.05 * std::sqrt(B / inst.rho));
    CHECK(std::abs(tr.t_star - ref) <= 1e-6);
    const auto v = eval_phi(inst.p, tr.t_star);
    CHECK(std::abs(eval_G(inst.p, v.x).g - ref) <= 1e-6);
  }
}

TEST_CASE("convexity of the inner objective for t <= rho") {
  std::mt19937_64 rng(211);
  auto inst = random_instance(rng, 3, 1.0);
  const double t = 0.5 * inst.rho;
  const auto v = eval_phi(inst.p, t);
  auto inner = [&](const Vector& x) {
    const double r2 = x.squaredNorm();
    return oracle::w_quad(inst.W, inst.A * x - inst.b) + inst.rho * r2 * r2 + (inst.rho - t) * r2 - t;
  };
  for (int k = 0; k < 20; ++k) {
    const Vector d = oracle::random_vector(rng, 3).normalized();
    const double h = 1e-3;
    const double second = inner(v.x + h * d) - 2 * inner(v.x) + inner(v.x - h * d);
    CHECK(second >= -1e-10);
  }
}

TEST_CASE("quartic regularized least squares") {
  SUBCASE("closed form keeps r = 0") {
    const auto q = solve_rls_quartic(closed_form());
    CHECK(q.a_star == doctest::Approx(25.0));
    CHECK(q.x.norm() <= 1e-9);
    CHECK_FALSE(q.certifies_unique);
  }
  SUBCASE("identity operator with heavy regularization") {
    Vector b(2);
    b << 1, 0;
    ProblemSpec p(Matrix::Identity(2, 2), b, WeightOperator::identity(2), RegularizerSpec::identity_scaled(100.0));
    const auto q = solve_rls_quartic(p);
    // min over alpha of (alpha - 1)^2 + 100 alpha^4 by a dense grid.
    double ref = 1.0;
    for (int i = 0; i <= 1000000; ++i) {
      const double a = i * 1e-6;
      ref = std::min(ref, (a - 1) * (a - 1) + 100 * a * a * a * a);
    }
    CHECK(q.a_star == doctest::Approx(ref).epsilon(1e-8));
    CHECK(q.a_star <= 1.0);
    CHECK(q.certifies_unique);
  }
}

TEST_CASE("general T heuristic") {
  SUBCASE("zero data") {
    ProblemSpec p(Matrix::Identity(2, 2), Vector::Zero(2), WeightOperator::identity(2),
                  RegularizerSpec::dense(Matrix::Identity(2, 2)));
    const auto r = solve_rtls_generalT(p, 4, 1);
    CHECK(r.x.norm() == 0.0);
    CHECK(r.objective == 0.0);
  }
  SUBCASE("scaled identity written densely agrees with Dinkelbach") {
    std::mt19937_64 rng(213);
    for (int trial = 0; trial < 5; ++trial) {
      auto inst = random_instance(rng, 4, 1.0);
      const auto tr = solve_tstar(inst.p);
      ProblemSpec dense(inst.A, inst.b, WeightOperator::dense(inst.W),
                        RegularizerSpec::dense(std::sqrt(inst.rho) * Matrix::Identity(4, 4)));
      const auto r = solve_rtls_generalT(dense, 8, 5);
      CHECK(r.objective == doctest::Approx(tr.t_star).epsilon(1e-6));
      CHECK(r.status == PairStatus::heuristic);
      CHECK(r.residual_normal_eq <= 1e-6);
    }
  }
  SUBCASE("dispatch uses the heuristic for dense T") {
    std::mt19937_64 rng(217);
    const Matrix A = oracle::random_matrix(rng, 3, 3);
    ProblemSpec p(A, oracle::random_vector(rng, 3), WeightOperator::identity(3),
                  RegularizerSpec::dense(oracle::random_matrix(rng, 2, 3)));
    const auto out = solve_rtls(p);
    CHECK_FALSE(out.trace.has_value());
    CHECK(out.report.status == PairStatus::heuristic);
  }
}

TEST_CASE("seeded runs are reproducible") {
  std::mt19937_64 rng(219);
  const Matrix A = oracle::random_matrix(rng, 3, 3);
  ProblemSpec p(A, oracle::random_vector(rng, 3), WeightOperator::identity(3),
                RegularizerSpec::dense(oracle::random_matrix(rng, 3, 3)));
  const auto a = solve_rtls_generalT(p, 6, 42);
  const auto b = solve_rtls_generalT(p, 6, 42);
  CHECK((a.x - b.x).norm() == 0.0);
}
