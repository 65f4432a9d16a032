#include "wtls/certificate.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>

#include "wtls/errors.hpp"
#include "wtls/log.hpp"

namespace wtls {
namespace {

constexpr double kInvPhi = 0.6180339887498948482;
constexpr int kCoordinatePasses = 3;
constexpr int kBoxDoublings = 3;

struct LineMax {
  double arg;
  double value;
};

// Golden-section maximization of a concave function on [lo, hi].
template <typename F>
LineMax golden_max(F&& f, double lo, double hi) {
  LineMax best{lo, f(lo)};
  auto track = [&](double x) {
    const double v = f(x);
    if (v > best.value) best = {x, v};
    return v;
  };
  track(hi);
  double c = hi - kInvPhi * (hi - lo);
  double d = lo + kInvPhi * (hi - lo);
  double fc = track(c), fd = track(d);
  const double width = 1e-13 * std::max(hi - lo, 1.0);
  while (hi - lo > width) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = track(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = track(d);
    }
  }
  return best;
}

struct Blocks {
  Matrix S;  // A^T W A
  Vector v;  // A^T W b
  double b_norm_sq;
  double rho;
};

Blocks make_blocks(const ProblemSpec& p) {
  if (!p.T().is_identity_scaled())
    throw PreconditionError("the semidefinite characterization needs an identity_scaled regularizer");
  const Matrix& W = p.W().matrix();
  Matrix S = p.A().transpose() * W * p.A();
  S = 0.5 * (S + S.transpose()).eval();
  return {std::move(S), p.A().transpose() * (W * p.b()), p.b_norm_sq(), p.T().rho()};
}

Matrix assemble(const Blocks& bl, double t, double alpha, double beta) {
  const Eigen::Index n = bl.S.rows();
  const Eigen::Index tau = n + 2;
  Matrix C = Matrix::Zero(n + 3, n + 3);
  C.topLeftCorner(n, n) = alpha * bl.S + beta * Matrix::Identity(n, n);
  C.block(0, tau, n, 1) = -alpha * bl.v;
  C.block(tau, 0, 1, n) = -alpha * bl.v.transpose();
  C(n, tau) = C(tau, n) = 0.5 * (1.0 - alpha);
  C(n + 1, n + 1) = bl.rho;
  C(n + 1, tau) = C(tau, n + 1) = 0.5 * (bl.rho - t - beta);
  C(tau, tau) = alpha * bl.b_norm_sq - t;
  return C;
}

double min_eig(const Matrix& C) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(C, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

Certificate feasible_impl(const Blocks& bl, double t, const SearchBox& box) {
  auto lam = [&](double a, double b) { return min_eig(assemble(bl, t, a, b)); };

  double best_alpha = std::min(1.0, box.alpha_max);
  double best_beta = 0.0;
  double best_val = -std::numeric_limits<double>::infinity();

  const std::array<double, 3> alpha_starts{std::min(1.0, box.alpha_max), 0.5 * box.alpha_max,
                                           0.1 * box.alpha_max};
  for (std::size_t s = 0; s < alpha_starts.size(); ++s) {
    double alpha = alpha_starts[s];
    auto bline = golden_max([&](double b) { return lam(alpha, b); }, 0.0, box.beta_max);
    double beta = bline.arg;
    double val = bline.value;
    for (int pass = 0; pass < kCoordinatePasses; ++pass) {
      const double before = val;
      auto aline = golden_max([&](double a) { return lam(a, beta); }, 0.0, box.alpha_max);
      if (aline.value > val) {
        alpha = aline.arg;
        val = aline.value;
      }
      bline = golden_max([&](double b) { return lam(alpha, b); }, 0.0, box.beta_max);
      if (bline.value > val) {
        beta = bline.arg;
        val = bline.value;
      }
      if (val - before <= 1e-15 * (1.0 + std::abs(val))) break;
    }
    if (val > best_val) {
      best_val = val;
      best_alpha = alpha;
      best_beta = beta;
    }
    const Matrix C = assemble(bl, t, best_alpha, best_beta);
    // The warm start at alpha = 1 settles every feasible case.
    if (best_val >= -psd_tolerance(C)) break;
  }

  Certificate cert;
  cert.t = t;
  cert.alpha = best_alpha;
  cert.beta = best_beta;
  const Matrix C = assemble(bl, t, best_alpha, best_beta);
  cert.lambda_min = min_eig(C);
  cert.tol_psd = psd_tolerance(C);
  cert.feasible = cert.lambda_min >= -cert.tol_psd;
  return cert;
}

}  // namespace

Matrix assemble_C(const ProblemSpec& p, double t, double alpha, double beta) {
  if (alpha < 0.0 || beta < 0.0) throw PreconditionError("alpha and beta must be nonnegative");
  return assemble(make_blocks(p), t, alpha, beta);
}

double lambda_min_C(const ProblemSpec& p, double t, double alpha, double beta) {
  return min_eig(assemble_C(p, t, alpha, beta));
}

double psd_tolerance(const Matrix& C) { return 1e-9 * (1.0 + C.norm()); }

SearchBox default_search_box(const ProblemSpec& p) {
  const Blocks bl = make_blocks(p);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(bl.S, Eigen::EigenvaluesOnly);
  const double s_norm = std::max(std::abs(eig.eigenvalues().maxCoeff()), 0.0);
  const double m = std::max({1.0, bl.rho, bl.b_norm_sq, s_norm});
  return {10.0 * m, 10.0 * m};
}

Certificate feasible_at_t(const ProblemSpec& p, double t, const SearchBox& box) {
  if (!(box.alpha_max > 0.0) || !(box.beta_max > 0.0))
    throw PreconditionError("search box must be positive");
  return feasible_impl(make_blocks(p), t, box);
}

Certificate certify_tstar(const ProblemSpec& p, const CertifyOptions& opts) {
  const Blocks bl = make_blocks(p);
  const double B = bl.b_norm_sq;
  const double tol_t = opts.tol_t > 0.0 ? opts.tol_t : 1e-8 * (1.0 + B);
  SearchBox box = default_search_box(p);
  box.alpha_max *= opts.box_scale;
  box.beta_max *= opts.box_scale;

  auto attach = [&](Certificate c) {
    if (opts.keep_C) c.C = assemble(bl, c.t, c.alpha, c.beta);
    return c;
  };

  Certificate lo_cert = feasible_impl(bl, 0.0, box);
  for (int k = 0; !lo_cert.feasible && k < kBoxDoublings; ++k) {
    box.alpha_max *= 2.0;
    box.beta_max *= 2.0;
    log_info("t = 0 infeasible in search box; doubling");
    lo_cert = feasible_impl(bl, 0.0, box);
  }
  if (!lo_cert.feasible)
    throw NumericalError("search box exhausted: t = 0 not certified feasible");
  if (B <= 0.0) return attach(lo_cert);

  const Certificate top = feasible_impl(bl, B, box);
  if (top.feasible) return attach(top);

  double lo = 0.0, hi = B;
  while (hi - lo > tol_t) {
    const double mid = 0.5 * (lo + hi);
    Certificate c = feasible_impl(bl, mid, box);
    if (c.feasible) {
      lo = mid;
      lo_cert = std::move(c);
    } else {
      hi = mid;
    }
  }
  return attach(lo_cert);
}

}  // namespace wtls
