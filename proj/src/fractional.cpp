#include "wtls/fractional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "wtls/errors.hpp"
#include "wtls/log.hpp"
#include "wtls/reduction.hpp"

namespace wtls {
namespace {

constexpr double kInvPhi = 0.6180339887498948482;
constexpr int kMaxDoublings = 8;
constexpr int kStagnationLimit = 3;

double default_tol_phi(const ProblemSpec& p, double requested) {
  return requested > 0.0 ? requested : 1e-9 * (1.0 + p.b_norm_sq());
}

}  // namespace

SphericalReduction::SphericalReduction(const ProblemSpec& p)
    : sqrt_w_a_(p.W().sqrt() * p.A()),
      sqrt_w_b_(p.W().sqrt() * p.b()),
      b_norm_sq_(sqrt_w_b_.squaredNorm()),
      quad_(sqrt_w_a_.transpose() * sqrt_w_a_, sqrt_w_a_.transpose() * sqrt_w_b_) {}

double SphericalReduction::fit(const Vector& x) const {
  return (sqrt_w_a_ * x - sqrt_w_b_).squaredNorm();
}

TrsSolution SphericalReduction::sphere_fit(double r) const { return trs_equality(quad_, r); }

double SphericalReduction::objective(double r, const TrsSolution& s, double quartic,
                                     double quadratic) const {
  const double r2 = r * r;
  return fit(s.x) + quartic * r2 * r2 + quadratic * r2;
}

SphericalReduction::RadialMinimum SphericalReduction::minimize(double quartic, double quadratic,
                                                               int grid) const {
  if (!(quartic > 0.0)) throw PreconditionError("quartic coefficient must be positive");
  if (grid < 3) throw PreconditionError("radial grid needs at least 3 points");

  // Any minimizer beats x = 0, so quartic r^4 + quadratic r^2 <= ||b||_W^2.
  const double disc = quadratic * quadratic + 4.0 * quartic * b_norm_sq_;
  const double r2_bound = std::max((-quadratic + std::sqrt(disc)) / (2.0 * quartic), 0.0);
  double r_max = 1.05 * std::sqrt(r2_bound) + 1e-9;

  RadialMinimum best;
  for (int doubling = 0;; ++doubling) {
    best = RadialMinimum{};
    best.value = std::numeric_limits<double>::infinity();
    best.r_max = r_max;
    best.doublings = doubling;

    auto consider = [&](double r, const TrsSolution& s) {
      const double v = objective(r, s, quartic, quadratic);
      if (v < best.value) {
        best.value = v;
        best.r = r;
        best.x = s.x;
        best.lambda = s.lambda;
      }
      return v;
    };
    auto eval = [&](double r) { return consider(r, sphere_fit(r)); };

    const double step = r_max / (grid - 1);
    int best_i = 0;
    double best_grid = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i) {
      const double v = eval(step * i);
      if (v < best_grid) {
        best_grid = v;
        best_i = i;
      }
    }

    double a = step * std::max(best_i - 1, 0);
    double b = step * std::min(best_i + 1, grid - 1);

    // Golden-section refinement of the bracketing cell.
    {
      double lo = a, hi = b;
      double c = hi - kInvPhi * (hi - lo);
      double d = lo + kInvPhi * (hi - lo);
      double fc = eval(c), fd = eval(d);
      while (hi - lo > 1e-12 * r_max) {
        if (fc < fd) {
          hi = d;
          d = c;
          fd = fc;
          c = hi - kInvPhi * (hi - lo);
          fc = eval(c);
        } else {
          lo = c;
          c = d;
          fc = fd;
          d = lo + kInvPhi * (hi - lo);
          fd = eval(d);
        }
      }
    }

    // h'(r) = -2 r psi(r) with psi(r) = lambda(r) - 2 quartic r^2 - quadratic,
    // and lambda(r) is nonincreasing, so psi has at most one sign change.
    auto psi = [&](double r, TrsSolution* out) {
      TrsSolution s = sphere_fit(r);
      const double v = s.lambda - 2.0 * quartic * r * r - quadratic;
      if (out) *out = std::move(s);
      return v;
    };
    if (psi(a, nullptr) > 0.0 && psi(b, nullptr) < 0.0) {
      double lo = a, hi = b;
      for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi;
           ++it) {
        const double mid = 0.5 * (lo + hi);
        if (psi(mid, nullptr) > 0.0)
          lo = mid;
        else
          hi = mid;
      }
      TrsSolution s;
      const double r = 0.5 * (lo + hi);
      psi(r, &s);
      consider(r, s);
    }

    if (best.r < 0.99 * r_max || doubling >= kMaxDoublings) break;
    log_debug("radial minimizer at boundary, doubling r_max");
    r_max *= 2.0;
  }
  return best;
}

PhiValue eval_phi(const SphericalReduction& red, double rho, double t, int grid) {
  const auto m = red.minimize(rho, rho - t, grid);
  return {m.value - t, m.x};
}

PhiValue eval_phi(const ProblemSpec& p, double t, int grid) {
  if (!p.T().is_identity_scaled())
    throw PreconditionError("eval_phi requires an identity_scaled regularizer");
  return eval_phi(SphericalReduction(p), p.T().rho(), t, grid);
}

std::string to_string(TraceVerdict v) {
  switch (v) {
    case TraceVerdict::converged: return "converged";
    case TraceVerdict::max_iter: return "max_iter";
    case TraceVerdict::nonconvex_inner_flagged: return "nonconvex_inner_flagged";
  }
  return "max_iter";
}

std::string to_string(Existence e) {
  switch (e) {
    case Existence::unique_solution: return "unique_solution";
    case Existence::not_certified: return "not_certified";
    case Existence::trivial: return "trivial";
  }
  return "not_certified";
}

DinkelbachTrace solve_tstar(const ProblemSpec& p, const SolverOptions& opts) {
  if (!p.T().is_identity_scaled())
    throw PreconditionError("solve_tstar requires an identity_scaled regularizer");
  const double rho = p.T().rho();
  const SphericalReduction red(p);

  DinkelbachTrace trace;
  trace.rho = rho;
  trace.tol_phi = default_tol_phi(p, opts.tol_phi);
  const double tol = trace.tol_phi;

  auto G = [&](const Vector& x) { return eval_G(p, x).g; };
  auto record = [&](double t, const PhiValue& v, bool bisection) {
    trace.iterates.push_back({t, v.x.norm(), v.x, v.phi, bisection});
    log_debug("dinkelbach t=" + std::to_string(t) + " phi=" + std::to_string(v.phi));
  };
  auto finish = [&](const PhiValue& v) {
    trace.x_star = v.x;
    trace.t_star = G(v.x);
    trace.phi_star = v.phi;
    trace.verdict = trace.t_star > rho + tol ? TraceVerdict::nonconvex_inner_flagged
                                             : TraceVerdict::converged;
  };

  double t = red.b_norm_sq();
  int stagnant = 0;
  int it = 0;
  PhiValue last;
  for (; it < opts.max_iter; ++it) {
    last = eval_phi(red, rho, t, opts.grid);
    record(t, last, false);
    if (std::abs(last.phi) <= tol) {
      finish(last);
      return trace;
    }
    const double next = G(last.x);
    stagnant = next >= t ? stagnant + 1 : 0;
    if (stagnant >= kStagnationLimit) break;
    t = next;
  }

  if (stagnant >= kStagnationLimit) {
    // phi(0) >= 0 and phi is decreasing, so [0, t] brackets the root.
    double lo = 0.0, hi = t;
    for (; it < opts.max_iter; ++it) {
      const double mid = 0.5 * (lo + hi);
      last = eval_phi(red, rho, mid, opts.grid);
      record(mid, last, true);
      if (std::abs(last.phi) <= tol) {
        finish(last);
        return trace;
      }
      (last.phi > 0.0 ? lo : hi) = mid;
    }
  }

  trace.x_star = last.x.size() ? last.x : Vector::Zero(p.cols());
  trace.t_star = G(trace.x_star);
  trace.phi_star = last.phi;
  trace.verdict = TraceVerdict::max_iter;
  return trace;
}

Existence classify_existence(const ProblemSpec& p, const DinkelbachTrace& trace,
                             double triviality_tol) {
  if (!trace.found_root()) throw PreconditionError("classify_existence needs a converged trace");
  if (is_trivial_rtls(p, triviality_tol).trivial) return Existence::trivial;
  if (trace.rho >= trace.t_star - trace.tol_phi) return Existence::unique_solution;
  return Existence::not_certified;
}

QuarticResult solve_rls_quartic(const ProblemSpec& p, int grid) {
  if (!p.T().is_identity_scaled())
    throw PreconditionError("solve_rls_quartic requires an identity_scaled regularizer");
  const double rho = p.T().rho();
  const auto m = SphericalReduction(p).minimize(rho, 0.0, grid);
  return {m.value, m.x, m.value <= rho};
}

PairReport solve_rtls_generalT(const ProblemSpec& p, int starts, std::uint64_t seed) {
  const Eigen::Index n = p.cols();
  const Matrix gram = p.T().gram(n);
  auto G = [&](const Vector& x) { return eval_G(p, x).g; };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double reg_scale = std::max(gram.trace() / static_cast<double>(n), 1e-12);
  const double radius = std::sqrt(std::max(p.b_norm_sq(), 1.0) / reg_scale);

  Vector best_x = Vector::Zero(n);
  double best_g = G(best_x);

  for (int s = 0; s < std::max(starts, 1); ++s) {
    Vector x(n);
    if (s == 0) {
      x.setZero();
    } else {
      for (Eigen::Index i = 0; i < n; ++i) x(i) = normal(rng);
      x *= radius / std::sqrt(static_cast<double>(n));
    }
    double g = G(x);
    Vector grad = grad_G(p, x);
    double alpha = 1.0 / (1.0 + grad.norm());
    int flat = 0;
    for (int it = 0; it < 20000; ++it) {
      const double gn2 = grad.squaredNorm();
      if (std::sqrt(gn2) <= 1e-12 * (1.0 + g)) break;
      double step = alpha;
      Vector trial = x - step * grad;
      double gt = G(trial);
      int back = 0;
      while (gt > g - 1e-4 * step * gn2 && back < 60) {
        step *= 0.5;
        trial = x - step * grad;
        gt = G(trial);
        ++back;
      }
      if (back == 60) break;
      const Vector next_grad = grad_G(p, trial);
      const Vector sx = trial - x;
      const Vector sy = next_grad - grad;
      const double sty = sx.dot(sy);
      alpha = sty > 0.0 ? sx.squaredNorm() / sty : 2.0 * step;
      x = trial;
      grad = next_grad;
      flat = g - gt <= 1e-15 * (1.0 + std::abs(g)) ? flat + 1 : 0;
      g = gt;
      if (flat >= 5) break;
    }
    if (g < best_g) {
      best_g = g;
      best_x = x;
    }
  }

  PairReport report = recover_pair(p, best_x);
  report.status = PairStatus::heuristic;
  return report;
}

SolveOutcome solve_rtls(const ProblemSpec& p, const SolverOptions& opts) {
  SolveOutcome out;
  const auto triv = is_trivial_rtls(p, opts.triviality_tol);
  if (triv.trivial) {
    out.report = recover_pair(p, triv.witness);
    out.report.status = PairStatus::trivial;
    out.existence = Existence::trivial;
    return out;
  }
  if (p.T().is_identity_scaled()) {
    out.trace = solve_tstar(p, opts);
    out.report = recover_pair(p, out.trace->x_star);
    if (out.trace->found_root()) {
      out.existence = classify_existence(p, *out.trace, opts.triviality_tol);
      out.report.status = *out.existence == Existence::unique_solution ? PairStatus::solved
                                                                       : PairStatus::heuristic;
    } else {
      out.report.status = PairStatus::heuristic;
    }
    return out;
  }
  out.report = solve_rtls_generalT(p, opts.starts, opts.seed);
  return out;
}

}  // namespace wtls
