#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wtls/core.hpp"
#include "wtls/trs.hpp"

namespace wtls {

struct SolverOptions {
  /// |phi(t)| stopping threshold; <= 0 selects 1e-9 (1 + ||b||_W^2).
  double tol_phi = 0.0;
  /// Radial grid size for the outer search over |x|.
  int grid = 512;
  int max_iter = 100;
  /// Multi-start count and seed for the general-T heuristic.
  int starts = 8;
  std::uint64_t seed = 0;
  /// Residual tolerance for the triviality tests.
  double triviality_tol = 1e-10;
};

/// Reduces minimization of
///   ||Ax - b||_W^2 + quartic |x|^4 + quadratic |x|^2
/// to a search over the radius r = |x|. For fixed r the inner problem is an
/// equality-constrained trust-region subproblem in S = A^T W A, c = A^T W b.
class SphericalReduction {
 public:
  explicit SphericalReduction(const ProblemSpec& p);

  struct RadialMinimum {
    double r = 0.0;
    double value = 0.0;  ///< objective without any constant offset
    Vector x;
    double lambda = 0.0;
    /// r_max used in the final pass (after any doubling).
    double r_max = 0.0;
    int doublings = 0;
  };

  /// ||Ax - b||_W^2 evaluated directly.
  double fit(const Vector& x) const;
  /// min over |x| = r of ||Ax - b||_W^2, with its argmin.
  TrsSolution sphere_fit(double r) const;

  /// Grid of `grid` radii on [0, r_max], golden-section refinement of the
  /// best cell to width 1e-12 r_max, then a bisection polish on the secular
  /// stationarity condition lambda(r) = 2 quartic r^2 + quadratic.
  /// r_max is doubled (up to 8 times) whenever the minimizer lands within 1%
  /// of it.
  RadialMinimum minimize(double quartic, double quadratic, int grid) const;

  double b_norm_sq() const { return b_norm_sq_; }
  const SphereQuadratic& quadratic() const { return quad_; }

 private:
  double objective(double r, const TrsSolution& s, double quartic, double quadratic) const;

  Matrix sqrt_w_a_;
  Vector sqrt_w_b_;
  double b_norm_sq_;
  SphereQuadratic quad_;
};

struct PhiValue {
  double phi = 0.0;
  Vector x;
};

/// phi(t) = inf_x ||Ax - b||_W^2 + rho |x|^4 + (rho - t) |x|^2 - t, for T = sqrt(rho) I.
PhiValue eval_phi(const ProblemSpec& p, double t, int grid = 512);
PhiValue eval_phi(const SphericalReduction& red, double rho, double t, int grid = 512);

struct DinkelbachIterate {
  double t = 0.0;
  double r = 0.0;
  Vector x;
  double phi = 0.0;
  bool bisection = false;
};

enum class TraceVerdict { converged, max_iter, nonconvex_inner_flagged };

std::string to_string(TraceVerdict v);

struct DinkelbachTrace {
  std::vector<DinkelbachIterate> iterates;
  double t_star = 0.0;
  Vector x_star;
  double phi_star = 0.0;
  double tol_phi = 0.0;
  double rho = 0.0;
  TraceVerdict verdict = TraceVerdict::max_iter;

  /// converged or nonconvex_inner_flagged: the root of phi was found.
  bool found_root() const { return verdict != TraceVerdict::max_iter; }
};

/// Dinkelbach iteration t_{k+1} = G(x_k), x_k = argmin of phi(t_k), started at
/// t_0 = G(0) = ||b||_W^2. Three consecutive non-decreasing steps switch to
/// bisection on [0, t_k]. The verdict is nonconvex_inner_flagged when the root
/// is found with t* > rho, the regime where the inner objective is not convex.
DinkelbachTrace solve_tstar(const ProblemSpec& p, const SolverOptions& opts = {});

enum class Existence { unique_solution, not_certified, trivial };

std::string to_string(Existence e);

/// trivial when b lies in A(N(T)) + N(W); unique_solution when rho >= t* - tol;
/// otherwise not_certified (no existence claim either way).
Existence classify_existence(const ProblemSpec& p, const DinkelbachTrace& trace,
                             double triviality_tol = 1e-10);

struct QuarticResult {
  double a_star = 0.0;
  Vector x;
  /// a* <= rho, which guarantees a unique RTLS solution.
  bool certifies_unique = false;
};

/// min ||Ax - b||_W^2 + rho |x|^4.
QuarticResult solve_rls_quartic(const ProblemSpec& p, int grid = 512);

/// Multi-start gradient descent on G with Armijo backtracking and
/// Barzilai-Borwein trial steps. Start 0 is x = 0; the rest are seeded
/// Gaussian draws. Always returns the best point found with status heuristic.
PairReport solve_rtls_generalT(const ProblemSpec& p, int starts, std::uint64_t seed);

struct SolveOutcome {
  PairReport report;
  std::optional<DinkelbachTrace> trace;
  std::optional<Existence> existence;
};

/// Dispatches on the regularizer: triviality check, then the Dinkelbach solver
/// for identity_scaled T (status solved when rho >= t*, heuristic otherwise),
/// or the multi-start heuristic for dense T.
SolveOutcome solve_rtls(const ProblemSpec& p, const SolverOptions& opts = {});

}  // namespace wtls
