#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wtls/fractional.hpp"

namespace wtls::lab {

/// A real sequence indexed from k = 1: either coeff / k^exponent or an
/// explicit list padded with zeros.
class SequenceRule {
 public:
  static SequenceRule power(double coeff, double exponent);
  static SequenceRule list(std::vector<double> values);
  /// Accepts "c/k", "c/k^p", "k^-p" style power laws and plain constants ("0", "2.5").
  static SequenceRule parse(const std::string& text);

  double at(int k) const;
  Vector head(int n) const;
  /// Number of nonzero-by-construction leading entries for lists; -1 for power laws.
  int support() const;
  std::string describe() const;

 private:
  double coeff_ = 0.0;
  double exponent_ = 0.0;
  std::optional<std::vector<double>> values_;
};

/// Diagonal operators on l2 truncated to n unknowns and data_ratio * n data
/// coordinates: A e_k = a_k e_k, W = diag(w_k), b = sum b_k e_k. T is
/// sqrt(rho) I unless a diagonal regularizer sequence is given.
struct DiagonalModel {
  SequenceRule a = SequenceRule::power(1.0, 1.0);
  SequenceRule w = SequenceRule::power(1.0, 2.0);
  SequenceRule b = SequenceRule::list({1.0});
  std::optional<SequenceRule> T;
  double rho = 1.0;
  int n = 200;
  int data_ratio = 1;

  ProblemSpec build(int n_unknowns) const;
  ProblemSpec build() const { return build(n); }
};

/// Default nonexistence fixture: a_k = 1/k, w_k = 1/k^2, b_k = 1/k,
/// T = diag(1/k^2), twice as many data coordinates as unknowns.
DiagonalModel default_nonexistence_model();

/// Integral operator (A f)(s) = int k(s, t) f(t) dt on [0, L] written in the
/// orthonormal cosine basis phi_0 = 1/sqrt(L), phi_j = sqrt(2/L) cos(j pi s / L).
/// Entries come from composite Simpson on `grid` points per axis.
/// W = diag(1/(j+1)^2) in that basis and T = sqrt(rho) I.
struct IntegralModel {
  enum class Kernel { gaussian, cosine_demo };
  Kernel kernel = Kernel::gaussian;
  int grid = 257;
  double rho = 1.0;

  static Kernel parse_kernel(const std::string& name);
  static std::string kernel_name(Kernel k);

  ProblemSpec build(int n_unknowns) const;
};

using SweepModel = std::variant<DiagonalModel, IntegralModel>;

/// Composite Simpson rule on `points` equally spaced nodes (odd, >= 3).
double composite_simpson(const std::function<double(double)>& f, double a, double b, int points);

struct SequencePoint {
  double eps = 0.0;
  Vector x_scaled;
  double objective = 0.0;
  double bound = 0.0;
  /// Bound with |W^{1/2} A x / eps| <= eps carried through.
  double bound_rigorous = 0.0;
  /// ||X0 (x / eps) - b||
  double interpolation_residual = 0.0;
  double min_value = 0.0;
  /// RTLS only: |Tx|, |W^{1/2} A x| and |(T^T T + A^T W A)^{1/2} x|.
  double t_norm = 0.0;
  double wa_norm = 0.0;
  double m_norm = 0.0;
};

struct SequenceResult {
  std::vector<SequencePoint> points;
  /// Requested eps values for which the construction is unavailable.
  std::vector<double> skipped;
  double min_value = 0.0;
};

/// X0 = A + eps <., x> (b - A x / eps) at x / eps, x the unit direction that
/// minimizes |W^{1/2} A x|. Bound eps^2 (|W^{1/2} b| + 1)^2. An eps is
/// skipped unless |W^{1/2} A x| < eps.
SequenceResult nonexistence_tls_sequence(const ProblemSpec& p, const std::vector<double>& eps_list);

/// Same construction with x minimizing |(T^T T + A^T W A)^{1/2} x|, which must
/// be below eps^2. Bound eps^2 (1 + (|W^{1/2} b| + eps^2)^2).
SequenceResult nonexistence_rtls_sequence(const ProblemSpec& p, const std::vector<double>& eps_list);

/// h(alpha, s) = sum_{j <= N} w_j (a_j alpha_j - b_j)^2 / (1 + |alpha|^2 + s^2) + rho (|alpha|^2 + s^2)
double h_value(const Vector& a_head, const Vector& w_head, const Vector& b_head, double rho,
               const Vector& alpha, double s_norm);

/// Moves the tail mass s and every alpha_j with w_j a_j = 0 onto coordinate k
/// (which must have w_k a_k = 0), preserving |(alpha, s)|.
Vector rebalance_onto(const Vector& a_head, const Vector& w_head, const Vector& alpha,
                      double s_norm, int k);

struct DiagonalAudit {
  std::vector<int> d_indices;  ///< w_j a_j != 0
  std::vector<int> c_indices;  ///< w_j a_j == 0
  double s_norm = 0.0;
  double tail_mass_ratio = 0.0;
  /// max_{j in D} |alpha_j - b_j / a_j|
  double max_ratio_gap = 0.0;
  /// s = 0, or alpha_j = b_j / a_j on D.
  bool critical_ok = false;
  double h_star = 0.0;
  std::optional<double> h_rebalanced;
};

struct DiagonalSolveResult {
  SolveOutcome outcome;
  DiagonalAudit audit;
};

/// Truncated RTLS for diagonal A and W with T = sqrt(rho) I on R^n, b supported
/// on the first N = b_head.size() coordinates. a and w shorter than n are padded with 0.
DiagonalSolveResult diagonal_solve(const Vector& a, const Vector& w, const Vector& b_head,
                                   double rho, int n, const SolverOptions& opts = {});

struct SweepRow {
  int N = 0;
  double t_star = 0.0;
  double x_norm = 0.0;
  double objective = 0.0;
  PairStatus status = PairStatus::heuristic;
  std::string existence;
  /// Smallest objective among the RTLS nonexistence points at this N, if any.
  std::optional<double> construction_objective;
};

/// Solves each truncation in N_list (strictly increasing). rho overrides the
/// model's regularization scale.
std::vector<SweepRow> truncation_sweep(const SweepModel& model, const std::vector<int>& N_list,
                                       double rho, const SolverOptions& opts = {});

struct WeakContinuityRow {
  int n = 0;
  double integral = 0.0;
  double error = 0.0;  ///< |I_n - 7 pi|
};

struct WeakContinuityTable {
  std::vector<WeakContinuityRow> rows;
  double limit_value = 0.0;  ///< int_0^{2 pi} 2 * 2 dt
  double limit_error = 0.0;  ///< |limit - 8 pi|
  bool passed = false;
};

/// I_n = int_0^{2 pi} (2 + cos nt)(2 - cos nt) dt = 7 pi for every n >= 1, while
/// the product of the weak limits integrates to 8 pi. quad_points must be odd
/// and at least 64 max(n) + 1.
WeakContinuityTable weak_continuity_demo(const std::vector<int>& n_list, int quad_points);

}  // namespace wtls::lab
