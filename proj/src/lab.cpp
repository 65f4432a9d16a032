#include "wtls/lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <regex>
#include <sstream>

#include "wtls/classic_tls.hpp"
#include "wtls/errors.hpp"
#include "wtls/log.hpp"
#include "wtls/reduction.hpp"

namespace wtls::lab {
namespace {

constexpr double kTrivialityTol = 1e-10;

Vector pad(const Vector& v, Eigen::Index n) {
  Vector out = Vector::Zero(n);
  const Eigen::Index k = std::min(n, v.size());
  out.head(k) = v.head(k);
  return out;
}

std::vector<double> simpson_weights(int points, double h) {
  std::vector<double> w(points);
  for (int i = 0; i < points; ++i) {
    if (i == 0 || i == points - 1)
      w[i] = h / 3.0;
    else
      w[i] = (i % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
  }
  return w;
}

void require_simpson_points(int points) {
  if (points < 3 || points % 2 == 0)
    throw PreconditionError("composite Simpson needs an odd number of points >= 3, got " +
                            std::to_string(points));
}

}  // namespace

// ---------------------------------------------------------------------------
// SequenceRule

SequenceRule SequenceRule::power(double coeff, double exponent) {
  SequenceRule r;
  r.coeff_ = coeff;
  r.exponent_ = exponent;
  return r;
}

SequenceRule SequenceRule::list(std::vector<double> values) {
  for (double v : values)
    if (!std::isfinite(v)) throw ParseError("sequence list has a non-finite entry");
  SequenceRule r;
  r.values_ = std::move(values);
  return r;
}

SequenceRule SequenceRule::parse(const std::string& text) {
  static const std::regex over_k(R"(^\s*([-+0-9.eE]*)\s*/\s*k\s*(\^\s*([-+0-9.eE]+))?\s*$)");
  static const std::regex k_pow(R"(^\s*k\s*\^\s*([-+0-9.eE]+)\s*$)");
  std::smatch m;
  try {
    if (std::regex_match(text, m, over_k)) {
      const double c = m[1].str().empty() ? 1.0 : std::stod(m[1].str());
      const double p = m[3].matched ? std::stod(m[3].str()) : 1.0;
      return power(c, p);
    }
    if (std::regex_match(text, m, k_pow)) return power(1.0, -std::stod(m[1].str()));
    std::size_t used = 0;
    const double c = std::stod(text, &used);
    if (text.find_first_not_of(" \t", used) == std::string::npos) return power(c, 0.0);
  } catch (const std::logic_error&) {
  }
  throw ParseError("cannot parse sequence rule '" + text + "' (expected e.g. \"1/k\", \"1/k^2\")");
}

double SequenceRule::at(int k) const {
  if (k < 1) throw PreconditionError("sequences are indexed from k = 1");
  if (values_) return k <= static_cast<int>(values_->size()) ? (*values_)[k - 1] : 0.0;
  return coeff_ / std::pow(static_cast<double>(k), exponent_);
}

Vector SequenceRule::head(int n) const {
  Vector v(n);
  for (int k = 1; k <= n; ++k) v(k - 1) = at(k);
  return v;
}

int SequenceRule::support() const {
  if (!values_) return coeff_ == 0.0 ? 0 : -1;
  int s = 0;
  for (int i = 0; i < static_cast<int>(values_->size()); ++i)
    if ((*values_)[i] != 0.0) s = i + 1;
  return s;
}

std::string SequenceRule::describe() const {
  std::ostringstream os;
  if (values_) {
    os << "[";
    for (std::size_t i = 0; i < values_->size(); ++i) os << (i ? "," : "") << (*values_)[i];
    os << "]";
  } else {
    os << coeff_ << "/k^" << exponent_;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Models

ProblemSpec DiagonalModel::build(int n_unknowns) const {
  if (n_unknowns < 1) throw PreconditionError("truncation order must be positive");
  if (data_ratio < 1) throw PreconditionError("data_ratio must be >= 1");
  const int m = data_ratio * n_unknowns;
  Matrix A = Matrix::Zero(m, n_unknowns);
  for (int k = 1; k <= n_unknowns; ++k) A(k - 1, k - 1) = a.at(k);
  auto W = WeightOperator::diagonal(w.head(m));
  const Vector bv = b.head(m);
  auto reg = T ? RegularizerSpec::dense(Matrix(T->head(n_unknowns).asDiagonal()))
               : RegularizerSpec::identity_scaled(rho);
  return ProblemSpec(std::move(A), bv, std::move(W), std::move(reg),
                     Origin{ModelKind::diagonal, n_unknowns});
}

DiagonalModel default_nonexistence_model() {
  DiagonalModel m;
  m.a = SequenceRule::power(1.0, 1.0);
  m.w = SequenceRule::power(1.0, 2.0);
  m.b = SequenceRule::power(1.0, 1.0);
  m.T = SequenceRule::power(1.0, 2.0);
  m.n = 200;
  m.data_ratio = 2;
  return m;
}

IntegralModel::Kernel IntegralModel::parse_kernel(const std::string& name) {
  if (name == "named:gaussian" || name == "gaussian") return Kernel::gaussian;
  if (name == "named:cosine_demo" || name == "cosine_demo") return Kernel::cosine_demo;
  throw ParseError("unknown kernel '" + name + "' (expected named:gaussian or named:cosine_demo)");
}

std::string IntegralModel::kernel_name(Kernel k) {
  return k == Kernel::gaussian ? "named:gaussian" : "named:cosine_demo";
}

ProblemSpec IntegralModel::build(int N) const {
  if (N < 1) throw PreconditionError("truncation order must be positive");
  require_simpson_points(grid);
  if (grid < 4 * N + 1)
    throw PreconditionError("insufficient quadrature resolution: grid " + std::to_string(grid) +
                            " < 4N+1 for N = " + std::to_string(N));

  const double L = kernel == Kernel::gaussian ? 1.0 : 2.0 * std::numbers::pi;
  const double h = L / (grid - 1);
  const auto omega = simpson_weights(grid, h);

  Vector nodes(grid);
  for (int i = 0; i < grid; ++i) nodes(i) = h * i;

  Matrix basis(grid, N);
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < N; ++j)
      basis(i, j) = j == 0 ? 1.0 / std::sqrt(L)
                           : std::sqrt(2.0 / L) * std::cos(j * std::numbers::pi * nodes(i) / L);

  auto k = [&](double s, double t) {
    if (kernel == Kernel::gaussian) return std::exp(-(s - t) * (s - t) / (2.0 * 0.01));
    return (2.0 + std::cos(s)) * (2.0 - std::cos(t));
  };
  auto rhs = [&](double s) { return kernel == Kernel::gaussian ? s : 2.0 + std::cos(s); };

  Matrix K(grid, grid);
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) K(i, j) = omega[i] * k(nodes(i), nodes(j)) * omega[j];
  Vector fb(grid);
  for (int i = 0; i < grid; ++i) fb(i) = omega[i] * rhs(nodes(i));

  Matrix A = basis.transpose() * K * basis;
  Vector b = basis.transpose() * fb;
  Vector w(N);
  for (int j = 0; j < N; ++j) w(j) = 1.0 / ((j + 1.0) * (j + 1.0));
  return ProblemSpec(std::move(A), std::move(b), WeightOperator::diagonal(w),
                     RegularizerSpec::identity_scaled(rho), Origin{ModelKind::integral, N});
}

double composite_simpson(const std::function<double(double)>& f, double a, double b, int points) {
  require_simpson_points(points);
  const double h = (b - a) / (points - 1);
  double odd = 0.0, even = 0.0;
  for (int i = 1; i < points - 1; ++i) (i % 2 == 1 ? odd : even) += f(a + h * i);
  return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

// ---------------------------------------------------------------------------
// Nonexistence constructions

namespace {

struct Construction {
  Matrix X0;
  Vector x_scaled;
};

// X0 = A + <., eps x> (b - A x / eps); X0 (x / eps) = b whenever |x| = 1.
Construction build_construction(const ProblemSpec& p, const Vector& x, double eps) {
  const Vector gap = p.b() - p.A() * x / eps;
  return {p.A() + gap * (eps * x).transpose(), x / eps};
}

void check_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw PreconditionError("eps values must be positive");
}

}  // namespace

SequenceResult nonexistence_tls_sequence(const ProblemSpec& p, const std::vector<double>& eps_list) {
  if (is_trivial_tls(p, kTrivialityTol).trivial)
    throw PreconditionError("TLS instance is trivial (b in R(A) + N(W)); nothing to exhibit");
  const Matrix sa = p.W().sqrt() * p.A();
  const double nb = (p.W().sqrt() * p.b()).norm();
  const MinDirection md = min_direction(sa.transpose() * sa, 0.0);

  SequenceResult out;
  out.min_value = md.value;
  for (double eps : eps_list) {
    check_eps(eps);
    if (!(md.value < eps)) {
      out.skipped.push_back(eps);
      log_info("nonexist-tls: eps " + std::to_string(eps) + " skipped, |W^1/2 A x| = " +
               std::to_string(md.value));
      continue;
    }
    const Construction c = build_construction(p, md.x, eps);
    SequencePoint pt;
    pt.eps = eps;
    pt.x_scaled = c.x_scaled;
    pt.objective = objective_tls(p, c.X0, c.x_scaled);
    pt.bound = eps * eps * (nb + 1.0) * (nb + 1.0);
    pt.bound_rigorous = pt.bound;
    pt.interpolation_residual = (c.X0 * c.x_scaled - p.b()).norm();
    pt.min_value = md.value;
    pt.wa_norm = (sa * md.x).norm();
    out.points.push_back(std::move(pt));
  }
  if (out.points.empty())
    throw PreconditionError("construction unavailable: W^1/2 A is bounded below by " +
                            std::to_string(md.value) + " at this truncation");
  return out;
}

SequenceResult nonexistence_rtls_sequence(const ProblemSpec& p,
                                          const std::vector<double>& eps_list) {
  if (is_trivial_rtls(p, kTrivialityTol).trivial)
    throw PreconditionError("RTLS instance is trivial (b in A(N(T)) + N(W)); nothing to exhibit");
  const Matrix sa = p.W().sqrt() * p.A();
  const double nb = (p.W().sqrt() * p.b()).norm();
  const Matrix M = p.T().gram(p.cols()) + sa.transpose() * sa;
  const MinDirection md = min_direction(M, 0.0);

  SequenceResult out;
  out.min_value = md.value;
  for (double eps : eps_list) {
    check_eps(eps);
    if (!(md.value < eps * eps)) {
      out.skipped.push_back(eps);
      log_info("nonexist-rtls: eps " + std::to_string(eps) + " skipped, |M^1/2 x| = " +
               std::to_string(md.value));
      continue;
    }
    const Construction c = build_construction(p, md.x, eps);
    SequencePoint pt;
    pt.eps = eps;
    pt.x_scaled = c.x_scaled;
    pt.objective = objective_rtls(p, c.X0, c.x_scaled);
    const double e2 = eps * eps;
    pt.bound = e2 * (1.0 + (nb + e2) * (nb + e2));
    pt.bound_rigorous = e2 * (1.0 + (nb + eps) * (nb + eps));
    pt.interpolation_residual = (c.X0 * c.x_scaled - p.b()).norm();
    pt.min_value = md.value;
    pt.t_norm = p.T().apply(md.x).norm();
    pt.wa_norm = (sa * md.x).norm();
    pt.m_norm = std::sqrt(std::max(md.x.dot(M * md.x), 0.0));
    out.points.push_back(std::move(pt));
  }
  if (out.points.empty())
    throw PreconditionError("construction unavailable: T^T T + A^T W A is bounded below by " +
                            std::to_string(md.value * md.value) + " at this truncation");
  return out;
}

// ---------------------------------------------------------------------------
// Diagonal example

double h_value(const Vector& a_head, const Vector& w_head, const Vector& b_head, double rho,
               const Vector& alpha, double s_norm) {
  detail::require_dims(a_head.size() == b_head.size() && w_head.size() == b_head.size() &&
                           alpha.size() == b_head.size(),
                       "h arguments");
  double data = 0.0;
  for (Eigen::Index j = 0; j < b_head.size(); ++j) {
    const double r = a_head(j) * alpha(j) - b_head(j);
    data += w_head(j) * r * r;
  }
  const double mass = alpha.squaredNorm() + s_norm * s_norm;
  return data / (1.0 + mass) + rho * mass;
}

Vector rebalance_onto(const Vector& a_head, const Vector& w_head, const Vector& alpha,
                      double s_norm, int k) {
  detail::require_dims(a_head.size() == alpha.size() && w_head.size() == alpha.size(),
                       "rebalance arguments");
  if (k < 0 || k >= alpha.size() || w_head(k) * a_head(k) != 0.0)
    throw PreconditionError("rebalancing target must satisfy w_k a_k = 0");
  Vector out = alpha;
  double moved = s_norm * s_norm;
  for (Eigen::Index j = 0; j < alpha.size(); ++j) {
    if (w_head(j) * a_head(j) == 0.0) {
      moved += alpha(j) * alpha(j);
      out(j) = 0.0;
    }
  }
  out(k) = std::sqrt(moved);
  return out;
}

DiagonalSolveResult diagonal_solve(const Vector& a, const Vector& w, const Vector& b_head,
                                   double rho, int n, const SolverOptions& opts) {
  const Eigen::Index N = b_head.size();
  if (N < 1 || n < N) throw PreconditionError("diagonal_solve needs 1 <= N <= n");
  if ((w.array() < 0.0).any()) throw PreconditionError("diagonal weights must be nonnegative");

  const Vector a_full = pad(a, n);
  const Vector w_full = pad(w, n);
  ProblemSpec p(Matrix(a_full.asDiagonal()), pad(b_head, n), WeightOperator::diagonal(w_full),
                RegularizerSpec::identity_scaled(rho), Origin{ModelKind::diagonal, n});

  DiagonalSolveResult out;
  out.outcome = solve_rtls(p, opts);
  const Vector& x = out.outcome.report.x;

  DiagonalAudit& au = out.audit;
  const Vector a_head = a_full.head(N);
  const Vector w_head = w_full.head(N);
  for (Eigen::Index j = 0; j < N; ++j)
    (w_head(j) * a_head(j) != 0.0 ? au.d_indices : au.c_indices).push_back(static_cast<int>(j));

  const Vector alpha = x.head(N);
  au.s_norm = x.tail(n - N).norm();
  const double total = x.squaredNorm();
  au.tail_mass_ratio = total > 0.0 ? au.s_norm * au.s_norm / total : 0.0;
  for (int j : au.d_indices)
    au.max_ratio_gap = std::max(au.max_ratio_gap, std::abs(alpha(j) - b_head(j) / a_head(j)));
  au.critical_ok = au.s_norm <= 1e-6 * (1.0 + x.norm()) || au.max_ratio_gap <= 1e-6;
  au.h_star = h_value(a_head, w_head, b_head, rho, alpha, au.s_norm);
  if (!au.c_indices.empty()) {
    const Vector moved = rebalance_onto(a_head, w_head, alpha, au.s_norm, au.c_indices.front());
    au.h_rebalanced = h_value(a_head, w_head, b_head, rho, moved, 0.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Truncation sweeps

std::vector<SweepRow> truncation_sweep(const SweepModel& model, const std::vector<int>& N_list,
                                       double rho, const SolverOptions& opts) {
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    if (N_list[i] < 1) throw PreconditionError("truncation orders must be positive");
    if (i > 0 && N_list[i] <= N_list[i - 1])
      throw PreconditionError("truncation orders must be strictly increasing");
  }

  std::vector<SweepRow> rows;
  for (int N : N_list) {
    const ProblemSpec p = std::visit(
        [&](auto m) {
          m.rho = rho;
          return m.build(N);
        },
        model);
    const SolveOutcome sol = solve_rtls(p, opts);

    SweepRow row;
    row.N = N;
    row.t_star = sol.trace ? sol.trace->t_star : sol.report.objective;
    row.x_norm = sol.report.x.norm();
    row.objective = sol.report.objective;
    row.status = sol.report.status;
    row.existence = sol.existence ? to_string(*sol.existence) : "not_certified";

    if (const auto* dm = std::get_if<DiagonalModel>(&model); dm && dm->T) {
      std::vector<double> eps;
      for (int j = 1; j <= 24; ++j) eps.push_back(std::pow(10.0, -0.25 * j));
      try {
        const auto seq = nonexistence_rtls_sequence(p, eps);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& pt : seq.points) best = std::min(best, pt.objective);
        row.construction_objective = best;
      } catch (const PreconditionError&) {
      }
    }
    log_info("sweep N=" + std::to_string(N) + " t*=" + std::to_string(row.t_star));
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Weak continuity

WeakContinuityTable weak_continuity_demo(const std::vector<int>& n_list, int quad_points) {
  if (n_list.empty()) throw PreconditionError("n_list must not be empty");
  int n_max = 0;
  for (int n : n_list) {
    if (n < 1) throw PreconditionError("frequencies must be >= 1");
    n_max = std::max(n_max, n);
  }
  require_simpson_points(quad_points);
  if (quad_points < 64 * n_max + 1)
    throw PreconditionError("insufficient quadrature resolution: " + std::to_string(quad_points) +
                            " points < 64 * " + std::to_string(n_max) + " + 1");

  const double two_pi = 2.0 * std::numbers::pi;
  const double seven_pi = 7.0 * std::numbers::pi;
  WeakContinuityTable out;
  out.passed = true;
  for (int n : n_list) {
    const double I = composite_simpson(
        [n](double t) { return (2.0 + std::cos(n * t)) * (2.0 - std::cos(n * t)); }, 0.0, two_pi,
        quad_points);
    const double err = std::abs(I - seven_pi);
    out.rows.push_back({n, I, err});
    out.passed = out.passed && err <= 1e-8;
  }
  out.limit_value = composite_simpson([](double) { return 2.0 * 2.0; }, 0.0, two_pi, quad_points);
  out.limit_error = std::abs(out.limit_value - 8.0 * std::numbers::pi);
  out.passed = out.passed && out.limit_error <= 1e-12;
  return out;
}

}  // namespace wtls::lab
