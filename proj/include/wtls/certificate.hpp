#pragma once

#include <optional>

#include "wtls/problem.hpp"

namespace wtls {

/// A point (t, alpha, beta) together with the smallest eigenvalue of
/// C(t, alpha, beta). Feasible when lambda_min >= -tol_psd.
struct Certificate {
  double t = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double lambda_min = 0.0;
  double tol_psd = 0.0;
  bool feasible = false;
  std::optional<Matrix> C;
};

/// Symmetric (n+3) x (n+3) matrix in coordinates (x, z1, z2, tau):
///
///   [ alpha A^T W A + beta I    0           0              -alpha A^T W b        ]
///   [ 0                         0           0              (1 - alpha)/2         ]
///   [ 0                         0           rho            (rho - t - beta)/2    ]
///   [ -alpha b^T W A        (1 - alpha)/2  (rho-t-beta)/2  alpha ||b||_W^2 - t   ]
///
/// so that <C y, y> at y = (x, z1, z2, 1) equals
///   z1 + rho z2^2 + (rho - t) z2 - t + alpha (||Ax - b||_W^2 - z1) + beta (|x|^2 - z2).
Matrix assemble_C(const ProblemSpec& p, double t, double alpha, double beta);

double lambda_min_C(const ProblemSpec& p, double t, double alpha, double beta);

/// 1e-9 (1 + ||C||_F).
double psd_tolerance(const Matrix& C);

struct SearchBox {
  double alpha_max = 0.0;
  double beta_max = 0.0;
};

/// 10 max(1, rho, ||b||_W^2, ||A^T W A||).
SearchBox default_search_box(const ProblemSpec& p);

/// Maximizes the concave function (alpha, beta) -> lambda_min(C) over the box
/// with coordinate golden-section passes, warm-started at alpha = 1.
Certificate feasible_at_t(const ProblemSpec& p, double t, const SearchBox& box);

struct CertifyOptions {
  /// Bisection width on t; <= 0 selects 1e-8 (1 + ||b||_W^2).
  double tol_t = 0.0;
  /// Multiplies the default search box.
  double box_scale = 1.0;
  bool keep_C = false;
};

/// Largest feasible t in [0, ||b||_W^2] by bisection. The box doubles (up to
/// three times) when t = 0 is not found feasible; NumericalError after that.
Certificate certify_tstar(const ProblemSpec& p, const CertifyOptions& opts = {});

}  // namespace wtls
