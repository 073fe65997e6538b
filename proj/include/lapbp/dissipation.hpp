#pragma once

#include <optional>

#include "lapbp/laplacian.hpp"

namespace lapbp {

/// Floor applied to |q| entries before they are reused as weights in the
/// duality-gap certificate, so exact zeros stay invertible.
inline constexpr double kTinyFloor = 1e-300;

/// Evaluation of the potential f(x) = 1^T x + b^T L(x)^{-1} b.
struct PotentialEval {
    double f = 0;              ///< linear_term + laplacian_term
    double linear_term = 0;    ///< 1^T x
    double laplacian_term = 0; ///< b^T L(x)^{-1} b
    std::optional<Vector> gradient; ///< 1 - d^2, filled on request
    LaplacianSolve solve;      ///< the underlying linear solve at x
};

/// Dual certificate produced from the induced solution at x.  The gap bounds
/// how far ||q(x)||_1 is above the optimal value.
struct DualCertificate {
    Vector nu;     ///< dual vector for the equality constraints (length n)
    Vector lambda; ///< multipliers for s <= y (length m, nonnegative)
    Vector mu;     ///< multipliers for -s <= y (length m, nonnegative)
    double rho = 0; ///< max_j |d_j| at the certificate weights
    double gap = 0; ///< (1 + 1/rho) ||q||_1 - (1/rho) (1^T y + b^T L(y)^{-1} b)
};

/// Evaluates f at x; when with_gradient is set, also fills the gradient
/// 1 - d^2 from the same linear solve.
PotentialEval potential(const BpInstance& inst, const WeightVector& x,
                        const SolveOptions& opts = {},
                        const SolveWarmState* warm = nullptr,
                        bool with_gradient = false);

/// Gradient of f at x: grad_j = 1 - d_j(x)^2.
Vector gradient(const BpInstance& inst, const WeightVector& x,
                const SolveOptions& opts = {},
                const SolveWarmState* warm = nullptr);

/// Dense Hessian 2 (d d^T) .* T(x) (m x m, PSD).
/// Throws SizeLimitExceeded when m > kTransferSizeLimit.
Matrix hessian(const BpInstance& inst, const WeightVector& x);

/// The instance constant b^T (A A^T)^{-1} b (dissipation at unit weights).
double c_const(const BpInstance& inst);

/// Weight floor eps * sqrt(c_const) / (2 m) ensuring the floored domain
/// still contains near-optimal points.  Throws InvalidEps unless eps
/// is in (0, 1).
double delta_floor(const BpInstance& inst, double eps);

/// Duality-gap certificate at x, built from the induced solution q(x):
/// the certificate weights are y = max(|q|, kTinyFloor).
DualCertificate duality_gap(const BpInstance& inst, const WeightVector& x,
                            const SolveOptions& opts = {});

/// Same certificate when q(x) is already available from an earlier solve.
DualCertificate duality_gap_from_induced(const BpInstance& inst,
                                         const Vector& q,
                                         const SolveOptions& opts = {});

/// Bregman divergence of the negative-entropy mirror map:
/// sum_j [x_j ln(x_j / y_j) - x_j + y_j].  Throws NonPositiveInput if any
/// entry of x or y is not strictly positive, DimensionMismatch on size.
double bregman_entropy(const Vector& x, const Vector& y);

/// Evaluates (1/2) sum_j (s_j^2 / |s_j| + |s_j|), which equals ||s||_1;
/// exercises the variational upper bound at its minimizing weights.
/// Throws ZeroEntry if any s_j == 0.
double l1_variational_check(const Vector& s);

} // namespace lapbp
