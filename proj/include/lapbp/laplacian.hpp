#pragma once

#include "lapbp/instance.hpp"

namespace lapbp {

/// Largest m for which the dense m x m transfer matrix may be formed.
inline constexpr Index kTransferSizeLimit = 512;

/// Dimension up to which the automatic method selection stays dense.
inline constexpr Index kDenseSolveLimit = 2000;

/// Strictly positive conductance-like weights, one per column of A,
/// together with the floor they are clamped to by the solvers.
struct WeightVector {
    Vector x;           ///< length m, entries >= floor when used by solvers
    double floor = 0.0; ///< lower bound delta (0 when unconstrained)
};

/// Reusable starting point for the next linear solve at nearby weights.
/// Consumed by the iterative path; the dense path ignores it.
struct SolveWarmState {
    Vector potentials;
    bool valid() const noexcept { return potentials.size() > 0; }
};

/// Result of solving (A diag(x) A^T) p = rhs.
struct LaplacianSolve {
    Vector potentials;         ///< p, length n
    Vector voltages;           ///< d = A^T p, length m
    Vector induced;            ///< q = diag(x) d, length m
    double residual_norm = 0;  ///< ||L p - rhs||_2 / ||rhs||_2
    SolveWarmState warm_state; ///< pass to the next call at nearby weights
};

enum class SolveMethod {
    Auto,              ///< dense up to kDenseSolveLimit rows, iterative above
    DenseCholesky,     ///< direct factorization of the assembled matrix
    ConjugateGradient, ///< matrix-free PCG with Jacobi preconditioning
};

struct SolveOptions {
    double solve_tol = 1e-12;    ///< relative residual target
    SolveMethod method = SolveMethod::Auto;
    Index dense_limit = kDenseSolveLimit;
    long max_cg_iters = 0;       ///< 0 = 10 n + 200
    bool check_condition = false; ///< dense path: estimate and enforce below
    double cond_limit = 1e14;    ///< threshold for IllConditioned when checked
};

/// Assembles L(x) = A diag(x) A^T.  Throws NonPositiveWeight if any entry
/// of x is not strictly positive and finite, DimensionMismatch on bad sizes.
Matrix laplacian_matrix(const BpInstance& inst, const WeightVector& x);

/// Solves L(x) p = rhs and derives voltages d = A^T p and the induced
/// solution q = diag(x) d (which satisfies A q = rhs).
///
/// Throws IllConditioned when the condition estimate exceeds
/// opts.cond_limit (only if opts.check_condition) or when the factorization
/// cannot reach the residual target at all, and NoConvergence when the
/// iterative path runs out of iterations (reports the last residual).
LaplacianSolve solve_system(const BpInstance& inst, const WeightVector& x,
                            const Vector& rhs,
                            const SolveWarmState* warm = nullptr,
                            const SolveOptions& opts = {});

/// Dense transfer matrix T(x) = A^T L(x)^{-1} A (m x m, symmetric PSD).
/// Throws SizeLimitExceeded when m > kTransferSizeLimit.
Matrix transfer_matrix(const BpInstance& inst, const WeightVector& x);

} // namespace lapbp
