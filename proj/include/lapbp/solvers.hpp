#pragma once

#include <string>
#include <vector>

#include "lapbp/dissipation.hpp"

namespace lapbp {

enum class Variant { Pgs, Ags, Ags2 };

enum class InitRule { LeastSquares, Ones, Custom };

enum class SolveStatus { GapReached, MaxIters, Error };

/// A scalar parameter that may be left at its practical default or pinned
/// to the theoretical value derived from (variant, instance, eps).
struct ParamSpec {
    enum class Kind { Default, Theoretical, Value };
    Kind kind = Kind::Default;
    double value = 0.0;

    static ParamSpec theoretical() { return {Kind::Theoretical, 0.0}; }
    static ParamSpec of(double v) { return {Kind::Value, v}; }
};

struct SolverConfig {
    Variant variant = Variant::Pgs;
    double eps = 0.25;      ///< target used by the theoretical parameter rules
    ParamSpec beta;         ///< default: 3.5 (PGS, AGS), 1.1 (AGS2)
    ParamSpec delta;        ///< default: 1e-15
    ParamSpec max_iters;    ///< default: 100000 (value is a count)
    double gap_tol = 1e-8;  ///< stop when gap <= gap_tol * ||q||_1
    InitRule init = InitRule::LeastSquares;
    Vector init_custom;     ///< starting point when init == Custom
    double tau = 1e-15;     ///< AGS2 constant mixing weight
    double solve_tol = 1e-12;
    long trace_every = 1;
    bool check_condition = false; ///< enable the conditioning diagnostic
    double cond_limit = 1e14;     ///< threshold when the diagnostic is on
};

/// beta, delta, and the iteration budget after applying the default /
/// theoretical / explicit-value rules.
struct ResolvedParams {
    double beta = 0;
    double delta = 0;
    long max_iters = 0;
};

/// State of the accelerated schemes (shared by AGS and AGS2).
struct AgsState {
    WeightVector x, y, z;       ///< all in the floored orthant
    Vector cumulative_gradient; ///< sum of alpha_i * grad f(x^i)
    long k = 0;
    Vector x0; ///< initial point, anchor of the z-sequence
};

struct IterationRecord {
    long k = 0;
    double f = 0;
    double l1 = 0;         ///< ||q(x^k)||_1
    double gap = 0;
    double elapsed_ms = 0; ///< wall time since the run started
};

struct SolverRun {
    WeightVector final_x;
    Vector final_s; ///< q(final_x); satisfies A s = b within solve tolerance
    std::vector<IterationRecord> trace;
    SolveStatus status = SolveStatus::Error;
    DualCertificate certificate; ///< at final_x
    double final_f = 0;          ///< potential at final_x
    long iterations = 0;         ///< steps actually taken
    double elapsed_ms = 0;
    std::string error_message;   ///< set when status == Error
    std::string error_kind;      ///< e.g. "ill_conditioned", when known
};

/// Theoretical step-size parameter: PGS 8 m^2 / eps^2;
/// AGS (and AGS2, which has no value of its own) 16 m^3 / (eps^3 sqrt(c)).
double default_beta(Variant variant, const BpInstance& inst, double eps);

/// Theoretical iteration budget: PGS ceil(96 m^2 ln(m/eps) / eps^3);
/// AGS/AGS2 ceil(24 m^2 / eps^2).
long theoretical_iters(Variant variant, const BpInstance& inst, double eps);

/// Applies the Default / Theoretical / Value rules of the config.
ResolvedParams resolve_params(const BpInstance& inst,
                              const SolverConfig& config);

/// Starting point: least_squares -> max(|A^T (A A^T)^{-1} b|, delta);
/// ones -> max(1, delta) * 1; custom -> the given vector clamped to delta.
WeightVector init_point(const BpInstance& inst, const SolverConfig& config);

/// One multiplicative-weights step x'_j = max(delta, x_j exp(-g_j / beta)).
/// Throws OverflowError when |g_j| / beta exceeds 700 for some j.
WeightVector pgs_step(const BpInstance& inst, const WeightVector& x,
                      double beta, double delta,
                      const SolveOptions& opts = {});

/// Fresh accelerated-scheme state anchored at x0.
AgsState make_ags_state(const WeightVector& x0);

/// One accelerated step with alpha_k = (k+1)/2 and tau_k = 2/(k+3):
/// y = max(delta, x - g/beta); z = max(delta, x0 - cum/beta);
/// x' = tau_k z + (1 - tau_k) y.
AgsState ags_step(const BpInstance& inst, const AgsState& state, double beta,
                  double delta, const SolveOptions& opts = {});

/// Entropic variant: steps are scaled coordinatewise by x (resp. x0) and the
/// mixing weight tau is a fixed constant.
AgsState ags2_step(const BpInstance& inst, const AgsState& state, double beta,
                   double delta, double tau, const SolveOptions& opts = {});

/// Runs the configured scheme from init_point, tracing every trace_every
/// iterations and stopping on the relative duality gap or the budget.
SolverRun solve(const BpInstance& inst, const SolverConfig& config = {});

/// Short lower-case names used by the CLI and trace files.
std::string variant_name(Variant variant);

} // namespace lapbp
