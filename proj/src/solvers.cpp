#include "lapbp/solvers.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "lapbp/kernels.hpp"

namespace lapbp {

namespace {

constexpr double kPracticalDelta = 1e-15;
constexpr long kDefaultMaxIters = 100000;
constexpr double kExpGuard = 700.0; // |exponent| beyond this would overflow

double practical_beta(Variant variant) {
    return variant == Variant::Ags2 ? 1.1 : 3.5;
}

void validate_config(const SolverConfig& config) {
    if (!(config.eps > 0.0) || !(config.eps < 1.0)) {
        std::ostringstream msg;
        msg << "solver config: eps = " << config.eps << " outside (0, 1)";
        throw InvalidEps(msg.str());
    }
    if (config.beta.kind == ParamSpec::Kind::Value && !(config.beta.value > 0)) {
        throw NonPositiveInput("solver config: beta must be positive");
    }
    if (config.delta.kind == ParamSpec::Kind::Value &&
        !(config.delta.value > 0)) {
        throw NonPositiveInput("solver config: delta must be positive");
    }
    if (config.max_iters.kind == ParamSpec::Kind::Value &&
        config.max_iters.value < 0) {
        throw NonPositiveInput("solver config: max_iters must be nonnegative");
    }
    if (!(config.gap_tol >= 0.0)) {
        throw NonPositiveInput("solver config: gap_tol must be nonnegative");
    }
    if (config.trace_every < 1) {
        throw NonPositiveInput("solver config: trace_every must be >= 1");
    }
    if (!(config.tau > 0.0) || !(config.tau < 1.0)) {
        throw NonPositiveInput("solver config: tau must lie in (0, 1)");
    }
    if (config.init == InitRule::Custom && config.init_custom.size() == 0) {
        throw DimensionMismatch(
            "solver config: custom init requires init_custom");
    }
}

double elapsed_ms_since(
    const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
}

std::string kind_of(const Error& e) {
    if (dynamic_cast<const IllConditioned*>(&e)) return "ill_conditioned";
    if (dynamic_cast<const NoConvergence*>(&e)) return "no_convergence";
    if (dynamic_cast<const OverflowError*>(&e)) return "overflow";
    return "error";
}

Vector checked_gradient(const Vector& g, double beta) {
    if (g.lpNorm<Eigen::Infinity>() / beta > kExpGuard) {
        std::ostringstream msg;
        msg << "pgs_step: |gradient| / beta exceeds " << kExpGuard
            << "; beta is far below the smoothness scale";
        throw OverflowError(msg.str());
    }
    return g;
}

WeightVector pgs_apply(const WeightVector& x, const Vector& g, double beta,
                       double delta) {
    WeightVector next;
    next.floor = delta;
    kernels::entropic_update(x.x, checked_gradient(g, beta), 1.0 / beta, delta,
                             next.x);
    return next;
}

AgsState ags_apply(const AgsState& state, const Vector& g, double beta,
                   double delta) {
    AgsState next = state;
    const double alpha = 0.5 * static_cast<double>(state.k + 1);
    const double tau = 2.0 / static_cast<double>(state.k + 3);
    next.y.x = (state.x.x.array() - g.array() / beta).max(delta).matrix();
    next.cumulative_gradient += alpha * g;
    next.z.x = (state.x0.array() - next.cumulative_gradient.array() / beta)
                   .max(delta)
                   .matrix();
    // Mixing two floored points can round one ulp below the floor; clamp so
    // the invariant holds in arithmetic, not just in algebra.
    next.x.x = (tau * next.z.x.array() + (1.0 - tau) * next.y.x.array())
                   .max(delta)
                   .matrix();
    next.x.floor = next.y.floor = next.z.floor = delta;
    next.k = state.k + 1;
    return next;
}

AgsState ags2_apply(const AgsState& state, const Vector& g, double beta,
                    double delta, double tau) {
    AgsState next = state;
    const double alpha = 0.5 * static_cast<double>(state.k + 1);
    next.y.x = (state.x.x.array() * (1.0 - g.array() / beta))
                   .max(delta)
                   .matrix();
    next.cumulative_gradient += alpha * g;
    next.z.x = (state.x0.array() *
                (1.0 - next.cumulative_gradient.array() / beta))
                   .max(delta)
                   .matrix();
    next.x.x = (tau * next.z.x.array() + (1.0 - tau) * next.y.x.array())
                   .max(delta)
                   .matrix();
    next.x.floor = next.y.floor = next.z.floor = delta;
    next.k = state.k + 1;
    return next;
}

} // namespace

double default_beta(Variant variant, const BpInstance& inst, double eps) {
    if (!(eps > 0.0) || !(eps < 1.0)) {
        std::ostringstream msg;
        msg << "default_beta: eps = " << eps << " outside (0, 1)";
        throw InvalidEps(msg.str());
    }
    const double m = static_cast<double>(inst.cols());
    if (variant == Variant::Pgs) {
        return 8.0 * m * m / (eps * eps);
    }
    // AGS; AGS2 has no theoretical value of its own and borrows this one.
    return 16.0 * m * m * m / (eps * eps * eps * std::sqrt(c_const(inst)));
}

long theoretical_iters(Variant variant, const BpInstance& inst, double eps) {
    if (!(eps > 0.0) || !(eps < 1.0)) {
        std::ostringstream msg;
        msg << "theoretical_iters: eps = " << eps << " outside (0, 1)";
        throw InvalidEps(msg.str());
    }
    const double m = static_cast<double>(inst.cols());
    double bound = 0;
    if (variant == Variant::Pgs) {
        bound = 96.0 * m * m * std::log(m / eps) / (eps * eps * eps);
    } else {
        bound = 24.0 * m * m / (eps * eps);
    }
    return static_cast<long>(std::ceil(bound));
}

ResolvedParams resolve_params(const BpInstance& inst,
                              const SolverConfig& config) {
    validate_config(config);
    ResolvedParams out;
    switch (config.beta.kind) {
        case ParamSpec::Kind::Default:
            out.beta = practical_beta(config.variant);
            break;
        case ParamSpec::Kind::Theoretical:
            out.beta = default_beta(config.variant, inst, config.eps);
            break;
        case ParamSpec::Kind::Value:
            out.beta = config.beta.value;
            break;
    }
    switch (config.delta.kind) {
        case ParamSpec::Kind::Default:
            out.delta = kPracticalDelta;
            break;
        case ParamSpec::Kind::Theoretical:
            out.delta = delta_floor(inst, config.eps);
            break;
        case ParamSpec::Kind::Value:
            out.delta = config.delta.value;
            break;
    }
    switch (config.max_iters.kind) {
        case ParamSpec::Kind::Default:
            out.max_iters = kDefaultMaxIters;
            break;
        case ParamSpec::Kind::Theoretical:
            out.max_iters = theoretical_iters(config.variant, inst, config.eps);
            break;
        case ParamSpec::Kind::Value:
            out.max_iters = static_cast<long>(config.max_iters.value);
            break;
    }
    return out;
}

WeightVector init_point(const BpInstance& inst, const SolverConfig& config) {
    const ResolvedParams params = resolve_params(inst, config);
    WeightVector x;
    x.floor = params.delta;
    switch (config.init) {
        case InitRule::LeastSquares: {
            const WeightVector ones{Vector::Ones(inst.cols()), 0.0};
            const LaplacianSolve solve =
                solve_system(inst, ones, inst.rhs());
            x.x = solve.voltages.array().abs().max(params.delta).matrix();
            break;
        }
        case InitRule::Ones:
            x.x = Vector::Constant(inst.cols(), std::max(1.0, params.delta));
            break;
        case InitRule::Custom:
            if (config.init_custom.size() != inst.cols()) {
                std::ostringstream msg;
                msg << "init_point: custom start has length "
                    << config.init_custom.size() << ", expected "
                    << inst.cols();
                throw DimensionMismatch(msg.str());
            }
            x.x = config.init_custom.cwiseMax(params.delta);
            break;
    }
    return x;
}

WeightVector pgs_step(const BpInstance& inst, const WeightVector& x,
                      double beta, double delta, const SolveOptions& opts) {
    return pgs_apply(x, gradient(inst, x, opts), beta, delta);
}

AgsState make_ags_state(const WeightVector& x0) {
    AgsState state;
    state.x = state.y = state.z = x0;
    state.cumulative_gradient = Vector::Zero(x0.x.size());
    state.k = 0;
    state.x0 = x0.x;
    return state;
}

AgsState ags_step(const BpInstance& inst, const AgsState& state, double beta,
                  double delta, const SolveOptions& opts) {
    return ags_apply(state, gradient(inst, state.x, opts), beta, delta);
}

AgsState ags2_step(const BpInstance& inst, const AgsState& state, double beta,
                   double delta, double tau, const SolveOptions& opts) {
    return ags2_apply(state, gradient(inst, state.x, opts), beta, delta, tau);
}

SolverRun solve(const BpInstance& inst, const SolverConfig& config) {
    const ResolvedParams params = resolve_params(inst, config);
    SolveOptions opts;
    opts.solve_tol = config.solve_tol;
    opts.check_condition = config.check_condition;
    opts.cond_limit = config.cond_limit;

    const auto start = std::chrono::steady_clock::now();
    SolverRun run;

    WeightVector x = init_point(inst, config);
    AgsState state;
    if (config.variant != Variant::Pgs) {
        state = make_ags_state(x);
    }
    SolveWarmState warm;

    long k = 0;
    try {
        for (; k < params.max_iters; ++k) {
            const WeightVector& current =
                config.variant == Variant::Pgs ? x : state.x;
            PotentialEval eval = potential(inst, current, opts, &warm,
                                           /*with_gradient=*/true);
            warm = eval.solve.warm_state;
            const double l1 = eval.solve.induced.lpNorm<1>();

            if (k % config.trace_every == 0) {
                DualCertificate cert =
                    duality_gap_from_induced(inst, eval.solve.induced, opts);
                run.trace.push_back(
                    {k, eval.f, l1, cert.gap, elapsed_ms_since(start)});
                if (cert.gap <= config.gap_tol * l1) {
                    run.final_x = current;
                    run.final_s = eval.solve.induced;
                    run.certificate = std::move(cert);
                    run.final_f = eval.f;
                    run.status = SolveStatus::GapReached;
                    run.iterations = k;
                    run.elapsed_ms = elapsed_ms_since(start);
                    return run;
                }
            }

            switch (config.variant) {
                case Variant::Pgs:
                    x = pgs_apply(x, *eval.gradient, params.beta, params.delta);
                    break;
                case Variant::Ags:
                    state = ags_apply(state, *eval.gradient, params.beta,
                                      params.delta);
                    break;
                case Variant::Ags2:
                    state = ags2_apply(state, *eval.gradient, params.beta,
                                       params.delta, config.tau);
                    break;
            }
        }

        // Budget exhausted: evaluate the last point reached (not traced, so
        // a run with max_iters = T and trace_every = 1 has exactly T rows).
        const WeightVector& current =
            config.variant == Variant::Pgs ? x : state.x;
        PotentialEval eval = potential(inst, current, opts, &warm);
        run.final_x = current;
        run.final_s = eval.solve.induced;
        run.certificate =
            duality_gap_from_induced(inst, eval.solve.induced, opts);
        run.final_f = eval.f;
        run.status = SolveStatus::MaxIters;
        run.iterations = params.max_iters;
    } catch (const Error& e) {
        run.final_x = config.variant == Variant::Pgs ? x : state.x;
        run.status = SolveStatus::Error;
        run.error_message = e.what();
        run.error_kind = kind_of(e);
        run.iterations = k;
    }
    run.elapsed_ms = elapsed_ms_since(start);
    return run;
}

std::string variant_name(Variant variant) {
    switch (variant) {
        case Variant::Pgs: return "pgs";
        case Variant::Ags: return "ags";
        case Variant::Ags2: return "ags2";
    }
    return "unknown";
}

} // namespace lapbp
