#include "lapbp/dissipation.hpp"

#include <cmath>
#include <sstream>

#include "lapbp/kernels.hpp"

namespace lapbp {

PotentialEval potential(const BpInstance& inst, const WeightVector& x,
                        const SolveOptions& opts, const SolveWarmState* warm,
                        bool with_gradient) {
    PotentialEval eval;
    eval.solve = solve_system(inst, x, inst.rhs(), warm, opts);
    eval.linear_term = x.x.sum();
    eval.laplacian_term = inst.rhs().dot(eval.solve.potentials);
    eval.f = eval.linear_term + eval.laplacian_term;
    if (with_gradient) {
        eval.gradient =
            (1.0 - eval.solve.voltages.array().square()).matrix();
    }
    return eval;
}

Vector gradient(const BpInstance& inst, const WeightVector& x,
                const SolveOptions& opts, const SolveWarmState* warm) {
    return *potential(inst, x, opts, warm, /*with_gradient=*/true).gradient;
}

Matrix hessian(const BpInstance& inst, const WeightVector& x) {
    const Matrix T = transfer_matrix(inst, x); // checks size and weights
    const LaplacianSolve solve = solve_system(inst, x, inst.rhs());
    const Vector& d = solve.voltages;
    Matrix H = 2.0 * (d * d.transpose()).cwiseProduct(T);
    return 0.5 * (H + H.transpose());
}

double c_const(const BpInstance& inst) {
    const WeightVector ones{Vector::Ones(inst.cols()), 0.0};
    const LaplacianSolve solve = solve_system(inst, ones, inst.rhs());
    return inst.rhs().dot(solve.potentials);
}

double delta_floor(const BpInstance& inst, double eps) {
    if (!(eps > 0.0) || !(eps < 1.0)) {
        std::ostringstream msg;
        msg << "delta_floor: eps = " << eps << " outside (0, 1)";
        throw InvalidEps(msg.str());
    }
    return eps * std::sqrt(c_const(inst)) /
           (2.0 * static_cast<double>(inst.cols()));
}

DualCertificate duality_gap_from_induced(const BpInstance& inst,
                                         const Vector& q,
                                         const SolveOptions& opts) {
    if (q.size() != inst.cols()) {
        std::ostringstream msg;
        msg << "duality_gap: induced solution has length " << q.size()
            << ", expected " << inst.cols();
        throw DimensionMismatch(msg.str());
    }
    const Index m = inst.cols();
    DualCertificate cert;
    if (inst.rhs().norm() == 0.0) {
        // b = 0: the zero solution is optimal and certifies itself.
        cert.nu = Vector::Zero(inst.rows());
        cert.lambda = Vector::Constant(m, 0.5);
        cert.mu = Vector::Constant(m, 0.5);
        cert.rho = 0.0;
        cert.gap = q.lpNorm<1>();
        return cert;
    }

    const WeightVector y{q.array().abs().max(kTinyFloor).matrix(), 0.0};
    const LaplacianSolve solve = solve_system(inst, y, inst.rhs(), nullptr, opts);
    cert.rho = solve.voltages.lpNorm<Eigen::Infinity>();
    const double inv_rho = 1.0 / cert.rho;
    cert.nu = inv_rho * solve.potentials;
    const Vector at_nu = inv_rho * solve.voltages; // A^T nu
    cert.lambda = 0.5 * (1.0 - at_nu.array()).matrix();
    cert.mu = 0.5 * (1.0 + at_nu.array()).matrix();
    const double f_at_y = y.x.sum() + inst.rhs().dot(solve.potentials);
    cert.gap = (1.0 + inv_rho) * q.lpNorm<1>() - inv_rho * f_at_y;
    return cert;
}

DualCertificate duality_gap(const BpInstance& inst, const WeightVector& x,
                            const SolveOptions& opts) {
    const LaplacianSolve solve = solve_system(inst, x, inst.rhs(), nullptr, opts);
    return duality_gap_from_induced(inst, solve.induced, opts);
}

double bregman_entropy(const Vector& x, const Vector& y) {
    if (x.size() != y.size()) {
        throw DimensionMismatch("bregman_entropy: size mismatch");
    }
    double acc = 0.0;
    for (Index j = 0; j < x.size(); ++j) {
        if (!(x[j] > 0.0) || !(y[j] > 0.0)) {
            std::ostringstream msg;
            msg << "bregman_entropy: entry " << j
                << " must be strictly positive";
            throw NonPositiveInput(msg.str());
        }
        acc += x[j] * std::log(x[j] / y[j]) - x[j] + y[j];
    }
    return acc;
}

double l1_variational_check(const Vector& s) {
    double acc = 0.0;
    for (Index j = 0; j < s.size(); ++j) {
        const double a = std::abs(s[j]);
        if (a == 0.0) {
            std::ostringstream msg;
            msg << "l1_variational_check: entry " << j << " is zero";
            throw ZeroEntry(msg.str());
        }
        acc += 0.5 * (s[j] * s[j] / a + a);
    }
    return acc;
}

} // namespace lapbp
