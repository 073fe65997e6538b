#include "lapbp/laplacian.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <cmath>
#include <limits>
#include <sstream>

#include "lapbp/kernels.hpp"

namespace lapbp {

namespace {

void check_weights(const BpInstance& inst, const WeightVector& x) {
    if (x.x.size() != inst.cols()) {
        std::ostringstream msg;
        msg << "weights: expected length " << inst.cols() << ", got "
            << x.x.size();
        throw DimensionMismatch(msg.str());
    }
    for (Index j = 0; j < x.x.size(); ++j) {
        if (!(x.x[j] > 0.0) || !std::isfinite(x.x[j])) {
            std::ostringstream msg;
            msg << "weights: entry " << j << " is " << x.x[j]
                << ", must be strictly positive and finite";
            throw NonPositiveWeight(msg.str());
        }
    }
}

// Cholesky factorization with an LDLT fallback for matrices so close to
// singular that LLT hits a non-positive pivot.
class DenseFactor {
public:
    explicit DenseFactor(const Matrix& L) : llt_(L) {
        if (llt_.info() != Eigen::Success) {
            use_ldlt_ = true;
            ldlt_.compute(L);
        }
    }

    Vector solve(const Vector& rhs) const {
        if (use_ldlt_) return ldlt_.solve(rhs);
        return llt_.solve(rhs);
    }

    Matrix solve(const Matrix& rhs) const {
        if (use_ldlt_) return ldlt_.solve(rhs);
        return llt_.solve(rhs);
    }

    double rcond() const {
        return use_ldlt_ ? ldlt_.rcond() : llt_.rcond();
    }

private:
    Eigen::LLT<Matrix> llt_;
    Eigen::LDLT<Matrix> ldlt_;
    bool use_ldlt_ = false;
};

LaplacianSolve solve_dense(const BpInstance& inst, const WeightVector& x,
                           const Vector& rhs, const SolveOptions& opts) {
    const Matrix L = kernels::weighted_gram(inst.matrix(), x.x);
    // The Gram matrix squares the conditioning of sqrt(X) A^T.  An LLT whose
    // pivots stay positive is trusted (with refinement) as the fast path;
    // the moment a pivot degenerates the factorization is abandoned for a
    // pivoted QR of the unsquared factor rather than patched with LDLT,
    // whose output at that point is noise that can destabilize the weight
    // dynamics downstream.
    Eigen::LLT<Matrix> llt(L);
    const bool llt_ok = llt.info() == Eigen::Success;
    auto condition_estimate = [&]() {
        const double rc = llt_ok ? llt.rcond() : 0.0;
        return rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    };

    if (opts.check_condition) {
        const double estimate = condition_estimate();
        if (estimate > opts.cond_limit) {
            std::ostringstream msg;
            msg << "dense solve: condition estimate " << estimate
                << " exceeds limit " << opts.cond_limit;
            throw IllConditioned(msg.str(), estimate);
        }
    }

    const double rhs_norm = rhs.norm();
    auto residual_of = [&](const Vector& cand) {
        return (rhs - L.selfadjointView<Eigen::Lower>() * cand).norm() /
               rhs_norm;
    };
    // A small rhs-relative residual certifies a solve outright, but it is
    // not attainable for every legitimate system: when the weights pinch the
    // network almost apart while current still has to cross the pinch, the
    // true potentials dwarf the right-hand side and the residual floor of
    // any factorization is eps * |L| * |p|, far above eps * |rhs|.  The
    // honest scale-free measure is the backward error
    //     eta(p) = |rhs - L p| / (|L| |p| + |rhs|),
    // which sits at rounding level exactly when p solves a nearby system;
    // candidates are compared, and ultimately accepted, by it.
    const double l_norm = L.norm();
    auto backward_error = [&](const Vector& cand) {
        if (cand.size() != rhs.size() || !cand.allFinite()) {
            return std::numeric_limits<double>::infinity();
        }
        const double r_norm =
            (rhs - L.selfadjointView<Eigen::Lower>() * cand).norm();
        return r_norm / (l_norm * cand.norm() + rhs_norm);
    };
    Vector p;
    double rel = std::numeric_limits<double>::infinity();
    double eta = std::numeric_limits<double>::infinity();
    if (llt_ok) {
        p = llt.solve(rhs);
        rel = p.allFinite() ? residual_of(p)
                            : std::numeric_limits<double>::infinity();
        // One or two refinement passes recover the last digits when the
        // weights span many orders of magnitude.  Refinement at extreme
        // conditioning can diverge, so a pass is kept only when it actually
        // shrinks the residual.
        for (int pass = 0; pass < 2 && rel > opts.solve_tol; ++pass) {
            const Vector r = rhs - L.selfadjointView<Eigen::Lower>() * p;
            const Vector trial = p + llt.solve(r);
            const double trial_rel = residual_of(trial);
            if (!trial.allFinite() || !(trial_rel < rel)) break;
            p = trial;
            rel = trial_rel;
        }
        eta = backward_error(p);
    }
    if (!(rel <= opts.solve_tol)) {
        // Factor the unsquared rectangular matrix: with D rescaling every
        // node by its Gram diagonal, D L D = P R^T R P^T for the pivoted QR
        // of sqrt(X) A^T D, so two triangular solves at the square root of
        // the equilibrated condition number give the potentials.  The
        // rescaling matters: a weight slammed far above the rest, or a node
        // hanging off floored coordinates, stretches the factor's columns by
        // scale alone, and an unscaled pivot cut would then discard
        // directions double precision resolves perfectly well.
        Vector scale = L.diagonal();
        for (Index i = 0; i < scale.size(); ++i) {
            scale[i] = scale[i] > 0.0 ? 1.0 / std::sqrt(scale[i]) : 1.0;
        }
        const Matrix half = x.x.array().sqrt().matrix().asDiagonal() *
                            inst.matrix().transpose() * scale.asDiagonal();
        Eigen::ColPivHouseholderQR<Matrix> qr(half);
        // Pivots below sqrt(eps) of the leading one correspond to Gram
        // eigenvalues below the rounding noise of the Gram matrix itself;
        // keeping them would divide unresolvable rhs components by dead
        // pivots, so cut the rank there and zero the discarded block.
        qr.setThreshold(std::sqrt(std::numeric_limits<double>::epsilon()));
        const Index n = inst.rows();
        const Index rank = std::min(qr.rank(), n);
        if (rank > 0) {
            const Matrix r_factor = qr.matrixR()
                                        .topLeftCorner(rank, rank)
                                        .triangularView<Eigen::Upper>();
            const auto& perm = qr.colsPermutation();
            auto qr_solve = [&](const Vector& v) -> Vector {
                const Vector sv = scale.cwiseProduct(v);
                const Vector c = perm.transpose() * sv;
                const Vector w =
                    r_factor.transpose().triangularView<Eigen::Lower>().solve(
                        c.head(rank));
                Vector u = Vector::Zero(n);
                u.head(rank) =
                    r_factor.triangularView<Eigen::Upper>().solve(w);
                const Vector e = perm * u;
                return scale.cwiseProduct(e);
            };
            Vector cand = qr_solve(rhs);
            double cand_rel = cand.allFinite()
                                  ? residual_of(cand)
                                  : std::numeric_limits<double>::infinity();
            for (int pass = 0; pass < 2 && cand_rel > opts.solve_tol;
                 ++pass) {
                const Vector r =
                    rhs - L.selfadjointView<Eigen::Lower>() * cand;
                const Vector trial = cand + qr_solve(r);
                const double trial_rel = residual_of(trial);
                if (!trial.allFinite() || !(trial_rel < cand_rel)) break;
                cand = trial;
                cand_rel = trial_rel;
            }
            const double cand_eta = backward_error(cand);
            if (cand_eta < eta) {
                p = std::move(cand);
                rel = cand_rel;
                eta = cand_eta;
            }
        }
    }
    // Accept on either certificate: rhs-relative residual within tolerance,
    // or backward error at rounding level.  The floor on the gate guards a
    // user-tightened solve_tol below what double precision can express.
    const double eta_gate = std::max(
        opts.solve_tol, 64.0 * std::numeric_limits<double>::epsilon());
    if (!(rel <= opts.solve_tol) && !(eta <= eta_gate)) {
        const double estimate = condition_estimate();
        std::ostringstream msg;
        msg << "dense solve: residual " << rel << " and backward error "
            << eta << " above tolerance " << opts.solve_tol
            << " after refinement and an equilibrated QR fallback "
            << "(condition estimate " << estimate << ")";
        throw IllConditioned(msg.str(), estimate);
    }

    LaplacianSolve out;
    out.potentials = std::move(p);
    out.residual_norm = rel;
    return out;
}

LaplacianSolve solve_pcg(const BpInstance& inst, const WeightVector& x,
                         const Vector& rhs, const SolveWarmState* warm,
                         const SolveOptions& opts) {
    const Matrix& A = inst.matrix();
    const Index n = inst.rows();
    const double rhs_norm = rhs.norm();
    const long max_iters =
        opts.max_cg_iters > 0 ? opts.max_cg_iters : 10 * n + 200;

    // Jacobi preconditioner: diag(L)_i = sum_j x_j A_ij^2.
    const Vector diag = A.array().square().matrix() * x.x;

    auto apply = [&A, &x](const Vector& v) -> Vector {
        const Vector d = kernels::transpose_matvec(A, v);
        return A * (x.x.array() * d.array()).matrix();
    };

    Vector p = (warm && warm->valid() && warm->potentials.size() == n)
                   ? warm->potentials
                   : Vector::Zero(n);
    Vector r = rhs - apply(p);
    double rel = r.norm() / rhs_norm;
    long iter = 0;
    while (rel > opts.solve_tol && iter < max_iters) {
        Vector z = (r.array() / diag.array()).matrix();
        double rz = r.dot(z);
        Vector dir = z;
        for (; iter < max_iters; ++iter) {
            const Vector Ld = apply(dir);
            const double denom = dir.dot(Ld);
            if (!(denom > 0.0)) break; // restart on breakdown
            const double alpha = rz / denom;
            p += alpha * dir;
            r -= alpha * Ld;
            rel = r.norm() / rhs_norm;
            if (rel <= 0.5 * opts.solve_tol) {
                ++iter;
                break;
            }
            z = (r.array() / diag.array()).matrix();
            const double rz_next = r.dot(z);
            dir = z + (rz_next / rz) * dir;
            rz = rz_next;
        }
        // Recompute the true residual; the recurrence can drift.
        r = rhs - apply(p);
        rel = r.norm() / rhs_norm;
    }
    if (!(rel <= opts.solve_tol)) {
        std::ostringstream msg;
        msg << "pcg: relative residual " << rel << " after " << iter
            << " iterations (target " << opts.solve_tol << ")";
        throw NoConvergence(msg.str(), rel);
    }

    LaplacianSolve out;
    out.potentials = std::move(p);
    out.residual_norm = rel;
    return out;
}

} // namespace

Matrix laplacian_matrix(const BpInstance& inst, const WeightVector& x) {
    check_weights(inst, x);
    return kernels::weighted_gram(inst.matrix(), x.x);
}

LaplacianSolve solve_system(const BpInstance& inst, const WeightVector& x,
                            const Vector& rhs, const SolveWarmState* warm,
                            const SolveOptions& opts) {
    check_weights(inst, x);
    if (rhs.size() != inst.rows()) {
        std::ostringstream msg;
        msg << "solve_system: rhs has length " << rhs.size() << ", expected "
            << inst.rows();
        throw DimensionMismatch(msg.str());
    }
    if (!rhs.allFinite()) {
        throw NonFinite("solve_system: rhs must be finite");
    }

    LaplacianSolve out;
    if (rhs.norm() == 0.0) {
        out.potentials = Vector::Zero(inst.rows());
        out.residual_norm = 0.0;
    } else {
        const bool dense =
            opts.method == SolveMethod::DenseCholesky ||
            (opts.method == SolveMethod::Auto && inst.rows() <= opts.dense_limit);
        out = dense ? solve_dense(inst, x, rhs, opts)
                    : solve_pcg(inst, x, rhs, warm, opts);
    }
    out.voltages = kernels::transpose_matvec(inst.matrix(), out.potentials);
    out.induced = (x.x.array() * out.voltages.array()).matrix();
    out.warm_state.potentials = out.potentials;
    return out;
}

Matrix transfer_matrix(const BpInstance& inst, const WeightVector& x) {
    check_weights(inst, x);
    if (inst.cols() > kTransferSizeLimit) {
        std::ostringstream msg;
        msg << "transfer_matrix: m = " << inst.cols()
            << " exceeds the dense limit " << kTransferSizeLimit;
        throw SizeLimitExceeded(msg.str());
    }
    const Matrix L = kernels::weighted_gram(inst.matrix(), x.x);
    DenseFactor factor(L);
    const Matrix Z = factor.solve(inst.matrix()); // L Z = A
    Matrix T = inst.matrix().transpose() * Z;
    return 0.5 * (T + T.transpose());
}

} // namespace lapbp
