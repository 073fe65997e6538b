#include "lapbp/oracle.hpp"

#include <Eigen/QR>
#include <bit>
#include <cmath>
#include <set>
#include <sstream>

namespace lapbp {

namespace {

constexpr double kConsistencyTol = 1e-9;

std::vector<Index> support_of(const Vector& s, double tol) {
    std::vector<Index> out;
    for (Index j = 0; j < s.size(); ++j) {
        if (std::abs(s[j]) > tol) out.push_back(j);
    }
    return out;
}

} // namespace

OracleResult brute_force_bp(const BpInstance& inst) {
    const Index n = inst.rows();
    const Index m = inst.cols();
    if (m > kOracleSizeLimit) {
        std::ostringstream msg;
        msg << "brute_force_bp: m = " << m << " exceeds the limit "
            << kOracleSizeLimit;
        throw TooLarge(msg.str());
    }
    const Matrix& A = inst.matrix();
    const Vector& b = inst.rhs();

    bool found = false;
    double best = 0.0;
    // (value, full-length s) for every consistent basic candidate.
    std::vector<std::pair<double, Vector>> candidates;

    for (unsigned mask = 1; mask < (1u << m); ++mask) {
        const int k = std::popcount(mask);
        if (k > n) continue;

        Matrix AB(n, k);
        std::vector<Index> cols;
        cols.reserve(k);
        for (Index j = 0; j < m; ++j) {
            if (mask & (1u << j)) {
                AB.col(static_cast<Index>(cols.size())) = A.col(j);
                cols.push_back(j);
            }
        }

        Eigen::ColPivHouseholderQR<Matrix> qr(AB);
        if (qr.rank() < k) continue; // dependent columns

        const Vector sB = qr.solve(b);
        if ((AB * sB - b).norm() > kConsistencyTol) continue;

        Vector s = Vector::Zero(m);
        for (int t = 0; t < k; ++t) s[cols[static_cast<std::size_t>(t)]] = sB[t];
        const double value = s.lpNorm<1>();
        if (!found || value < best) best = value;
        found = true;
        candidates.emplace_back(value, std::move(s));
    }
    if (!found) {
        throw Infeasible("brute_force_bp: no consistent column subset");
    }

    const double tie_tol = 1e-9 * std::max(1.0, best);
    const double support_tol = 1e-12 * std::max(1.0, best);
    std::set<std::vector<Index>> optimal_supports;
    const Vector* best_s = nullptr;
    const std::vector<Index>* best_support = nullptr;
    std::vector<std::vector<Index>> kept; // stable storage for comparisons
    kept.reserve(candidates.size());
    for (const auto& [value, s] : candidates) {
        if (value > best + tie_tol) continue;
        kept.push_back(support_of(s, support_tol));
        const auto& sup = kept.back();
        optimal_supports.insert(sup);
        if (!best_support || sup < *best_support) {
            best_support = &sup;
            best_s = &s;
        }
    }

    OracleResult out;
    out.optimum_value = best;
    out.optimum_s = *best_s;
    out.support = *best_support;
    out.ties = static_cast<long>(optimal_supports.size());
    return out;
}

Vector fd_gradient(const BpInstance& inst, const WeightVector& x, double h) {
    if (!(h > 0.0) || h >= 1.0) {
        std::ostringstream msg;
        msg << "fd_gradient: relative step " << h
            << " must lie in (0, 1) to keep x - h x positive";
        throw StepTooLarge(msg.str());
    }
    const Index m = inst.cols();
    Vector g(m);
    WeightVector probe = x;
    for (Index j = 0; j < m; ++j) {
        const double step = h * x.x[j];
        probe.x[j] = x.x[j] + step;
        const double f_plus = potential(inst, probe).f;
        probe.x[j] = x.x[j] - step;
        const double f_minus = potential(inst, probe).f;
        probe.x[j] = x.x[j];
        g[j] = (f_plus - f_minus) / (2.0 * step);
    }
    return g;
}

Matrix fd_hessian(const BpInstance& inst, const WeightVector& x, double h) {
    if (!(h > 0.0) || h >= 1.0) {
        std::ostringstream msg;
        msg << "fd_hessian: relative step " << h
            << " must lie in (0, 1) to keep x - h x positive";
        throw StepTooLarge(msg.str());
    }
    const Index m = inst.cols();
    Matrix H(m, m);
    WeightVector probe = x;
    for (Index j = 0; j < m; ++j) {
        const double step = h * x.x[j];
        probe.x[j] = x.x[j] + step;
        const Vector g_plus = gradient(inst, probe);
        probe.x[j] = x.x[j] - step;
        const Vector g_minus = gradient(inst, probe);
        probe.x[j] = x.x[j];
        H.col(j) = (g_plus - g_minus) / (2.0 * step);
    }
    return 0.5 * (H + H.transpose());
}

} // namespace lapbp
