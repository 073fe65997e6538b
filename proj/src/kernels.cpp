#include "lapbp/kernels.hpp"

#include <atomic>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lapbp::kernels {

namespace {

std::atomic<Mode> g_mode{Mode::Auto};

// Work sizes (in flops, roughly) below which spawning threads is not worth it.
constexpr long kGramThreshold = 1L << 20;
constexpr long kMatvecThreshold = 1L << 16;
constexpr long kElementwiseThreshold = 1L << 15;

bool engage_threads(long work, long threshold) {
    switch (g_mode.load(std::memory_order_relaxed)) {
        case Mode::Parallel: return true;
        case Mode::Serial: return false;
        case Mode::Auto: break;
    }
    return work >= threshold && max_threads() > 1;
}

} // namespace

void set_mode(Mode mode) { g_mode.store(mode, std::memory_order_relaxed); }

Mode mode() noexcept { return g_mode.load(std::memory_order_relaxed); }

int max_threads() noexcept {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// ---- weighted Gram matrix ---------------------------------------------------

void weighted_gram_ref(const Matrix& A, const Vector& x, Matrix& L) {
    const Index n = A.rows();
    const Index m = A.cols();
    L.resize(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index k = 0; k <= i; ++k) {
            double acc = 0.0;
            for (Index j = 0; j < m; ++j) {
                acc += x[j] * A(i, j) * A(k, j);
            }
            L(i, k) = acc;
            L(k, i) = acc;
        }
    }
}

// Each thread owns a contiguous set of output columns k and accumulates the
// rank-one contributions x_j a_j a_j^T restricted to rows i >= k.  Column-major
// storage makes both the A accesses and the L writes unit-stride, and the
// per-column summation order is fixed, so results do not depend on the thread
// count.
void weighted_gram_omp(const Matrix& A, const Vector& x, Matrix& L) {
    const Index n = A.rows();
    const Index m = A.cols();
    L.resize(n, n);
    const long work = static_cast<long>(n) * n * m;
    const bool threads = engage_threads(work, kGramThreshold);
#ifdef _OPENMP
#pragma omp parallel for schedule(static, 1) if (threads)
#else
    (void)threads;
#endif
    for (Index k = 0; k < n; ++k) {
        for (Index i = k; i < n; ++i) L(i, k) = 0.0;
        for (Index j = 0; j < m; ++j) {
            const double c = x[j] * A(k, j);
            if (c == 0.0) continue;
            for (Index i = k; i < n; ++i) {
                L(i, k) += c * A(i, j);
            }
        }
    }
    // Mirror the lower triangle.
    for (Index k = 0; k < n; ++k) {
        for (Index i = k + 1; i < n; ++i) {
            L(k, i) = L(i, k);
        }
    }
}

void weighted_gram(const Matrix& A, const Vector& x, Matrix& L) {
    if (mode() == Mode::Serial) {
        weighted_gram_ref(A, x, L);
    } else {
        weighted_gram_omp(A, x, L);
    }
}

Matrix weighted_gram(const Matrix& A, const Vector& x) {
    Matrix L;
    weighted_gram(A, x, L);
    return L;
}

// ---- transposed matrix-vector product ---------------------------------------

void transpose_matvec_ref(const Matrix& A, const Vector& p, Vector& d) {
    const Index n = A.rows();
    const Index m = A.cols();
    d.resize(m);
    for (Index j = 0; j < m; ++j) {
        double acc = 0.0;
        for (Index i = 0; i < n; ++i) {
            acc += A(i, j) * p[i];
        }
        d[j] = acc;
    }
}

void transpose_matvec_omp(const Matrix& A, const Vector& p, Vector& d) {
    const Index n = A.rows();
    const Index m = A.cols();
    d.resize(m);
    const long work = static_cast<long>(n) * m;
    const bool threads = engage_threads(work, kMatvecThreshold);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (threads)
#else
    (void)threads;
#endif
    for (Index j = 0; j < m; ++j) {
        double acc = 0.0;
        for (Index i = 0; i < n; ++i) {
            acc += A(i, j) * p[i];
        }
        d[j] = acc;
    }
}

void transpose_matvec(const Matrix& A, const Vector& p, Vector& d) {
    if (mode() == Mode::Serial) {
        transpose_matvec_ref(A, p, d);
    } else {
        transpose_matvec_omp(A, p, d);
    }
}

Vector transpose_matvec(const Matrix& A, const Vector& p) {
    Vector d;
    transpose_matvec(A, p, d);
    return d;
}

// ---- multiplicative (entropic) update ---------------------------------------

void entropic_update_ref(const Vector& x, const Vector& g, double inv_beta,
                         double floor, Vector& out) {
    const Index m = x.size();
    out.resize(m);
    for (Index j = 0; j < m; ++j) {
        out[j] = std::max(floor, x[j] * std::exp(-inv_beta * g[j]));
    }
}

void entropic_update_omp(const Vector& x, const Vector& g, double inv_beta,
                         double floor, Vector& out) {
    const Index m = x.size();
    out.resize(m);
    const bool threads = engage_threads(m, kElementwiseThreshold);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (threads)
#else
    (void)threads;
#endif
    for (Index j = 0; j < m; ++j) {
        out[j] = std::max(floor, x[j] * std::exp(-inv_beta * g[j]));
    }
}

void entropic_update(const Vector& x, const Vector& g, double inv_beta,
                     double floor, Vector& out) {
    if (mode() == Mode::Serial) {
        entropic_update_ref(x, g, inv_beta, floor, out);
    } else {
        entropic_update_omp(x, g, inv_beta, floor, out);
    }
}

} // namespace lapbp::kernels
