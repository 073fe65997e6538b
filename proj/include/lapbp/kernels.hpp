#pragma once

#include "lapbp/types.hpp"

/// Hot computational kernels shared by the solver pipeline.
///
/// Each kernel comes in two variants:
///   *_ref  -- straightforward serial implementation, kept as a reference
///             for testing and benchmarking;
///   *_omp  -- OpenMP-parallel implementation (compiles to plain serial code
///             when OpenMP is unavailable).
///
/// The *_omp variants partition work by output element only, so their results
/// are bit-identical regardless of the number of threads.  The undecorated
/// entry points dispatch according to the active kernel mode.
namespace lapbp::kernels {

enum class Mode {
    Auto,     ///< OpenMP variants, threads engaged above a size threshold
    Serial,   ///< force the serial reference variants
    Parallel, ///< force the OpenMP variants with threading always on
};

/// Set the global kernel dispatch mode (thread-safe).
void set_mode(Mode mode);
Mode mode() noexcept;

/// Number of OpenMP threads the kernels may use (1 without OpenMP).
int max_threads() noexcept;

/// L = A * diag(x) * A^T (symmetric n x n).  Requires x.size() == A.cols().
void weighted_gram_ref(const Matrix& A, const Vector& x, Matrix& L);
void weighted_gram_omp(const Matrix& A, const Vector& x, Matrix& L);
void weighted_gram(const Matrix& A, const Vector& x, Matrix& L);
Matrix weighted_gram(const Matrix& A, const Vector& x);

/// d = A^T * p.  Requires p.size() == A.rows().
void transpose_matvec_ref(const Matrix& A, const Vector& p, Vector& d);
void transpose_matvec_omp(const Matrix& A, const Vector& p, Vector& d);
void transpose_matvec(const Matrix& A, const Vector& p, Vector& d);
Vector transpose_matvec(const Matrix& A, const Vector& p);

/// out_j = max(floor, x_j * exp(-inv_beta * g_j)).  Sizes must agree.
void entropic_update_ref(const Vector& x, const Vector& g, double inv_beta,
                         double floor, Vector& out);
void entropic_update_omp(const Vector& x, const Vector& g, double inv_beta,
                         double floor, Vector& out);
void entropic_update(const Vector& x, const Vector& g, double inv_beta,
                     double floor, Vector& out);

} // namespace lapbp::kernels
