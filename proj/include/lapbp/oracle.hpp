#pragma once

#include <vector>

#include "lapbp/dissipation.hpp"

namespace lapbp {

/// Largest m the exhaustive oracle will accept (2^m subsets).
inline constexpr Index kOracleSizeLimit = 16;

/// Ground-truth answer from exhaustive enumeration of column subsets.
struct OracleResult {
    double optimum_value = 0;   ///< minimal ||s||_1 over feasible s
    Vector optimum_s;           ///< an optimal solution (full length m)
    std::vector<Index> support; ///< lexicographically smallest optimal support
    long ties = 0;              ///< number of distinct optimal supports
};

/// Solves min ||s||_1 s.t. A s = b by enumerating every subset of at most
/// n linearly independent columns.  Throws TooLarge when m exceeds
/// kOracleSizeLimit and Infeasible (defensively) when no subset is
/// consistent with b.
OracleResult brute_force_bp(const BpInstance& inst);

/// Central-difference gradient of the potential with per-coordinate step
/// h * x_j.  Throws StepTooLarge when any x_j - h x_j would leave the
/// positive orthant (h >= 1).
Vector fd_gradient(const BpInstance& inst, const WeightVector& x,
                   double h = 1e-6);

/// Central-difference Jacobian of the analytic gradient (symmetrized),
/// using the same per-coordinate step rule as fd_gradient.
Matrix fd_hessian(const BpInstance& inst, const WeightVector& x,
                  double h = 1e-6);

} // namespace lapbp
