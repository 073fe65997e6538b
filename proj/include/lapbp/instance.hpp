#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "lapbp/errors.hpp"
#include "lapbp/types.hpp"

namespace lapbp {

/// Default relative rank tolerance: singular values below
/// rank_tol * sigma_max are treated as zero.
inline constexpr double kDefaultRankTol = 1e-10;

/// A validated equality-constrained problem  min ||s||_1  s.t.  A s = b,
/// with A (n x m), n <= m, of full row rank.
class BpInstance {
public:
    /// Validates shapes, finiteness, and full row rank of A.
    ///
    /// Throws DimensionMismatch, NonFinite, or RankDeficient (the latter
    /// reports the estimated rank).
    BpInstance(Matrix A, Vector b,
               std::optional<Vector> ground_truth = std::nullopt,
               double rank_tol = kDefaultRankTol);

    const Matrix& matrix() const noexcept { return A_; }
    const Vector& rhs() const noexcept { return b_; }
    Index rows() const noexcept { return A_.rows(); } ///< n
    Index cols() const noexcept { return A_.cols(); } ///< m

    /// Planted solution, when the instance was generated synthetically.
    const std::optional<Vector>& ground_truth() const noexcept {
        return ground_truth_;
    }

private:
    Matrix A_;
    Vector b_;
    std::optional<Vector> ground_truth_;
};

/// Records how a column-duplicated instance folds back to the original.
struct FoldMap {
    Index original_m = 0; ///< column count of the original instance
};

/// Returns the instance whose columns are [a_1 a_1 a_2 a_2 ... a_m a_m]
/// together with the fold map back to the original m columns.
std::pair<BpInstance, FoldMap> duplicate_columns(const BpInstance& inst);

/// Folds a solution of the duplicated instance back to the original:
/// s_j = s'_{2j} + s'_{2j+1} (0-based pairs).  Throws DimensionMismatch
/// if s_prime does not have 2 * original_m entries.
Vector fold_solution(const Vector& s_prime, const FoldMap& map);

/// Reduced node-edge incidence matrix of an undirected connected graph:
/// column e has +1 at the first endpoint of edge e and -1 at the second,
/// with the grounded node's row deleted.  Nodes are 0-based.
///
/// Throws InvalidNodeIndex (endpoint or grounded node out of range, or a
/// self-loop) or DisconnectedGraph.
Matrix incidence_reduced(Index num_nodes,
                         const std::vector<std::pair<Index, Index>>& edges,
                         Index grounded_node);

/// Random dense instance: A has i.i.d. standard normal entries and the
/// planted solution has exactly ceil(density * m) nonzero entries (positions
/// uniform without replacement, values standard normal); b = A * planted.
/// Deterministic for a fixed seed.  Throws InvalidDensity or
/// DimensionMismatch (n > m).
BpInstance random_instance(Index m, Index n, double density,
                           std::uint64_t seed);

} // namespace lapbp
