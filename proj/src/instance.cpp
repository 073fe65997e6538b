#include "lapbp/instance.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace lapbp {

namespace {

// Estimated rank of A relative to tol * sigma_max.  Uses an SVD at small
// sizes and a rank-revealing QR beyond, where the SVD becomes the dominant
// cost of instance construction.
Index estimated_rank(const Matrix& A, double rank_tol) {
    if (std::min(A.rows(), A.cols()) <= 400) {
        Eigen::BDCSVD<Matrix> svd(A);
        const auto& sv = svd.singularValues();
        if (sv.size() == 0 || sv[0] == 0.0) return 0;
        const double threshold = rank_tol * sv[0];
        Index rank = 0;
        while (rank < sv.size() && sv[rank] > threshold) ++rank;
        return rank;
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(A);
    qr.setThreshold(rank_tol);
    return qr.rank();
}

} // namespace

BpInstance::BpInstance(Matrix A, Vector b, std::optional<Vector> ground_truth,
                       double rank_tol)
    : A_(std::move(A)), b_(std::move(b)), ground_truth_(std::move(ground_truth)) {
    const Index n = A_.rows();
    const Index m = A_.cols();
    if (n == 0 || m == 0) {
        throw DimensionMismatch("instance: A must be nonempty");
    }
    if (n > m) {
        std::ostringstream msg;
        msg << "instance: A has more rows than columns (" << n << " x " << m
            << "); the system must be underdetermined";
        throw DimensionMismatch(msg.str());
    }
    if (b_.size() != n) {
        std::ostringstream msg;
        msg << "instance: b has length " << b_.size() << ", expected " << n;
        throw DimensionMismatch(msg.str());
    }
    if (!A_.allFinite() || !b_.allFinite()) {
        throw NonFinite("instance: A and b must be finite");
    }
    if (ground_truth_) {
        if (ground_truth_->size() != m) {
            std::ostringstream msg;
            msg << "instance: ground truth has length " << ground_truth_->size()
                << ", expected " << m;
            throw DimensionMismatch(msg.str());
        }
        if (!ground_truth_->allFinite()) {
            throw NonFinite("instance: ground truth must be finite");
        }
    }
    if (rank_tol <= 0.0 || !std::isfinite(rank_tol)) {
        throw NonPositiveInput("instance: rank tolerance must be positive");
    }
    const Index rank = estimated_rank(A_, rank_tol);
    if (rank < n) {
        std::ostringstream msg;
        msg << "instance: A must have full row rank " << n
            << ", estimated rank is " << rank;
        throw RankDeficient(msg.str(), rank);
    }
}

std::pair<BpInstance, FoldMap> duplicate_columns(const BpInstance& inst) {
    const Index n = inst.rows();
    const Index m = inst.cols();
    Matrix A2(n, 2 * m);
    for (Index j = 0; j < m; ++j) {
        A2.col(2 * j) = inst.matrix().col(j);
        A2.col(2 * j + 1) = inst.matrix().col(j);
    }
    std::optional<Vector> truth2;
    if (inst.ground_truth()) {
        Vector t = Vector::Zero(2 * m);
        for (Index j = 0; j < m; ++j) {
            t[2 * j] = (*inst.ground_truth())[j];
        }
        truth2 = std::move(t);
    }
    return {BpInstance(std::move(A2), inst.rhs(), std::move(truth2)),
            FoldMap{m}};
}

Vector fold_solution(const Vector& s_prime, const FoldMap& map) {
    if (s_prime.size() != 2 * map.original_m) {
        std::ostringstream msg;
        msg << "fold_solution: expected " << 2 * map.original_m
            << " entries, got " << s_prime.size();
        throw DimensionMismatch(msg.str());
    }
    Vector s(map.original_m);
    for (Index j = 0; j < map.original_m; ++j) {
        s[j] = s_prime[2 * j] + s_prime[2 * j + 1];
    }
    return s;
}

Matrix incidence_reduced(Index num_nodes,
                         const std::vector<std::pair<Index, Index>>& edges,
                         Index grounded_node) {
    if (num_nodes < 2) {
        throw InvalidNodeIndex("incidence: need at least two nodes");
    }
    if (grounded_node < 0 || grounded_node >= num_nodes) {
        std::ostringstream msg;
        msg << "incidence: grounded node " << grounded_node
            << " out of range [0, " << num_nodes << ")";
        throw InvalidNodeIndex(msg.str());
    }
    for (const auto& [u, v] : edges) {
        if (u < 0 || u >= num_nodes || v < 0 || v >= num_nodes) {
            std::ostringstream msg;
            msg << "incidence: edge (" << u << ", " << v
                << ") out of range [0, " << num_nodes << ")";
            throw InvalidNodeIndex(msg.str());
        }
        if (u == v) {
            std::ostringstream msg;
            msg << "incidence: self-loop at node " << u;
            throw InvalidNodeIndex(msg.str());
        }
    }

    // Connectivity via union-find.
    std::vector<Index> parent(num_nodes);
    std::iota(parent.begin(), parent.end(), Index{0});
    auto find = [&parent](Index a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    };
    for (const auto& [u, v] : edges) {
        parent[find(u)] = find(v);
    }
    const Index root = find(0);
    for (Index v = 1; v < num_nodes; ++v) {
        if (find(v) != root) {
            std::ostringstream msg;
            msg << "incidence: node " << v << " is not connected to node 0";
            throw DisconnectedGraph(msg.str());
        }
    }

    // Full incidence has +1 at the first endpoint, -1 at the second; the
    // grounded row is dropped.
    const Index n = num_nodes - 1;
    Matrix A = Matrix::Zero(n, static_cast<Index>(edges.size()));
    auto row_of = [grounded_node](Index node) -> Index {
        return node < grounded_node ? node : node - 1;
    };
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto& [u, v] = edges[e];
        if (u != grounded_node) A(row_of(u), static_cast<Index>(e)) += 1.0;
        if (v != grounded_node) A(row_of(v), static_cast<Index>(e)) -= 1.0;
    }
    return A;
}

BpInstance random_instance(Index m, Index n, double density,
                           std::uint64_t seed) {
    if (!(density > 0.0) || density > 1.0 || !std::isfinite(density)) {
        std::ostringstream msg;
        msg << "random_instance: density " << density << " outside (0, 1]";
        throw InvalidDensity(msg.str());
    }
    if (n < 1 || m < 1 || n > m) {
        std::ostringstream msg;
        msg << "random_instance: need 1 <= n <= m, got n=" << n << " m=" << m;
        throw DimensionMismatch(msg.str());
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    Matrix A(n, m);
    for (Index j = 0; j < m; ++j) {
        for (Index i = 0; i < n; ++i) {
            A(i, j) = normal(rng);
        }
    }

    // ceil(density * m) with a guard against 0.2 * 100 = 20.000000000000004.
    const double target = density * static_cast<double>(m);
    Index nnz = static_cast<Index>(std::ceil(target - 1e-9));
    nnz = std::clamp<Index>(nnz, 1, m);

    // Support by partial Fisher-Yates: uniform without replacement.
    std::vector<Index> perm(m);
    std::iota(perm.begin(), perm.end(), Index{0});
    for (Index i = 0; i < nnz; ++i) {
        std::uniform_int_distribution<Index> pick(i, m - 1);
        std::swap(perm[i], perm[pick(rng)]);
    }
    Vector truth = Vector::Zero(m);
    for (Index i = 0; i < nnz; ++i) {
        truth[perm[i]] = normal(rng);
    }

    Vector b = A * truth;
    return BpInstance(std::move(A), std::move(b), std::move(truth));
}

} // namespace lapbp
