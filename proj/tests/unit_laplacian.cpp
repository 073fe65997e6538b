#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "lapbp/dissipation.hpp"
#include "lapbp/laplacian.hpp"
#include "test_helpers.hpp"

using namespace lapbp;

namespace {

BpInstance triangle_instance() {
    // Grounded incidence of a triangle, unit flow in at node 0, out at node 1.
    const Matrix A = incidence_reduced(3, {{0, 1}, {1, 2}, {0, 2}}, 2);
    const Vector b = (Vector(2) << 1.0, -1.0).finished();
    return BpInstance(A, b);
}

} // namespace

TEST_CASE("laplacian_matrix on the unit-weight triangle") {
    const BpInstance inst = triangle_instance();
    const WeightVector x{Vector::Ones(3), 0.0};
    const Matrix L = laplacian_matrix(inst, x);
    Matrix expected(2, 2);
    expected << 2.0, -1.0,
                -1.0, 2.0;
    CHECK((L - expected).norm() <= 1e-15);
}

TEST_CASE("laplacian_matrix rejects nonpositive weights") {
    const BpInstance inst = triangle_instance();
    CHECK_THROWS_AS(
        laplacian_matrix(inst, {(Vector(3) << 1.0, 0.0, 1.0).finished(), 0.0}),
        NonPositiveWeight);
    CHECK_THROWS_AS(
        laplacian_matrix(inst, {(Vector(3) << 1.0, -2.0, 1.0).finished(), 0.0}),
        NonPositiveWeight);
    CHECK_THROWS_AS(laplacian_matrix(inst, {Vector::Ones(2), 0.0}),
                    DimensionMismatch);
}

TEST_CASE("solve_system on scalar and two-column examples") {
    // A = [[1]], b = (1), x = (2):  L = 2, p = 1/2, d = 1/2, q = 1.
    const BpInstance scalar(Matrix::Constant(1, 1, 1.0),
                            Vector::Constant(1, 1.0));
    const LaplacianSolve s1 =
        solve_system(scalar, {Vector::Constant(1, 2.0), 0.0}, scalar.rhs());
    CHECK(s1.potentials[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(s1.voltages[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(s1.induced[0] == doctest::Approx(1.0).epsilon(1e-14));

    // A = [[1, 1]], b = (1), x = 1:  L = 2, p = 1/2, d = (1/2, 1/2).
    const BpInstance pair((Matrix(1, 2) << 1.0, 1.0).finished(),
                          Vector::Constant(1, 1.0));
    const LaplacianSolve s2 =
        solve_system(pair, {Vector::Ones(2), 0.0}, pair.rhs());
    CHECK(s2.potentials[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(s2.induced[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(s2.induced[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("solve_system output satisfies its defining identities") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const BpInstance inst = testing::tiny_instance(seed, 10);
        const WeightVector x{
            testing::random_weights(inst.cols(), 0.3, 3.0, seed), 0.0};
        const LaplacianSolve solve = solve_system(inst, x, inst.rhs());

        CHECK((solve.voltages - inst.matrix().transpose() * solve.potentials)
                  .norm() <= 1e-12);
        CHECK((solve.induced -
               (x.x.array() * solve.voltages.array()).matrix())
                  .norm() == 0.0);
        // q is feasible: A q = b.
        CHECK((inst.matrix() * solve.induced - inst.rhs()).norm() <=
              1e-10 * (1.0 + inst.rhs().norm()));
        CHECK(solve.residual_norm <= 1e-12);
        CHECK(solve.warm_state.valid());
    }
}

TEST_CASE("solve_system handles a zero right-hand side") {
    const BpInstance inst = triangle_instance();
    const LaplacianSolve solve =
        solve_system(inst, {Vector::Ones(3), 0.0}, Vector::Zero(2));
    CHECK(solve.potentials.norm() == 0.0);
    CHECK(solve.induced.norm() == 0.0);
    CHECK(solve.residual_norm == 0.0);
}

TEST_CASE("iterative path agrees with the dense path and uses warm starts") {
    const BpInstance inst = random_instance(60, 30, 0.4, 5);
    const Vector base = testing::random_weights(inst.cols(), 0.5, 2.0, 6);

    SolveOptions cg;
    cg.method = SolveMethod::ConjugateGradient;
    SolveOptions dense;
    dense.method = SolveMethod::DenseCholesky;

    const WeightVector x0{base, 0.0};
    const LaplacianSolve cold = solve_system(inst, x0, inst.rhs(), nullptr, cg);
    const LaplacianSolve exact =
        solve_system(inst, x0, inst.rhs(), nullptr, dense);
    CHECK((cold.potentials - exact.potentials).norm() <=
          1e-8 * (1.0 + exact.potentials.norm()));

    // Warm start at slightly perturbed weights matches a cold solve there.
    const WeightVector x1{1.001 * base, 0.0};
    const LaplacianSolve warm =
        solve_system(inst, x1, inst.rhs(), &cold.warm_state, cg);
    const LaplacianSolve cold1 =
        solve_system(inst, x1, inst.rhs(), nullptr, cg);
    CHECK((warm.potentials - cold1.potentials).norm() <=
          10 * cg.solve_tol * (1.0 + cold1.potentials.norm()));
    CHECK(warm.residual_norm <= cg.solve_tol);
}

TEST_CASE("iterative path reports NoConvergence when starved of iterations") {
    const BpInstance inst = random_instance(40, 20, 0.5, 9);
    SolveOptions opts;
    opts.method = SolveMethod::ConjugateGradient;
    opts.max_cg_iters = 1;
    try {
        solve_system(inst, {Vector::Ones(40), 0.0}, inst.rhs(), nullptr, opts);
        FAIL("expected NoConvergence");
    } catch (const NoConvergence& e) {
        CHECK(e.residual > opts.solve_tol);
    }
}

TEST_CASE("conditioning diagnostic is off by default and opt-in") {
    // Weights collapsed onto a sparse support (the shape solver iterates
    // take near convergence): only 2 of 6 directions carry O(1) weight, so
    // the condition number is ~1e15, yet b lies in the strongly weighted
    // range and the solve stays accurate.
    const BpInstance inst = random_instance(8, 6, 0.25, 13);
    REQUIRE((inst.ground_truth()->array() != 0.0).count() == 2);
    const Vector x =
        inst.ground_truth()->array().abs().max(1e-15).matrix();
    const WeightVector w{x, 1e-15};

    const LaplacianSolve solve = solve_system(inst, w, inst.rhs());
    CHECK((inst.matrix() * solve.induced - inst.rhs()).norm() <=
          1e-8 * (1.0 + inst.rhs().norm()));

    SolveOptions strict;
    strict.check_condition = true;
    try {
        solve_system(inst, w, inst.rhs(), nullptr, strict);
        FAIL("expected IllConditioned");
    } catch (const IllConditioned& e) {
        CHECK(e.estimate > strict.cond_limit);
    }
}

TEST_CASE("transfer_matrix on the examples") {
    const BpInstance scalar(Matrix::Constant(1, 1, 1.0),
                            Vector::Constant(1, 1.0));
    const Matrix T1 = transfer_matrix(scalar, {Vector::Ones(1), 0.0});
    CHECK(T1(0, 0) == doctest::Approx(1.0).epsilon(1e-14));

    const BpInstance pair((Matrix(1, 2) << 1.0, 1.0).finished(),
                          Vector::Constant(1, 1.0));
    const Matrix T2 = transfer_matrix(pair, {Vector::Ones(2), 0.0});
    CHECK((T2 - Matrix::Constant(2, 2, 0.5)).norm() <= 1e-14);
}

TEST_CASE("transfer_matrix enforces its size limit") {
    const Index m = kTransferSizeLimit + 1;
    Matrix A(1, m);
    for (Index j = 0; j < m; ++j) A(0, j) = 1.0 + 0.001 * static_cast<double>(j);
    const BpInstance inst(A, Vector::Constant(1, 1.0));
    CHECK_THROWS_AS(transfer_matrix(inst, {Vector::Ones(m), 0.0}),
                    SizeLimitExceeded);
}

TEST_CASE("voltages reproduce T(x) b-projection and obey the sup bound") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const BpInstance inst = testing::tiny_instance(seed + 40, 9);
        const WeightVector x{
            testing::random_weights(inst.cols(), 0.2, 2.5, seed), 0.0};
        const LaplacianSolve solve = solve_system(inst, x, inst.rhs());
        const Matrix T = transfer_matrix(inst, x);

        // d(x) = T(x) s for any feasible s; use the induced solution itself.
        CHECK((T * solve.induced - solve.voltages).norm() <=
              1e-9 * (1.0 + solve.voltages.norm()));

        // sup-norm bound via the unit-weight dissipation constant.
        const double c = c_const(inst);
        const double bound = std::sqrt(c) / x.x.minCoeff();
        CHECK(solve.voltages.lpNorm<Eigen::Infinity>() <= bound + 1e-9);
    }
}

TEST_CASE("weighted projection has 0/1 eigenvalues and trace n") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const BpInstance inst = testing::tiny_instance(seed + 80, 9);
        const Vector x = testing::random_weights(inst.cols(), 0.5, 2.0, seed);
        const Matrix T = transfer_matrix(inst, {x, 0.0});
        const Vector sqrt_x = x.array().sqrt().matrix();
        const Matrix P =
            sqrt_x.asDiagonal() * T * sqrt_x.asDiagonal();

        Eigen::SelfAdjointEigenSolver<Matrix> eig(P);
        REQUIRE(eig.info() == Eigen::Success);
        for (Index i = 0; i < eig.eigenvalues().size(); ++i) {
            const double lambda = eig.eigenvalues()[i];
            const double dist =
                std::min(std::abs(lambda), std::abs(lambda - 1.0));
            CHECK(dist <= 1e-8);
        }
        CHECK(P.trace() ==
              doctest::Approx(static_cast<double>(inst.rows())).epsilon(1e-10));
    }
}

TEST_CASE("induced solution minimizes the weighted quadratic energy") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const BpInstance inst = testing::tiny_instance(seed + 120, 8);
        const Vector x = testing::random_weights(inst.cols(), 0.3, 2.0, seed);
        const LaplacianSolve solve = solve_system(inst, {x, 0.0}, inst.rhs());

        const double q_energy =
            (solve.induced.array().square() / x.array()).sum();
        // Energy identity: q^T X^{-1} q = b^T p.
        CHECK(q_energy ==
              doctest::Approx(inst.rhs().dot(solve.potentials)).epsilon(1e-10));

        // Any feasible perturbation q + w with A w = 0 has no less energy.
        Eigen::FullPivLU<Matrix> lu(inst.matrix());
        const Matrix null_basis = lu.kernel();
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal;
        for (int trial = 0; trial < 20; ++trial) {
            Vector coeff(null_basis.cols());
            for (Index i = 0; i < coeff.size(); ++i) coeff[i] = normal(rng);
            const Vector other = solve.induced + null_basis * coeff;
            const double other_energy =
                (other.array().square() / x.array()).sum();
            CHECK(other_energy >= q_energy - 1e-10 * (1.0 + q_energy));
        }
    }
}
