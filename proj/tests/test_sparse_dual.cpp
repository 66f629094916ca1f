#include <Eigen/Cholesky>
#include <cmath>

#include "doctest.h"
#include "fd_util.hpp"
#include "projection_oracle.hpp"
#include "rgm/maxent.hpp"
#include "rgm/sparse_dual.hpp"
#include "test_util.hpp"

using namespace rgm;
using namespace rgm::test;

namespace {

double dense_logdet(const Matrix& D) {
    Eigen::LLT<Matrix> llt(D);
    REQUIRE(llt.info() == Eigen::Success);
    double ld = 0.0;
    for (int i = 0; i < D.rows(); ++i) ld += 2.0 * std::log(llt.matrixL()(i, i));
    return ld;
}

DualVariable random_feasible_dual(CounterRng& rng, int m, int N, int n, double lambda,
                                  double scale = 0.3) {
    DualVariable Z = DualVariable::zero(m, N, n);
    for (int k = 0; k <= N / 2; ++k) {
        Matrix b = random_matrix(rng, m, m, scale);
        if (k == 0 || k == N / 2) b = (0.5 * (b + b.transpose())).eval();
        Z.Z.block(k) = b;
    }
    return project_constraints(std::move(Z), lambda);
}

}  // namespace

TEST_CASE("h_infinity closed forms") {
    auto diag = banded_identity(3, 8, 1, 2.0);
    CHECK(h_infinity(diag) == 0.0);

    // m = 2, n = 1 single pair: max{0.5, 0.6, 0.8} = 0.8.
    std::vector<Matrix> blocks(2, Matrix::Zero(2, 2));
    blocks[0] << 1.0, 0.5, 0.5, 1.0;
    blocks[1](0, 1) = 0.3;
    blocks[1](1, 0) = -0.4;
    CHECK(h_infinity(make_banded(2, 8, 1, blocks)) == doctest::Approx(0.8));

    // Additivity over pairs: two active pairs sum their maxima.
    std::vector<Matrix> b3(2, Matrix::Zero(3, 3));
    b3[0] = Matrix::Identity(3, 3);
    b3[0](0, 1) = b3[0](1, 0) = 0.7;
    b3[1](1, 2) = 0.2;
    CHECK(h_infinity(make_banded(3, 8, 1, b3)) == doctest::Approx(0.7 + 0.4));
}

TEST_CASE("primal and dual objectives match closed forms and dense oracles") {
    auto I = banded_identity(1, 4, 0);
    CHECK(primal_objective(I, I, 10.0) == doctest::Approx(4.0));

    CounterRng rng(3);
    auto S = random_spd_banded(rng, 2, 8, 1);
    auto sig = random_spd_banded(rng, 2, 8, 1);
    CHECK(primal_objective(S, sig, 0.0) == doctest::Approx(maxent_dual_objective(S, sig)));
    const double dense = -dense_logdet(to_dense(S)) +
                         (to_dense(sig).transpose() * to_dense(S)).trace() +
                         2.5 * h_infinity(S);
    CHECK(primal_objective(S, sig, 2.5) == doctest::Approx(dense).epsilon(1e-9));

    auto Z0 = DualVariable::zero(1, 4, 0);
    CHECK(dual_objective(Z0, banded_identity(1, 4, 0)) == doctest::Approx(-4.0));
    CHECK(dual_objective(Z0, banded_identity(1, 4, 0, 2.0)) ==
          doctest::Approx(-4.0 * std::log(2.0) - 4.0));

    auto Zr = random_feasible_dual(rng, 2, 8, 1, 4.0);
    auto sig2 = random_spd_banded(rng, 2, 8, 1, 1.0, 1.5);
    const Matrix dense_sum = to_dense(sig2) + to_dense(Zr.Z);
    CHECK(dual_objective(Zr, sig2) == doctest::Approx(-dense_logdet(dense_sum) - 16).epsilon(1e-9));
}

TEST_CASE("weighted_l1_project basics") {
    Eigen::VectorXd v(2), w(2);
    v << 0.1, 0.1;
    w << 2, 1;
    CHECK(weighted_l1_project(v, w, 1.0) == v);  // interior point untouched

    v << 1, 0;
    auto u = weighted_l1_project(v, w, 1.0);
    CHECK(u(0) == doctest::Approx(0.5));
    CHECK(u(1) == doctest::Approx(0.0));

    CHECK_THROWS_AS(weighted_l1_project(v, w, 0.0), std::invalid_argument);
    w << 2, -1;
    CHECK_THROWS_AS(weighted_l1_project(v, w, 1.0), std::invalid_argument);
}

TEST_CASE("weighted_l1_project matches the brute-force oracle") {
    CounterRng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 17;
        Eigen::VectorXd v(d), w(d);
        for (int i = 0; i < d; ++i) {
            v(i) = 2.0 * rng.gaussian();
            w(i) = rng.uniform(0.2, 3.0);
        }
        const double r = rng.uniform(0.05, 2.0);
        const Eigen::VectorXd fast = weighted_l1_project(v, w, r);
        const Eigen::VectorXd ref = brute_force_project(v, w, r);
        CHECK((fast - ref).cwiseAbs().maxCoeff() < 1e-7);
        // Feasible and idempotent.
        CHECK(w.cwiseProduct(fast.cwiseAbs()).sum() <= r * (1 + 1e-15));
        CHECK((weighted_l1_project(fast, w, r) - fast).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("project_constraints enforces the dual feasible set") {
    CounterRng rng(11);
    const double lambda = 3.0;

    auto feasible = random_feasible_dual(rng, 3, 8, 1, lambda);
    auto again = project_constraints(feasible, lambda);
    for (int k = 0; k <= 4; ++k) {
        CHECK(max_abs_diff(again.Z.block(k), feasible.Z.block(k)) == 0.0);
    }

    // Radius-0 ball: banded blocks vanish entirely, free blocks untouched.
    DualVariable big = DualVariable::zero(3, 8, 1);
    big.Z.block(0) = Matrix::Ones(3, 3);
    big.Z.block(1) = Matrix::Ones(3, 3);
    big.Z.block(3) = Matrix::Ones(3, 3);
    auto zeroed = project_constraints(big, 0.0);
    CHECK(zeroed.Z.block(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(zeroed.Z.block(1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(max_abs_diff(zeroed.Z.block(3), Matrix::Ones(3, 3)) == 0.0);

    // Random infeasible point: afterwards every group obeys the budget and
    // banded diagonals are exactly zero.
    DualVariable rough = DualVariable::zero(3, 8, 1);
    for (int k = 0; k <= 4; ++k) {
        Matrix b = random_matrix(rng, 3, 3, 2.0);
        if (k == 0 || k == 4) b = (0.5 * (b + b.transpose())).eval();
        rough.Z.block(k) = b;
    }
    auto proj = project_constraints(rough, lambda);
    CHECK(constraint_violation(proj, lambda) <= 0.0);
    for (int j = 0; j <= 1; ++j) {
        CHECK(proj.Z.block(j).diagonal().cwiseAbs().maxCoeff() == 0.0);
    }
    // Z_0 stays symmetric.
    CHECK(max_abs_diff(proj.Z.block(0), proj.Z.block(0).transpose()) == 0.0);
}

TEST_CASE("project_constraints is nonexpansive toward feasible points") {
    CounterRng rng(13);
    const double lambda = 2.0;
    for (int trial = 0; trial < 20; ++trial) {
        DualVariable x = DualVariable::zero(2, 8, 1);
        for (int k = 0; k <= 4; ++k) {
            Matrix b = random_matrix(rng, 2, 2, 1.5);
            if (k == 0 || k == 4) b = (0.5 * (b + b.transpose())).eval();
            x.Z.block(k) = b;
        }
        auto px = project_constraints(x, lambda);
        auto y = random_feasible_dual(rng, 2, 8, 1, lambda);
        auto dist = [&](const DualVariable& a, const DualVariable& b) {
            return inner_product(lin_comb(1, a.Z, -1, b.Z), lin_comb(1, a.Z, -1, b.Z));
        };
        CHECK(dist(px, y) <= dist(x, y) * (1 + 1e-12) + 1e-12);
    }
}

TEST_CASE("dual gradient matches central finite differences") {
    CounterRng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const int m = 1 + static_cast<int>(rng.below(2));
        const int n = 1;
        const int N = 6 + 2 * static_cast<int>(rng.below(2));
        auto sig = random_spd_banded(rng, m, N, n, 1.0, 1.0);
        auto Z = random_feasible_dual(rng, m, N, n, 2.0, 0.1);
        REQUIRE(min_symbol_eig(lin_comb(1.0, embed_banded(sig), 1.0, Z.Z)) > 0.0);

        // Gradient of -logdet(sigma + Z) - mN in the circulant inner product
        // is -(sigma + Z)^{-1}; map to coordinate partials for the FD check.
        const BlockCirculant W = inverse(lin_comb(1.0, embed_banded(sig), 1.0, Z.Z));
        std::vector<Matrix> analytic;
        for (const auto& b : coordinate_scale_circulant(W.blocks(), N)) analytic.push_back(-b);

        const auto fd = fd_gradient_circulant(
            [&](const BlockCirculant& Y) {
                return dual_objective(DualVariable{Y, n}, sig);
            },
            Z.Z, 1e-5);
        for (size_t k = 0; k < fd.size(); ++k) {
            const double scale = std::max(1.0, fd[k].cwiseAbs().maxCoeff());
            CHECK(max_abs_diff(analytic[k], fd[k]) / scale < 1e-6);
        }
    }
}

TEST_CASE("lambda = 0 reduces the dual to the maximum-entropy completion") {
    CounterRng rng(19);
    auto sig = random_spd_banded(rng, 2, 8, 1, 1.0, 1.0);

    SolverOptions opts;
    opts.grad_tol = 1e-9;
    auto [Z, report] = solve_sparse_dual(sig, 0.0, opts);
    CHECK(report.converged);
    auto [X, maxent_report] = solve_maxent(sig, opts);
    REQUIRE(maxent_report.converged);

    const BlockCirculant lhs = inverse(lin_comb(1.0, embed_banded(sig), 1.0, Z.Z));
    CHECK(max_block_diff(lhs, embed_banded(X)) < 1e-5);
}

TEST_CASE("large lambda drives the off-diagonals to zero") {
    CounterRng rng(23);
    auto sig = random_spd_banded(rng, 3, 8, 1, 1.0, 1.0);
    const double lambda = 1e3 * 8 * max_abs(sig);
    auto [Z, report] = solve_sparse_dual(sig, lambda);
    CHECK(report.converged);
    auto model = recover_concentration(sig, Z, lambda);
    CHECK(model.S_o.max_offdiag() < 1e-6);
    CHECK(model.support.offdiag_count() == 0);
}

TEST_CASE("KKT residuals on converged solves") {
    CounterRng rng(29);
    for (int trial = 0; trial < 5; ++trial) {
        const int m = 2 + static_cast<int>(rng.below(2));
        const int n = 1;
        const int N = 12;
        auto sig = random_spd_banded(rng, m, N, n, 1.0, 1.0);
        const double lambda = rng.uniform(0.5, 3.0);

        std::vector<double> trace;
        SolverOptions opts;
        opts.on_accept = [&](int, double obj) { trace.push_back(obj); };
        auto [Z, report] = solve_sparse_dual(sig, lambda, opts);
        REQUIRE(report.converged);

        for (size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-12);
        CHECK(constraint_violation(Z, lambda) <= 0.0);
        CHECK(min_symbol_eig(lin_comb(1.0, embed_banded(sig), 1.0, Z.Z)) > 0.0);

        auto model = recover_concentration(sig, Z, lambda);
        CHECK(model.duality_gap >= -1e-9);
        CHECK(model.duality_gap <= 1e-6 * m * N);
        CHECK(model.leakage <= 1e-6);

        // Weak duality for the recovered primal-feasible candidate.
        const double primal = primal_objective(model.S_o, sig, lambda);
        const double dual = logdet(lin_comb(1.0, embed_banded(sig), 1.0, Z.Z)) + m * N;
        CHECK(primal >= dual - 1e-9);
    }
}

TEST_CASE("solver reaches the same optimum from different feasible starts") {
    CounterRng rng(31);
    auto sig = random_spd_banded(rng, 3, 8, 1, 1.0, 1.0);
    const double lambda = 1.5;

    SolverOptions opts;
    auto [Z1, r1] = solve_sparse_dual(sig, lambda, opts);
    REQUIRE(r1.converged);

    DualVariable init = random_feasible_dual(rng, 3, 8, 1, lambda, 0.05);
    REQUIRE(min_symbol_eig(lin_comb(1.0, embed_banded(sig), 1.0, init.Z)) > 0.0);
    auto [Z2, r2] = solve_sparse_dual(sig, lambda, opts, &init);
    REQUIRE(r2.converged);

    auto m1 = recover_concentration(sig, Z1, lambda);
    auto m2 = recover_concentration(sig, Z2, lambda);
    CHECK(max_block_diff(m1.S_o, m2.S_o) < 10.0 * opts.grad_tol);
}

TEST_CASE("sparsity tends to grow with lambda" * doctest::may_fail()) {
    // Observed-behavior property: the paper proves no path monotonicity, so a
    // violation is flagged rather than failed.
    CounterRng rng(37);
    auto sig = random_spd_banded(rng, 4, 8, 1, 1.0, 1.0);
    double lambda = 0.05;
    int prev_edges = 1000;
    for (int step = 0; step < 5; ++step) {
        auto [Z, report] = solve_sparse_dual(sig, lambda);
        auto model = recover_concentration(sig, Z, lambda);
        CHECK(model.support.offdiag_count() <= prev_edges + 1);
        prev_edges = model.support.offdiag_count();
        lambda *= 4.0;
    }
}

TEST_CASE("recover_concentration identity case and support extraction") {
    auto sig = banded_identity(3, 8, 1);
    auto Z0 = DualVariable::zero(3, 8, 1);
    auto model = recover_concentration(sig, Z0, 1.0);
    CHECK(max_block_diff(model.S_o, banded_identity(3, 8, 1)) < 1e-12);
    CHECK(model.duality_gap == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(model.leakage == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(model.support.offdiag_count() == 0);
    CHECK_FALSE(model.sigma_from_dual);

    // Thresholding: a pattern with entries at (1,2),(2,4),(3,4) (1-based).
    std::vector<Matrix> blocks(3, Matrix::Zero(4, 4));
    blocks[0] = Matrix::Identity(4, 4);
    blocks[1](0, 1) = 0.5;
    blocks[2](1, 3) = -0.25;
    blocks[1](3, 2) = 0.125;
    auto S = make_banded(4, 12, 2, blocks);
    SupportPattern expect(4);
    expect.add(0, 1);
    expect.add(1, 3);
    expect.add(2, 3);
    CHECK(support_from_concentration(S, 1e-3) == expect);
    CHECK(support_from_concentration(S, 10.0).offdiag_count() == 0);
    CHECK(support_from_concentration(banded_identity(2, 8, 1), 0.0).offdiag_count() == 0);
}
