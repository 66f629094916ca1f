#include <Eigen/Cholesky>
#include <cmath>

#include "doctest.h"
#include "fd_util.hpp"
#include "rgm/ar_process.hpp"
#include "rgm/maxent.hpp"
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

}  // namespace

TEST_CASE("maxent_dual_objective closed forms and dense oracle") {
    auto I = banded_identity(1, 4, 0);
    CHECK(maxent_dual_objective(I, I) == doctest::Approx(4.0));

    auto X = banded_identity(1, 4, 0, 0.5);
    auto S2 = banded_identity(1, 4, 0, 2.0);
    CHECK(maxent_dual_objective(X, S2) == doctest::Approx(4.0 * std::log(2.0) + 4.0));

    CounterRng rng(3);
    auto Xr = random_spd_banded(rng, 2, 8, 2);
    auto Sr = random_spd_banded(rng, 2, 8, 2);
    const double dense = -dense_logdet(to_dense(Xr)) +
                         (to_dense(Xr).transpose() * to_dense(Sr)).trace();
    CHECK(maxent_dual_objective(Xr, Sr) == doctest::Approx(dense).epsilon(1e-9));
}

TEST_CASE("maxent gradient matches central finite differences") {
    CounterRng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const int m = 1 + static_cast<int>(rng.below(2));
        const int n = 1 + static_cast<int>(rng.below(2));
        const int N = 2 * n + 2 + 2 * static_cast<int>(rng.below(3));
        auto X = random_spd_banded(rng, m, N, n);
        auto S = random_spd_banded(rng, m, N, n);

        const auto analytic = coordinate_scale_banded(maxent_dual_gradient(X, S).blocks(), N);
        const auto fd = fd_gradient_banded(
            [&](const BandedBlockCirculant& Y) { return maxent_dual_objective(Y, S); }, X);
        for (int k = 0; k <= n; ++k) {
            const double scale = std::max(1.0, fd[static_cast<size_t>(k)].cwiseAbs().maxCoeff());
            CHECK(max_abs_diff(analytic[static_cast<size_t>(k)], fd[static_cast<size_t>(k)]) /
                      scale < 1e-6);
        }
    }
}

TEST_CASE("solve_maxent on the scalar diagonal case") {
    auto sigma = banded_identity(1, 6, 0, 2.0);
    auto [X, report] = solve_maxent(sigma);
    CHECK(report.converged);
    CHECK(X.block(0)(0, 0) == doctest::Approx(0.5).epsilon(1e-8));
    auto completion = complete_covariance(X);
    CHECK(max_block_diff(completion, circulant_identity(1, 6, 2.0)) < 1e-8);
}

TEST_CASE("solve_maxent recovers a banded ground truth") {
    // Note the zero-padded embedding of this sigma_hat need not be PD; the
    // data is still completable (X*^{-1} completes it) and the dual only sees
    // sigma_hat through pairings with banded matrices.
    CounterRng rng(11);
    auto Xstar = random_spd_banded(rng, 2, 8, 1);
    auto sigma = project_band(inverse(embed_banded(Xstar)), 1);

    auto [X, report] = solve_maxent(sigma);
    CHECK(report.converged);
    CHECK(max_block_diff(X, Xstar) < 1e-6);
}

TEST_CASE("solve_maxent satisfies the first-order condition and the constraint") {
    CounterRng rng(13);
    auto sigma = random_spd_banded(rng, 2, 10, 2);
    auto [X, report] = solve_maxent(sigma);
    REQUIRE(report.converged);

    // KKT: P_band(X^{-1}) = sigma_hat.
    auto Xinv_band = project_band(inverse(embed_banded(X)), 2);
    CHECK(max_block_diff(Xinv_band, sigma) < 1e-6);

    // Completion matches the given band and has an exactly banded inverse.
    auto Sigma = complete_covariance(X);
    CHECK(max_block_diff(project_band(Sigma, 2), sigma) < 1e-6);
}

TEST_CASE("descent is monotone across accepted iterations") {
    CounterRng rng(17);
    auto sigma = random_spd_banded(rng, 2, 8, 1);
    SolverOptions opts;
    std::vector<double> trace;
    opts.on_accept = [&](int, double obj) { trace.push_back(obj); };
    auto [X, report] = solve_maxent(sigma, opts);
    REQUIRE(trace.size() > 2);
    for (size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-12);
}

TEST_CASE("completion maximizes entropy among feasible perturbations") {
    // m = 1, n = 1, N = 6: perturb the free blocks of the completion and
    // check no feasible neighbor beats the solved log-determinant.
    CounterRng rng(23);
    auto sigma = random_spd_banded(rng, 1, 6, 1, 1.0, 1.0);
    auto [X, report] = solve_maxent(sigma);
    REQUIRE(report.converged);
    auto Sigma = complete_covariance(X);
    const double best = logdet(Sigma);

    int tested = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        BlockCirculant pert = Sigma;
        pert.block(2)(0, 0) += 0.2 * rng.gaussian();
        pert.block(3)(0, 0) += 0.2 * rng.gaussian();
        // Feasibility: banded part pinned to sigma_hat, so only PD can fail.
        if (min_symbol_eig(pert) <= 0.0) continue;
        ++tested;
        CHECK(logdet(pert) <= best + 1e-8);
    }
    CHECK(tested > 100);
}

TEST_CASE("reciprocal approximation approaches the true lags as N grows") {
    // Band the true concentration of a stable AR model into a circulant of
    // period N; the inverse's leading blocks approach the stationary lags as
    // N grows (the completion with those blocks then matches by construction).
    // Poles at 0.9 keep the N = 64 aliasing error far above roundoff.
    ARModel model;
    model.m = 2;
    model.n = 1;
    Matrix B1(2, 2);
    B1 << -0.9, -0.3, 0.0, -0.85;
    model.coeffs = {Matrix::Identity(2, 2), B1};
    model.innovation = Matrix::Identity(2, 2);
    REQUIRE(companion_spectral_radius(model) == doctest::Approx(0.9));
    const auto truth = ar_true_lags(model, 1);
    const auto band = ar_concentration_band(model);

    auto deviation = [&](int N) {
        auto Sigma = complete_covariance(BandedBlockCirculant(2, N, 1, band));
        double dev = 0.0;
        for (int k = 0; k <= 1; ++k) {
            dev = std::max(dev,
                           (Sigma.block(k) - truth[static_cast<size_t>(k)]).cwiseAbs().maxCoeff());
        }
        return dev;
    };
    const double d64 = deviation(64);
    const double d256 = deviation(256);
    CHECK(d256 < d64);
    CHECK(d64 > 1e-8);  // the N = 64 aliasing error is genuinely visible
}

TEST_CASE("solve_maxent rejects indefinite input") {
    std::vector<Matrix> blocks{Matrix::Ones(1, 1), Matrix::Ones(1, 1)};
    auto bad = make_banded(1, 8, 1, blocks);  // symbol 1 + 2cos dips negative
    CHECK_THROWS_AS(solve_maxent(bad), NumericalError);
}
