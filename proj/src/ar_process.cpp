#include "rgm/ar_process.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "rgm/rng.hpp"

namespace rgm {

namespace {

/// A_k = -B_0^{-1} B_k for k = 1..n.
std::vector<Matrix> transition_coeffs(const ARModel& model) {
    Eigen::PartialPivLU<Matrix> lu(model.coeffs[0]);
    std::vector<Matrix> A;
    A.reserve(static_cast<size_t>(model.n));
    for (int k = 1; k <= model.n; ++k) A.push_back(-lu.solve(model.coeffs[static_cast<size_t>(k)]));
    return A;
}

Matrix companion_matrix(const std::vector<Matrix>& A, int m) {
    const int n = static_cast<int>(A.size());
    Matrix C = Matrix::Zero(m * n, m * n);
    for (int k = 0; k < n; ++k) C.block(0, k * m, m, m) = A[static_cast<size_t>(k)];
    for (int k = 1; k < n; ++k) C.block(k * m, (k - 1) * m, m, m) = Matrix::Identity(m, m);
    return C;
}

}  // namespace

void ARModel::validate() const {
    if (m < 1 || n < 0) throw std::invalid_argument("ARModel: need m >= 1, n >= 0");
    if (static_cast<int>(coeffs.size()) != n + 1) {
        throw std::invalid_argument("ARModel: expected n + 1 coefficient blocks");
    }
    for (const auto& b : coeffs) {
        if (b.rows() != m || b.cols() != m) throw std::invalid_argument("ARModel: block not m x m");
    }
    if (innovation.rows() != m || innovation.cols() != m) {
        throw std::invalid_argument("ARModel: innovation covariance not m x m");
    }
    if ((innovation - innovation.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw std::invalid_argument("ARModel: innovation covariance not symmetric");
    }
    Eigen::LLT<Matrix> llt(innovation);
    if (llt.info() != Eigen::Success) {
        throw std::invalid_argument("ARModel: innovation covariance not positive definite");
    }
    if (std::abs(Eigen::PartialPivLU<Matrix>(coeffs[0]).determinant()) < 1e-300) {
        throw std::invalid_argument("ARModel: B_0 is singular");
    }
}

double companion_spectral_radius(const ARModel& model) {
    model.validate();
    if (model.n == 0) return 0.0;
    const Matrix C = companion_matrix(transition_coeffs(model), model.m);
    Eigen::EigenSolver<Matrix> es(C, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_stable(const ARModel& model) { return companion_spectral_radius(model) < 1.0; }

Matrix simulate_ar(const ARModel& model, long T, std::uint64_t seed, long burn_in) {
    if (!is_stable(model)) throw NumericalError("simulate_ar: model is unstable");
    if (T < 1) throw std::invalid_argument("simulate_ar: T must be >= 1");
    if (burn_in < 0) burn_in = 10L * model.n + 500;

    const int m = model.m;
    const int n = model.n;
    const auto A = transition_coeffs(model);
    // x(t) = sum_k A_k x(t-k) + B_0^{-1} L z,  W = L L^T.
    Eigen::LLT<Matrix> llt(model.innovation);
    const Matrix noise_shaper = Eigen::PartialPivLU<Matrix>(model.coeffs[0]).solve(Matrix(llt.matrixL()));

    CounterRng rng(seed);
    // history[k-1] holds x(t-k); zero initial state.
    std::vector<Eigen::VectorXd> history(static_cast<size_t>(n), Eigen::VectorXd::Zero(m));
    Matrix out(T, m);
    Eigen::VectorXd z(m);
    for (long t = -burn_in; t < T; ++t) {
        for (int i = 0; i < m; ++i) z(i) = rng.gaussian();
        Eigen::VectorXd x = noise_shaper * z;
        for (int k = 1; k <= n; ++k) x += A[static_cast<size_t>(k - 1)] * history[static_cast<size_t>(k - 1)];
        for (int k = n - 1; k > 0; --k) history[static_cast<size_t>(k)] = history[static_cast<size_t>(k - 1)];
        if (n > 0) history[0] = x;
        if (t >= 0) out.row(t) = x.transpose();
    }
    return out;
}

CovarianceEstimate estimate_covlags(const Matrix& samples, int n) {
    const long T = samples.rows();
    const int m = static_cast<int>(samples.cols());
    if (n < 0) throw std::invalid_argument("estimate_covlags: n must be >= 0");
    if (T <= n) throw std::invalid_argument("estimate_covlags: need T > n");

    CovarianceEstimate est;
    est.m = m;
    est.n = n;
    est.T = T;
    for (int k = 0; k <= n; ++k) {
        Matrix R = samples.middleRows(k, T - k).transpose() * samples.middleRows(0, T - k) /
                   static_cast<double>(T);
        if (k == 0) R = (0.5 * (R + R.transpose())).eval();
        est.lags.push_back(std::move(R));
    }
    return est;
}

ComplexMatrix ar_concentration_at(const ARModel& model, double theta) {
    const int m = model.m;
    ComplexMatrix Bz = ComplexMatrix::Zero(m, m);
    for (int k = 0; k <= model.n; ++k) {
        const std::complex<double> w(std::cos(theta * k), -std::sin(theta * k));
        Bz += w * model.coeffs[static_cast<size_t>(k)];
    }
    const Matrix Winv = Eigen::LLT<Matrix>(model.innovation).solve(Matrix::Identity(m, m));
    ComplexMatrix G = Bz.adjoint() * Winv.cast<std::complex<double>>() * Bz;
    return 0.5 * (G + G.adjoint());
}

SymbolSpectrum ar_true_spectrum(const ARModel& model, int N) {
    if (!is_stable(model)) throw NumericalError("ar_true_spectrum: model is unstable");
    if (N < 2 || N % 2 != 0) throw std::invalid_argument("ar_true_spectrum: N must be even");
    const int m = model.m;
    std::vector<ComplexMatrix> samples(static_cast<size_t>(N));
    const ComplexMatrix eye = ComplexMatrix::Identity(m, m);
    for (int l = 0; l <= N / 2; ++l) {
        const ComplexMatrix G = ar_concentration_at(model, 2.0 * M_PI * l / N);
        Eigen::LLT<ComplexMatrix> llt(G);
        if (llt.info() != Eigen::Success) {
            throw NumericalError("ar_true_spectrum: inverse spectrum sample not PD");
        }
        ComplexMatrix s = llt.solve(eye);
        s = 0.5 * (s + s.adjoint()).eval();
        if (l == 0 || l == N / 2) s.imag().setZero();
        samples[static_cast<size_t>(l)] = s;
    }
    for (int l = N / 2 + 1; l < N; ++l) {
        samples[static_cast<size_t>(l)] = samples[static_cast<size_t>(N - l)].conjugate();
    }
    return SymbolSpectrum(m, N, std::move(samples));
}

std::vector<Matrix> ar_concentration_band(const ARModel& model) {
    Eigen::LLT<Matrix> llt(model.innovation);
    std::vector<Matrix> S;
    for (int k = 0; k <= model.n; ++k) {
        Matrix Sk = Matrix::Zero(model.m, model.m);
        for (int j = 0; j + k <= model.n; ++j) {
            Sk += model.coeffs[static_cast<size_t>(j)].transpose() *
                  llt.solve(model.coeffs[static_cast<size_t>(j + k)]);
        }
        if (k == 0) Sk = (0.5 * (Sk + Sk.transpose())).eval();
        S.push_back(std::move(Sk));
    }
    return S;
}

SupportPattern ar_inverse_spectrum_support(const ARModel& model, double tol, int grid_points) {
    model.validate();
    const int m = model.m;
    if (grid_points <= 0) grid_points = std::max(64, 8 * (model.n + 1));
    Matrix peak = Matrix::Zero(m, m);
    for (int g = 0; g < grid_points; ++g) {
        const ComplexMatrix G = ar_concentration_at(model, 2.0 * M_PI * g / grid_points);
        peak = peak.cwiseMax(G.cwiseAbs());
    }
    SupportPattern omega(m);
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            if (std::max(peak(i, j), peak(j, i)) > tol) omega.add(i, j);
        }
    }
    return omega;
}

std::vector<Matrix> ar_true_lags(const ARModel& model, int upto) {
    if (!is_stable(model)) throw NumericalError("ar_true_lags: model is unstable");
    if (upto < 0) throw std::invalid_argument("ar_true_lags: upto must be >= 0");
    const int m = model.m;
    const int n = model.n;
    Eigen::PartialPivLU<Matrix> b0(model.coeffs[0]);
    const Matrix Qv = b0.solve(b0.solve(model.innovation).transpose()).transpose();

    std::vector<Matrix> R;
    if (n == 0) {
        R.push_back(0.5 * (Qv + Qv.transpose()));
        for (int k = 1; k <= upto; ++k) R.push_back(Matrix::Zero(m, m));
        return R;
    }

    const auto A = transition_coeffs(model);
    // State covariance P = sum_j M^j Q (M^T)^j by doubling.
    Matrix M = companion_matrix(A, m);
    Matrix Q = Matrix::Zero(m * n, m * n);
    Q.topLeftCorner(m, m) = Qv;
    Matrix P = Q;
    for (int it = 0; it < 64; ++it) {
        P = (P + M * P * M.transpose()).eval();
        M = (M * M).eval();
        if (!P.allFinite()) throw NumericalError("ar_true_lags: Lyapunov iteration diverged");
        if (M.cwiseAbs().maxCoeff() < 1e-14) break;
    }
    // P block (0, j) = R_j for j < n; higher lags via the Yule-Walker recursion.
    for (int k = 0; k < n && k <= upto; ++k) {
        Matrix Rk = P.block(0, k * m, m, m);
        if (k == 0) Rk = (0.5 * (Rk + Rk.transpose())).eval();
        R.push_back(std::move(Rk));
    }
    for (int k = static_cast<int>(R.size()); k <= upto; ++k) {
        Matrix Rk = Matrix::Zero(m, m);
        for (int j = 1; j <= n; ++j) {
            const Matrix& Rprev =
                (k - j >= 0) ? R[static_cast<size_t>(k - j)] : Matrix(R[static_cast<size_t>(j - k)].transpose());
            Rk += A[static_cast<size_t>(j - 1)] * Rprev;
        }
        R.push_back(std::move(Rk));
    }
    return R;
}

GeneratedModel generate_random_sparse_ar(int m, int n, std::uint64_t seed, double sparsity,
                                         double pole_bound) {
    if (m < 1 || n < 0) throw std::invalid_argument("generate_random_sparse_ar: bad dimensions");
    if (pole_bound <= 0.0 || pole_bound >= 1.0) {
        throw std::invalid_argument("generate_random_sparse_ar: pole_bound must be in (0,1)");
    }
    if (sparsity < 0.0 || sparsity > 1.0) {
        throw std::invalid_argument("generate_random_sparse_ar: sparsity must be in [0,1]");
    }

    CounterRng rng(seed);

    // Mask with distinct source rows: row a carries at most one entry (a, k),
    // k > a, so products B_j^T B_l acquire no fill-in beyond the mask. This
    // caps the edge count at m - 1.
    int want = static_cast<int>(std::lround(sparsity * (m * (m - 1) / 2)));
    want = std::min(want, m - 1);
    if (n == 0) want = 0;  // order zero has a diagonal inverse spectrum
    std::vector<int> rows(static_cast<size_t>(std::max(m - 1, 0)));
    for (int i = 0; i < m - 1; ++i) rows[static_cast<size_t>(i)] = i;
    for (int i = m - 2; i > 0; --i) {
        std::swap(rows[static_cast<size_t>(i)], rows[rng.below(static_cast<std::uint64_t>(i + 1))]);
    }
    std::vector<std::pair<int, int>> mask;
    for (int e = 0; e < want; ++e) {
        const int a = rows[static_cast<size_t>(e)];
        const int k = a + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(m - 1 - a)));
        mask.emplace_back(a, k);
    }

    ARModel model;
    model.m = m;
    model.n = n;
    model.innovation = Matrix::Identity(m, m);
    model.coeffs.push_back(Matrix::Identity(m, m));
    for (int j = 1; j <= n; ++j) {
        Matrix B = Matrix::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            B(i, i) = (rng.uniform01() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.2, 0.5);
        }
        for (const auto& [a, k] : mask) {
            B(a, k) = (rng.uniform01() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.4, 0.9);
        }
        model.coeffs.push_back(std::move(B));
    }

    // Scaling B_k by g^k moves every pole modulus by the factor g.
    for (int attempt = 0; attempt < 8; ++attempt) {
        const double rho = companion_spectral_radius(model);
        if (rho <= pole_bound) {
            return GeneratedModel{model, ar_inverse_spectrum_support(model)};
        }
        const double g = 0.999 * pole_bound / rho;
        double gk = 1.0;
        for (int j = 1; j <= n; ++j) {
            gk *= g;
            model.coeffs[static_cast<size_t>(j)] *= gk;
        }
    }
    throw NumericalError("generate_random_sparse_ar: failed to stabilize model");
}

SigmaHatResult build_sigma_hat(const CovarianceEstimate& est, int N) {
    if (N <= 2 * est.n || N % 2 != 0) {
        throw std::invalid_argument("build_sigma_hat: need even N > 2n");
    }
    BandedBlockCirculant sigma(est.m, N, est.n, est.lags);
    const double lo = min_symbol_eig(embed_banded(sigma));
    double loading = 0.0;
    if (lo <= 0.0) {
        double eps = 1e-6 * sigma.block(0).trace() / est.m;
        if (eps <= 0.0) eps = 1e-6;  // degenerate all-zero lags
        loading = std::abs(lo) + eps;
        sigma.block(0) += loading * Matrix::Identity(est.m, est.m);
    }
    return SigmaHatResult{std::move(sigma), loading};
}

}  // namespace rgm
