#pragma once

#include <cstdint>
#include <vector>

#include "rgm/block_circulant.hpp"
#include "rgm/support.hpp"

namespace rgm {

/// Vector AR model of order n: sum_{k=0}^n B_k x(t-k) = e(t), e ~ N(0, W).
/// B_0 must be invertible; the normalized form uses B_0 = I.
struct ARModel {
    int m = 0;
    int n = 0;
    std::vector<Matrix> coeffs;  // B_0..B_n
    Matrix innovation;           // W, symmetric positive definite

    void validate() const;
};

/// Largest pole modulus of the shaping filter [I - A(z)]^{-1}, A_k = -B_0^{-1} B_k.
double companion_spectral_radius(const ARModel& model);
bool is_stable(const ARModel& model);

/// Simulate T observations after discarding burn_in (default 10n + 500).
/// Deterministic for a fixed seed.
Matrix simulate_ar(const ARModel& model, long T, std::uint64_t seed, long burn_in = -1);

struct CovarianceEstimate {
    int m = 0;
    int n = 0;
    std::vector<Matrix> lags;  // R_0..R_n
    long T = 0;
};

/// Biased lag estimates R_k = (1/T) sum_{t=k+1}^T x(t) x(t-k)^T; R_0 symmetrized.
CovarianceEstimate estimate_covlags(const Matrix& samples, int n);

/// Power spectrum sampled at the N-th roots of unity:
/// Phi(zeta^l) = [B(zeta^l)^* W^{-1} B(zeta^l)]^{-1}.
SymbolSpectrum ar_true_spectrum(const ARModel& model, int N);

/// Inverse spectrum B(e^{i theta})^* W^{-1} B(e^{i theta}) at one frequency.
ComplexMatrix ar_concentration_at(const ARModel& model, double theta);

/// Coefficients S_0..S_n of the banded inverse-spectrum pseudo-polynomial.
std::vector<Matrix> ar_concentration_band(const ARModel& model);

/// Off-diagonal support of the inverse spectrum, detected on a dense frequency
/// grid (grid_points <= 0 picks a default that oversamples the band).
SupportPattern ar_inverse_spectrum_support(const ARModel& model, double tol = 1e-8,
                                           int grid_points = 0);

/// Exact covariance lags R_0..R_upto via the companion-form Lyapunov equation.
std::vector<Matrix> ar_true_lags(const ARModel& model, int upto);

struct GeneratedModel {
    ARModel model;
    SupportPattern support;
};

/// Draw a stable sparse AR model. Off-diagonal coefficients share one random
/// mask across lags; the mask uses distinct source rows so the inverse
/// spectrum's support equals the mask with no fill-in. The returned support is
/// recomputed from the model, so it is self-consistent by construction.
GeneratedModel generate_random_sparse_ar(int m, int n, std::uint64_t seed, double sparsity,
                                         double pole_bound);

struct SigmaHatResult {
    BandedBlockCirculant sigma;
    double diagonal_loading = 0.0;  // 0 when the raw estimate was already PD
};

/// Banded block-circulant from estimated lags, with a diagonal-loading
/// fallback when the raw matrix is not positive definite.
SigmaHatResult build_sigma_hat(const CovarianceEstimate& est, int N);

}  // namespace rgm
