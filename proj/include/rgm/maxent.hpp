#pragma once

#include <functional>
#include <limits>
#include <string>
#include <utility>

#include "rgm/block_circulant.hpp"

namespace rgm {

struct SolverOptions {
    int max_iters = 5000;
    double grad_tol = 1e-8;        // max-norm of the banded gradient / projected step
    double backtrack_ratio = 0.5;  // step shrink factor
    double armijo_c = 1e-4;        // sufficient-decrease constant
    double initial_step = 1.0;
    double leak_tol = 1e-6;        // out-of-band leakage target (sparse dual)
    bool accelerated = false;      // Nesterov extrapolation with monotone restart

    /// Called with (iteration, objective) after each accepted step.
    std::function<void(int, double)> on_accept;

    void validate() const;
};

struct SolverReport {
    int iterations = 0;
    double objective = std::numeric_limits<double>::quiet_NaN();
    double grad_norm = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    std::string notes;
};

/// -log det X + <X, Sigma_hat> over the banded cone; the dual of the
/// maximum-entropy completion.
double maxent_dual_objective(const BandedBlockCirculant& X, const BandedBlockCirculant& sigma_hat);

/// Gradient in the circulant inner product: Sigma_hat - P_band(X^{-1}).
BandedBlockCirculant maxent_dual_gradient(const BandedBlockCirculant& X,
                                          const BandedBlockCirculant& sigma_hat);

/// Gradient descent with Armijo backtracking on the banded parameterization.
/// Steps that leave the positive definite cone are halved.
std::pair<BandedBlockCirculant, SolverReport> solve_maxent(const BandedBlockCirculant& sigma_hat,
                                                           const SolverOptions& opts = {});

/// The completed covariance Sigma = embed(X)^{-1}; banded inverse by construction.
BlockCirculant complete_covariance(const BandedBlockCirculant& X);

}  // namespace rgm
