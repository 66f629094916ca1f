#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>

#include "rgm/block_circulant.hpp"
#include "rgm/maxent.hpp"
#include "rgm/support.hpp"

namespace rgm {

/// Lagrange multiplier of the sparsity-regularized dual: a full circulant
/// whose banded blocks Z_0..Z_n are constrained (zero diagonals, per-pair
/// weighted l1 budgets) and whose remaining blocks are free.
struct DualVariable {
    BlockCirculant Z;
    int band;

    static DualVariable zero(int m, int N, int n);
};

/// Group-sparsity regularizer: for each pair h < k the largest (weighted)
/// banded concentration magnitude, summed over pairs.
double h_infinity(const BandedBlockCirculant& S);

/// -log det S + <Sigma_hat, S> + lambda * h_infinity(S).
double primal_objective(const BandedBlockCirculant& S, const BandedBlockCirculant& sigma_hat,
                        double lambda);

/// -log det(Sigma_hat + Z) - mN.
double dual_objective(const DualVariable& Z, const BandedBlockCirculant& sigma_hat);

/// Euclidean projection onto { u : sum_i w_i |u_i| <= r } by weighted
/// soft-thresholding with an exact pivot search.
Eigen::VectorXd weighted_l1_project(const Eigen::VectorXd& v, const Eigen::VectorXd& w, double r);

/// Zero the banded diagonals and project every pair group onto its weighted
/// l1 ball of radius lambda/N; free blocks pass through untouched.
DualVariable project_constraints(DualVariable Z, double lambda);

/// Max violation of the pair-group budgets (<= 0 means feasible); diagnostic.
double constraint_violation(const DualVariable& Z, double lambda);

/// Projected gradient (optionally Nesterov-accelerated with monotone restart)
/// on the dual of the regularized problem, started from Z = 0 or `init`.
std::pair<DualVariable, SolverReport> solve_sparse_dual(const BandedBlockCirculant& sigma_hat,
                                                        double lambda,
                                                        const SolverOptions& opts = {},
                                                        const DualVariable* init = nullptr);

struct IdentifiedModel {
    BandedBlockCirculant S_o;    // estimated banded concentration
    BlockCirculant Sigma_o;      // completed covariance
    SupportPattern support;      // estimated graph
    double lambda = 0.0;
    SolverReport report;
    double leakage = 0.0;        // max out-of-band entry of (Sigma_hat + Z)^{-1}
    double duality_gap = std::numeric_limits<double>::quiet_NaN();
    bool sigma_from_dual = false;  // Sigma_o fell back to Sigma_hat + Z
};

/// Band-project the inverse of Sigma_hat + Z_o into the concentration
/// estimate, extract the support, and report gap and leakage.
IdentifiedModel recover_concentration(const BandedBlockCirculant& sigma_hat,
                                      const DualVariable& Z_o, double lambda,
                                      double support_threshold_rel = 1e-5);

/// Pairs whose banded concentration magnitude exceeds `threshold` (absolute);
/// diagonal pairs are always included.
SupportPattern support_from_concentration(const BandedBlockCirculant& S, double threshold);

}  // namespace rgm
