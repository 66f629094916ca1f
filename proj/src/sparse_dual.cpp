#include "rgm/sparse_dual.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rgm {

namespace {

BlockCirculant add_embedded(const BandedBlockCirculant& sigma_hat, const BlockCirculant& Z) {
    return lin_comb(1.0, embed_banded(sigma_hat), 1.0, Z);
}

std::optional<double> try_logdet(const SymbolSpectrum& spec) {
    try {
        return logdet(spec);
    } catch (const NumericalError&) {
        return std::nullopt;
    }
}

/// Extract the per-pair group vector [ (Z_0)_{kh}; (Z_j)_{kh}, (Z_j)_{hk} ].
Eigen::VectorXd pair_group(const BlockCirculant& Z, int band, int h, int k) {
    Eigen::VectorXd g(2 * band + 1);
    g(0) = Z.block(0)(k, h);
    for (int j = 1; j <= band; ++j) {
        g(2 * j - 1) = Z.block(j)(k, h);
        g(2 * j) = Z.block(j)(h, k);
    }
    return g;
}

void set_pair_group(BlockCirculant& Z, int band, int h, int k, const Eigen::VectorXd& g) {
    Z.block(0)(k, h) = g(0);
    Z.block(0)(h, k) = g(0);
    for (int j = 1; j <= band; ++j) {
        Z.block(j)(k, h) = g(2 * j - 1);
        Z.block(j)(h, k) = g(2 * j);
    }
}

Eigen::VectorXd pair_weights(int band) {
    Eigen::VectorXd w = Eigen::VectorXd::Ones(2 * band + 1);
    w(0) = 2.0;
    return w;
}

double dot_circ(const BlockCirculant& A, const BlockCirculant& B) { return inner_product(A, B); }

double max_block_abs_diff(const BlockCirculant& A, const BlockCirculant& B) {
    double v = 0.0;
    for (size_t k = 0; k < A.blocks().size(); ++k) {
        v = std::max(v, (A.blocks()[k] - B.blocks()[k]).cwiseAbs().maxCoeff());
    }
    return v;
}

/// Max absolute entry of the blocks beyond the band: the out-of-band leakage
/// of an inverse during the dual solve.
double out_of_band_max(const BlockCirculant& C, int band) {
    double v = 0.0;
    for (int k = band + 1; k <= C.N() / 2; ++k) v = std::max(v, C.block(k).cwiseAbs().maxCoeff());
    return v;
}

}  // namespace

DualVariable DualVariable::zero(int m, int N, int n) {
    if (n < 0 || n >= N / 2) throw std::invalid_argument("DualVariable: need 0 <= n < N/2");
    std::vector<Matrix> blocks(static_cast<size_t>(N / 2 + 1), Matrix::Zero(m, m));
    return DualVariable{BlockCirculant(m, N, std::move(blocks)), n};
}

double h_infinity(const BandedBlockCirculant& S) {
    const int m = S.m();
    double total = 0.0;
    for (int h = 0; h < m; ++h) {
        for (int k = h + 1; k < m; ++k) {
            double g = std::abs(S.block(0)(h, k));
            for (int j = 1; j <= S.band(); ++j) {
                g = std::max(g, 2.0 * std::abs(S.block(j)(h, k)));
                g = std::max(g, 2.0 * std::abs(S.block(j)(k, h)));
            }
            total += g;
        }
    }
    return total;
}

double primal_objective(const BandedBlockCirculant& S, const BandedBlockCirculant& sigma_hat,
                        double lambda) {
    return -logdet(embed_banded(S)) + inner_product(sigma_hat, S) + lambda * h_infinity(S);
}

double dual_objective(const DualVariable& Z, const BandedBlockCirculant& sigma_hat) {
    const int mN = sigma_hat.m() * sigma_hat.N();
    return -logdet(add_embedded(sigma_hat, Z.Z)) - mN;
}

Eigen::VectorXd weighted_l1_project(const Eigen::VectorXd& v, const Eigen::VectorXd& w, double r) {
    if (r <= 0.0) throw std::invalid_argument("weighted_l1_project: radius must be positive");
    if (v.size() != w.size()) throw std::invalid_argument("weighted_l1_project: size mismatch");
    if (w.size() == 0 || w.minCoeff() <= 0.0) {
        throw std::invalid_argument("weighted_l1_project: weights must be strictly positive");
    }
    if (w.cwiseProduct(v.cwiseAbs()).sum() <= r) return v;

    // Find mu with sum_i w_i (|v_i| - mu w_i)_+ = r. The sum is piecewise
    // linear and decreasing in mu with breakpoints |v_i| / w_i.
    const long d = v.size();
    std::vector<int> order(static_cast<size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(v(a)) / w(a) > std::abs(v(b)) / w(b);
    });

    double mu = 0.0;
    double wv = 0.0, ww = 0.0;
    for (long p = 0; p < d; ++p) {
        const int i = order[static_cast<size_t>(p)];
        wv += w(i) * std::abs(v(i));
        ww += w(i) * w(i);
        const double cand = (wv - r) / ww;
        const double next_break =
            (p + 1 < d) ? std::abs(v(order[static_cast<size_t>(p + 1)])) / w(order[static_cast<size_t>(p + 1)])
                        : 0.0;
        if (cand >= next_break - 1e-300) {
            mu = cand;
            break;
        }
    }

    Eigen::VectorXd u(d);
    for (long i = 0; i < d; ++i) {
        const double mag = std::abs(v(i)) - mu * w(i);
        u(i) = mag > 0.0 ? (v(i) > 0 ? mag : -mag) : 0.0;
    }
    // The pivot solve can overshoot the budget by an ulp; rescale until the
    // recomputed sum passes the same feasibility test, which also makes the
    // projection exactly idempotent.
    for (int pass = 0; pass < 8; ++pass) {
        const double s = w.cwiseProduct(u.cwiseAbs()).sum();
        if (s <= r) break;
        u *= r / s;
    }
    return u;
}

DualVariable project_constraints(DualVariable Z, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("project_constraints: lambda must be >= 0");
    const int m = Z.Z.m();
    const int n = Z.band;
    for (int j = 0; j <= n; ++j) Z.Z.block(j).diagonal().setZero();
    if (lambda == 0.0) {
        for (int j = 0; j <= n; ++j) Z.Z.block(j).setZero();
        return Z;
    }
    const double radius = lambda / Z.Z.N();
    const Eigen::VectorXd w = pair_weights(n);
    for (int h = 0; h < m; ++h) {
        for (int k = h + 1; k < m; ++k) {
            const Eigen::VectorXd g = pair_group(Z.Z, n, h, k);
            if (w.cwiseProduct(g.cwiseAbs()).sum() > radius) {
                set_pair_group(Z.Z, n, h, k, weighted_l1_project(g, w, radius));
            }
        }
    }
    return Z;
}

double constraint_violation(const DualVariable& Z, double lambda) {
    const int m = Z.Z.m();
    const int n = Z.band;
    const double radius = lambda / Z.Z.N();
    const Eigen::VectorXd w = pair_weights(n);
    double worst = -radius;
    for (int j = 0; j <= n; ++j) {
        worst = std::max(worst, Z.Z.block(j).diagonal().cwiseAbs().maxCoeff() - 0.0);
    }
    for (int h = 0; h < m; ++h) {
        for (int k = h + 1; k < m; ++k) {
            const Eigen::VectorXd g = pair_group(Z.Z, n, h, k);
            worst = std::max(worst, w.cwiseProduct(g.cwiseAbs()).sum() - radius);
        }
    }
    return worst;
}

std::pair<DualVariable, SolverReport> solve_sparse_dual(const BandedBlockCirculant& sigma_hat,
                                                        double lambda, const SolverOptions& opts,
                                                        const DualVariable* init) {
    opts.validate();
    if (lambda < 0.0) throw std::invalid_argument("solve_sparse_dual: lambda must be >= 0");
    if (min_symbol_eig(embed_banded(sigma_hat)) <= 0.0) {
        throw NumericalError("solve_sparse_dual: sigma_hat is not positive definite");
    }
    const int m = sigma_hat.m();
    const int N = sigma_hat.N();
    const int n = sigma_hat.band();
    const double mN = static_cast<double>(m) * N;

    DualVariable Z = init ? project_constraints(*init, lambda) : DualVariable::zero(m, N, n);

    // f(Z) = -log det(Sigma_hat + Z) - mN; gradient in the circulant inner
    // product is -(Sigma_hat + Z)^{-1}.
    auto eval = [&](const DualVariable& v) -> std::optional<double> {
        const auto ld = try_logdet(symbol_eval(add_embedded(sigma_hat, v.Z)));
        if (!ld) return std::nullopt;
        return -*ld - mN;
    };
    auto inv_at = [&](const DualVariable& v) {
        return from_symbol(inverse(symbol_eval(add_embedded(sigma_hat, v.Z))));
    };

    double obj = *eval(Z);  // Z is feasible: Sigma_hat + 0 > 0
    BlockCirculant W = inv_at(Z);

    SolverReport report;
    double step = opts.initial_step;
    double leakage = out_of_band_max(W, n);
    double gm_norm = std::numeric_limits<double>::infinity();

    DualVariable Z_prev = Z;    // accelerated path state
    double momentum = 1.0;

    for (report.iterations = 0; report.iterations < opts.max_iters; ++report.iterations) {
        DualVariable base = Z;
        BlockCirculant grad_at = W;  // = (Sigma_hat + Z)^{-1}, descent direction
        double base_obj = obj;

        if (opts.accelerated && report.iterations > 0) {
            const double beta = (momentum - 1.0) / (0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum)));
            DualVariable Y{lin_comb(1.0 + beta, Z.Z, -beta, Z_prev.Z), n};
            const auto fy = eval(Y);
            if (fy) {
                base = std::move(Y);
                base_obj = *fy;
                grad_at = inv_at(base);
            }
        }

        // Near the optimum the true decrease per accepted step falls below
        // the objective's ulp; within that slack, gate on the projected-step
        // norm instead, which stays accurately measurable.
        const double slack =
            8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(base_obj));
        const double noise_band = 1e3 * slack;
        bool accepted = false;
        DualVariable cand = Z;
        double cand_obj = obj;
        while (step > 1e-18) {
            cand = project_constraints(DualVariable{lin_comb(1.0, base.Z, step, grad_at), n}, lambda);
            const auto fc = eval(cand);
            if (fc) {
                // Armijo sufficient decrease along the projected step;
                // <grad f, cand - base> = -<W, cand - base>.
                const double slope = -dot_circ(grad_at, lin_comb(1.0, cand.Z, -1.0, base.Z));
                const bool armijo = *fc <= base_obj + opts.armijo_c * slope + slack;
                const bool visible_progress = base_obj - *fc > noise_band;
                const double gm_trial = max_block_abs_diff(cand.Z, base.Z) / step;
                if (armijo && (visible_progress || gm_trial <= gm_norm)) {
                    cand_obj = *fc;
                    accepted = true;
                    break;
                }
            }
            step *= opts.backtrack_ratio;
        }
        if (!accepted) {
            report.notes = "line search stalled";
            break;
        }

        if (cand_obj > obj + slack) {
            // Extrapolated step went uphill: restart momentum, take a plain
            // projected-gradient step from Z (monotone fallback).
            momentum = 1.0;
            bool fell_back = false;
            double t = step;
            while (t > 1e-18) {
                DualVariable plain =
                    project_constraints(DualVariable{lin_comb(1.0, Z.Z, t, W), n}, lambda);
                const auto fp = eval(plain);
                if (fp) {
                    const double slope = -dot_circ(W, lin_comb(1.0, plain.Z, -1.0, Z.Z));
                    const bool armijo = *fp <= obj + opts.armijo_c * slope + slack;
                    const bool visible_progress = obj - *fp > noise_band;
                    const double gm_trial = max_block_abs_diff(plain.Z, Z.Z) / t;
                    if (armijo && (visible_progress || gm_trial <= gm_norm)) {
                        cand = std::move(plain);
                        cand_obj = *fp;
                        base = Z;
                        fell_back = true;
                        break;
                    }
                }
                t *= opts.backtrack_ratio;
            }
            if (!fell_back) {
                report.notes = "line search stalled";
                break;
            }
            step = t;
        }

        gm_norm = max_block_abs_diff(cand.Z, Z.Z) / step;
        Z_prev = std::move(Z);
        Z = std::move(cand);
        obj = cand_obj;
        W = inv_at(Z);
        leakage = out_of_band_max(W, n);
        momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        step *= 2.0;
        if (opts.on_accept) opts.on_accept(report.iterations, obj);

        if (gm_norm <= opts.grad_tol && leakage <= opts.leak_tol) {
            report.converged = true;
            ++report.iterations;
            break;
        }
    }

    report.objective = obj;
    report.grad_norm = gm_norm;
    if (!report.converged && report.notes.empty()) report.notes = "iteration budget exhausted";
    return {std::move(Z), std::move(report)};
}

IdentifiedModel recover_concentration(const BandedBlockCirculant& sigma_hat,
                                      const DualVariable& Z_o, double lambda,
                                      double support_threshold_rel) {
    const int m = sigma_hat.m();
    const int N = sigma_hat.N();
    const int n = sigma_hat.band();
    const BlockCirculant A = add_embedded(sigma_hat, Z_o.Z);
    const BlockCirculant W = inverse(A);  // throws if the cone is violated

    BandedBlockCirculant S_o = project_band(W, n);
    const double leakage = out_of_band_max(W, n);

    double gap = std::numeric_limits<double>::quiet_NaN();
    bool from_dual = false;
    BlockCirculant Sigma_o = A;
    if (min_symbol_eig(embed_banded(S_o)) > 0.0) {
        Sigma_o = inverse(embed_banded(S_o));
        gap = primal_objective(S_o, sigma_hat, lambda) - (logdet(A) + static_cast<double>(m) * N);
    } else {
        from_dual = true;
    }

    IdentifiedModel out{std::move(S_o),
                        std::move(Sigma_o),
                        SupportPattern(m),
                        lambda,
                        SolverReport{},
                        leakage,
                        gap,
                        from_dual};
    // Threshold relative to the largest concentration entry; anchoring at the
    // off-diagonal max alone degenerates when the true graph is edge-free.
    out.support = support_from_concentration(out.S_o, support_threshold_rel * max_abs(out.S_o));
    return out;
}

SupportPattern support_from_concentration(const BandedBlockCirculant& S, double threshold) {
    if (threshold < 0.0) throw std::invalid_argument("support_from_concentration: threshold >= 0");
    const int m = S.m();
    SupportPattern omega(m);
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            double peak = 0.0;
            for (int k = 0; k <= S.band(); ++k) {
                peak = std::max(peak, std::abs(S.block(k)(i, j)));
                peak = std::max(peak, std::abs(S.block(k)(j, i)));
            }
            if (peak > threshold) omega.add(i, j);
        }
    }
    return omega;
}

}  // namespace rgm
