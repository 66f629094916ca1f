#include "rgm/maxent.hpp"

#include <cmath>
#include <optional>

namespace rgm {

void SolverOptions::validate() const {
    if (max_iters < 1 || grad_tol <= 0 || initial_step <= 0 || armijo_c <= 0 || leak_tol <= 0 ||
        backtrack_ratio <= 0 || backtrack_ratio >= 1) {
        throw std::invalid_argument("SolverOptions: all fields positive, ratio in (0,1)");
    }
}

double maxent_dual_objective(const BandedBlockCirculant& X, const BandedBlockCirculant& sigma_hat) {
    return -logdet(embed_banded(X)) + inner_product(X, sigma_hat);
}

BandedBlockCirculant maxent_dual_gradient(const BandedBlockCirculant& X,
                                          const BandedBlockCirculant& sigma_hat) {
    const BlockCirculant Xinv = inverse(embed_banded(X));
    return lin_comb(1.0, sigma_hat, -1.0, project_band(Xinv, X.band()));
}

std::pair<BandedBlockCirculant, SolverReport> solve_maxent(const BandedBlockCirculant& sigma_hat,
                                                           const SolverOptions& opts) {
    opts.validate();
    // The dual pairs sigma_hat only against banded matrices, so the data is
    // admissible as long as some positive definite completion exists; a
    // positive definite leading block is the cheap necessary condition, and
    // unbounded descent below flags data without any completion.
    {
        Eigen::LLT<Matrix> llt(sigma_hat.block(0));
        if (llt.info() != Eigen::Success) {
            throw NumericalError("solve_maxent: sigma_hat block 0 is not positive definite");
        }
    }
    const int m = sigma_hat.m();
    const int n = sigma_hat.band();
    const int N = sigma_hat.N();

    BandedBlockCirculant X = banded_identity(m, N, n, m / sigma_hat.block(0).trace());

    // One pass per trial point: log-determinant and banded inverse share the
    // symbol samples, and the Cholesky failing doubles as the cone check.
    auto evaluate = [&](const BandedBlockCirculant& V)
        -> std::optional<std::pair<double, BandedBlockCirculant>> {
        try {
            const SymbolSpectrum spec = symbol_eval(embed_banded(V));
            const double obj_v = -logdet(spec) + inner_product(V, sigma_hat);
            const BandedBlockCirculant grad_v =
                lin_comb(1.0, sigma_hat, -1.0, project_band(from_symbol(inverse(spec)), n));
            return std::pair{obj_v, grad_v};
        } catch (const NumericalError&) {
            return std::nullopt;
        }
    };

    auto [obj, grad] = *evaluate(X);
    const double divergence_floor = -1e8 * (1.0 + std::abs(obj));
    // Data without any PD completion sends X off along a recession direction;
    // with step doubling that growth is exponential and trips this quickly.
    const double growth_ceiling = 1e10 * (1.0 + max_abs(X));

    SolverReport report;
    double step = opts.initial_step;
    for (report.iterations = 0; report.iterations < opts.max_iters; ++report.iterations) {
        const double gnorm = max_abs(grad);
        report.grad_norm = gnorm;
        if (gnorm <= opts.grad_tol) {
            report.converged = true;
            break;
        }

        const double gg = inner_product(grad, grad);
        // Near the optimum the true decrease per step drops below what the
        // objective can resolve in double precision. Decreases inside the
        // noise band do not count as progress; steps are then gated on the
        // squared gradient norm instead, which keeps shrinking along gradient
        // steps of a strongly convex objective and stays accurately
        // computable from the analytic formula.
        const double slack = 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(obj));
        const double noise_band = 1e3 * slack;
        bool accepted = false;
        while (step > 1e-18) {
            BandedBlockCirculant trial = lin_comb(1.0, X, -step, grad);
            if (auto ev = evaluate(trial)) {
                auto& [trial_obj, trial_grad] = *ev;
                const bool armijo = trial_obj <= obj - opts.armijo_c * step * gg + slack;
                const bool visible_progress = obj - trial_obj > noise_band;
                const bool grad_shrinks = inner_product(trial_grad, trial_grad) <= gg;
                if (armijo && (visible_progress || grad_shrinks)) {
                    X = std::move(trial);
                    obj = trial_obj;
                    grad = std::move(trial_grad);
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
        if (obj < divergence_floor) {
            throw NumericalError("solve_maxent: sigma_hat admits no positive definite completion");
        }
        if (opts.on_accept) opts.on_accept(report.iterations, obj);
        step *= 2.0;
    }

    report.objective = obj;
    report.grad_norm = max_abs(grad);
    if (!report.converged && report.notes.empty()) report.notes = "iteration budget exhausted";
    return {std::move(X), std::move(report)};
}

BlockCirculant complete_covariance(const BandedBlockCirculant& X) {
    return inverse(embed_banded(X));
}

}  // namespace rgm
