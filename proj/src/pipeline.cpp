#include "rgm/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <optional>

#include "rgm/io.hpp"
#include "rgm/maxent.hpp"
#include "rgm/rng.hpp"

namespace rgm {

namespace {

constexpr std::uint64_t kModelStage = 1;
constexpr std::uint64_t kNoiseStage = 2;

SolverOptions solver_options(const ExperimentConfig& cfg) {
    SolverOptions opts;
    opts.max_iters = cfg.max_iters;
    opts.grad_tol = cfg.grad_tol;
    opts.leak_tol = cfg.leak_tol;
    opts.accelerated = cfg.accelerate;
    return opts;
}

std::string lambda_tag(double lambda) {
    std::string tag = io::fmt_double(lambda);
    for (char& c : tag) {
        if (c == '+') c = 'p';
        if (c == '-') c = 'm';
    }
    return tag;
}

void write_identified(const Path& dir, const IdentifiedModel& model) {
    io::write_banded(dir / "S_o.txt", model.S_o);
    io::write_circulant(dir / "Sigma_o.txt", model.Sigma_o,
                        model.sigma_from_dual ? io::Metadata{{"sigma-from-dual", "1"}}
                                              : io::Metadata{});
    io::write_edges(dir / "support.txt", model.support);
    std::vector<std::pair<std::string, std::string>> kv{
        {"lambda", io::fmt_double(model.lambda)},
        {"iterations", std::to_string(model.report.iterations)},
        {"converged", model.report.converged ? "1" : "0"},
        {"objective", io::fmt_double(model.report.objective)},
        {"grad_norm", io::fmt_double(model.report.grad_norm)},
        {"duality_gap", io::fmt_double(model.duality_gap)},
        {"leakage", io::fmt_double(model.leakage)},
        {"sigma_from_dual", model.sigma_from_dual ? "1" : "0"},
    };
    if (!model.report.notes.empty()) kv.emplace_back("notes", model.report.notes);
    io::write_keyvalues(dir / "report.txt", kv);
}

}  // namespace

Path lambda_subdir(const Path& root, double lambda) {
    return root / ("lambda_" + lambda_tag(lambda));
}

void cmd_generate(const ExperimentConfig& cfg) {
    cfg.validate();
    const CounterRng root(cfg.seed);
    auto generated = generate_random_sparse_ar(cfg.m, cfg.n, root.stream_seed(kModelStage),
                                               cfg.sparsity, cfg.pole_bound);
    generated.model.innovation *= cfg.innovation_variance;

    const Matrix samples = simulate_ar(generated.model, cfg.T, root.stream_seed(kNoiseStage),
                                       cfg.burn_in);

    const Path out(cfg.out_dir);
    io::write_ar_model(out / "model.txt", generated.model);
    io::write_samples_csv(out / "samples.csv", samples);
    io::write_edges(out / "truth_support.txt", generated.support);
}

IdentifiedModel identify_from_samples(const Matrix& samples, double lambda,
                                      const ExperimentConfig& cfg) {
    const CovarianceEstimate est = estimate_covlags(samples, cfg.n);
    const SigmaHatResult sh = build_sigma_hat(est, cfg.N);

    if (lambda == 0.0) {
        // Radius-0 constraints pin the banded multiplier at zero, which turns
        // the dual into the plain maximum-entropy completion; solve that
        // directly and report the equivalence.
        auto [X, report] = solve_maxent(sh.sigma, solver_options(cfg));
        const BlockCirculant Sigma_o = complete_covariance(X);

        // Duality gap against the implied feasible multiplier: the completion
        // with its banded blocks pinned back to sigma_hat.
        double gap = std::numeric_limits<double>::quiet_NaN();
        {
            BlockCirculant pinned = Sigma_o;
            for (int k = 0; k <= cfg.n; ++k) pinned.block(k) = sh.sigma.block(k);
            try {
                gap = primal_objective(X, sh.sigma, 0.0) -
                      (logdet(pinned) + static_cast<double>(cfg.m) * cfg.N);
            } catch (const NumericalError&) {
            }
        }

        IdentifiedModel model{X,   Sigma_o, SupportPattern(cfg.m),
                              0.0, report,  0.0 /* banded inverse by construction */,
                              gap, false};
        model.support =
            support_from_concentration(model.S_o, cfg.support_threshold * max_abs(model.S_o));
        model.report.notes = model.report.notes.empty()
                                 ? "maxent-equivalent path"
                                 : model.report.notes + "; maxent-equivalent path";
        return model;
    }

    auto [Z_o, report] = solve_sparse_dual(sh.sigma, lambda, solver_options(cfg));
    IdentifiedModel model = recover_concentration(sh.sigma, Z_o, lambda, cfg.support_threshold);
    model.report = report;
    return model;
}

std::vector<IdentifiedModel> cmd_identify(const Path& samples_path, const ExperimentConfig& cfg) {
    cfg.validate();
    const Matrix samples = io::read_samples_csv(samples_path);
    if (samples.cols() != cfg.m) {
        throw std::invalid_argument("identify: sample columns do not match configured m");
    }
    std::vector<IdentifiedModel> models;
    for (double lambda : cfg.lambdas) {
        IdentifiedModel model = identify_from_samples(samples, lambda, cfg);
        write_identified(lambda_subdir(cfg.out_dir, lambda), model);
        models.push_back(std::move(model));
    }
    return models;
}

EvaluationReport cmd_evaluate(const Path& identified_dir, const Path& model_path,
                              const Path& truth_support_path) {
    const ARModel model = io::read_ar_model(model_path);
    const BlockCirculant Sigma_o = io::read_circulant(identified_dir / "Sigma_o.txt");
    if (Sigma_o.m() != model.m) throw std::invalid_argument("evaluate: dimension mismatch");
    const SupportPattern truth = io::read_edges(truth_support_path, model.m);
    const SupportPattern estimated = io::read_edges(identified_dir / "support.txt", model.m);

    EvaluationReport report;
    for (int i = 0; i < model.m; ++i) {
        for (int j = i + 1; j < model.m; ++j) {
            const bool t = truth.contains(i, j);
            const bool e = estimated.contains(i, j);
            if (t && e) ++report.true_positives;
            else if (!t && e) ++report.false_positives;
            else if (t && !e) ++report.false_negatives;
            else ++report.true_negatives;
        }
    }

    const int N = Sigma_o.N();
    const SymbolSpectrum estimated_spec = symbol_eval(Sigma_o);
    const SymbolSpectrum true_spec = ar_true_spectrum(model, N);
    double err = 0.0;
    for (int l = 0; l < N; ++l) {
        err += (estimated_spec.sample(l) - true_spec.sample(l)).norm() / true_spec.sample(l).norm();
    }
    report.avg_spectral_error = err / N;

    const auto kv = io::read_keyvalues(identified_dir / "report.txt");
    if (auto it = kv.find("duality_gap"); it != kv.end()) report.duality_gap = std::stod(it->second);
    if (auto it = kv.find("leakage"); it != kv.end()) report.leakage = std::stod(it->second);
    return report;
}

void cmd_plotdata(const Path& identified_dir) {
    const BlockCirculant Sigma_o = io::read_circulant(identified_dir / "Sigma_o.txt");
    const int m = Sigma_o.m();
    const SupportPattern support = io::read_edges(identified_dir / "support.txt", m);

    {
        Matrix grid = Matrix::Identity(m, m);
        for (const auto& [i, j] : support.offdiag_pairs()) grid(i, j) = grid(j, i) = 1.0;
        std::ofstream out(identified_dir / "pattern.csv");
        if (!out) throw IoError("cannot write pattern.csv");
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                if (j) out << ',';
                out << static_cast<int>(grid(i, j));
            }
            out << '\n';
        }
    }

    {
        const SymbolSpectrum spec = symbol_eval(Sigma_o);
        std::ofstream out(identified_dir / "spectrum.csv");
        if (!out) throw IoError("cannot write spectrum.csv");
        out << "theta";
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                out << ",re_" << (i + 1) << '_' << (j + 1) << ",im_" << (i + 1) << '_' << (j + 1);
            }
        }
        out << '\n';
        const int N = Sigma_o.N();
        for (int l = 0; l < N; ++l) {
            out << io::fmt_double(2.0 * M_PI * l / N);
            for (int i = 0; i < m; ++i) {
                for (int j = 0; j < m; ++j) {
                    out << ',' << io::fmt_double(spec.sample(l)(i, j).real()) << ','
                        << io::fmt_double(spec.sample(l)(i, j).imag());
                }
            }
            out << '\n';
        }
    }
}

LambdaSweepResult cmd_sweep_lambda(const Path& samples_path, const ExperimentConfig& cfg) {
    cfg.validate();
    const Matrix samples = io::read_samples_csv(samples_path);
    const long half = samples.rows() / 2;
    if (half <= cfg.n) throw std::invalid_argument("sweep: halves too short for the order");
    const Matrix first = samples.topRows(half);
    const Matrix second = samples.bottomRows(samples.rows() - half);

    LambdaSweepResult result;
    const Path root(cfg.out_dir);
    for (double lambda : cfg.lambdas) {
        const IdentifiedModel a = identify_from_samples(first, lambda, cfg);
        const IdentifiedModel b = identify_from_samples(second, lambda, cfg);
        write_identified(lambda_subdir(root / "half1", lambda), a);
        write_identified(lambda_subdir(root / "half2", lambda), b);

        int disagree = 0;
        for (int i = 0; i < cfg.m; ++i) {
            for (int j = i + 1; j < cfg.m; ++j) {
                if (a.support.contains(i, j) != b.support.contains(i, j)) ++disagree;
            }
        }
        result.lambdas.push_back(lambda);
        result.stability_errors.push_back(disagree);
    }

    // Smallest disagreement wins; ties resolve toward the larger (sparser) lambda.
    size_t best = 0;
    for (size_t i = 1; i < result.lambdas.size(); ++i) {
        if (result.stability_errors[i] < result.stability_errors[best] ||
            (result.stability_errors[i] == result.stability_errors[best] &&
             result.lambdas[i] > result.lambdas[best])) {
            best = i;
        }
    }
    result.selected_lambda = result.lambdas[best];

    result.final_model = identify_from_samples(samples, result.selected_lambda, cfg);
    write_identified(root / "final", *result.final_model);

    std::vector<std::pair<std::string, std::string>> kv;
    for (size_t i = 0; i < result.lambdas.size(); ++i) {
        kv.emplace_back("stability_error_" + lambda_tag(result.lambdas[i]),
                        std::to_string(result.stability_errors[i]));
    }
    kv.emplace_back("selected_lambda", io::fmt_double(result.selected_lambda));
    io::write_keyvalues(root / "selection.txt", kv);
    return result;
}

std::vector<NSweepEntry> cmd_sweep_N(const Path& model_path, const std::vector<int>& Ns,
                                     const ExperimentConfig& cfg) {
    const ARModel model = io::read_ar_model(model_path);
    const std::vector<Matrix> truth = ar_true_lags(model, model.n);
    const std::vector<Matrix> band = ar_concentration_band(model);

    // Reciprocal approximation of order n and period N: band the true
    // concentration into a circulant and invert. Its leading blocks approach
    // the stationary lags as N grows.
    std::vector<NSweepEntry> entries;
    std::vector<std::pair<std::string, std::string>> kv;
    for (int N : Ns) {
        if (N % 2 != 0 || N <= 2 * model.n) {
            throw std::invalid_argument("sweep: each N must be even and > 2n");
        }
        const BlockCirculant Sigma = complete_covariance(BandedBlockCirculant(model.m, N, model.n, band));
        double dev = 0.0;
        for (int k = 0; k <= model.n; ++k) {
            dev = std::max(dev, (Sigma.block(k) - truth[static_cast<size_t>(k)]).cwiseAbs().maxCoeff());
        }
        entries.push_back(NSweepEntry{N, dev});
        kv.emplace_back("deviation_N" + std::to_string(N), io::fmt_double(dev));
    }
    io::write_keyvalues(Path(cfg.out_dir) / "convergence.txt", kv);
    return entries;
}

}  // namespace rgm
