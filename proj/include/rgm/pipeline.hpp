#pragma once

#include <filesystem>
#include <vector>

#include "rgm/ar_process.hpp"
#include "rgm/config.hpp"
#include "rgm/sparse_dual.hpp"

namespace rgm {

using Path = std::filesystem::path;

/// Support confusion over off-diagonal pairs plus spectral fit quality.
struct EvaluationReport {
    int true_positives = 0;
    int false_positives = 0;
    int false_negatives = 0;
    int true_negatives = 0;
    double avg_spectral_error = 0.0;  // mean over frequencies of relative Frobenius error
    double duality_gap = std::numeric_limits<double>::quiet_NaN();
    double leakage = std::numeric_limits<double>::quiet_NaN();

    int support_errors() const { return false_positives + false_negatives; }
    int pair_count() const {
        return true_positives + false_positives + false_negatives + true_negatives;
    }
};

/// generate: model.txt + samples.csv + truth_support.txt under cfg.out_dir.
/// Deterministic for a fixed seed; stage streams are derived by fixed offsets.
void cmd_generate(const ExperimentConfig& cfg);

/// identify: lags -> sigma_hat -> dual solve -> recovery, one output
/// directory per lambda (S_o.txt, Sigma_o.txt, support.txt, report.txt).
/// lambda = 0 short-circuits to the unregularized maximum-entropy path.
std::vector<IdentifiedModel> cmd_identify(const Path& samples_path, const ExperimentConfig& cfg);

/// In-memory identification of one lambda (the pieces cmd_identify wires up).
IdentifiedModel identify_from_samples(const Matrix& samples, double lambda,
                                      const ExperimentConfig& cfg);

/// evaluate: estimated support/spectrum against the generating model.
EvaluationReport cmd_evaluate(const Path& identified_dir, const Path& model_path,
                              const Path& truth_support_path);

/// plotdata: pattern.csv (0/1 grid) and spectrum.csv (per-frequency symbol
/// samples) next to the identified files.
void cmd_plotdata(const Path& identified_dir);

struct LambdaSweepResult {
    std::vector<double> lambdas;
    std::vector<int> stability_errors;  // support disagreement between halves
    double selected_lambda = 0.0;
    std::optional<IdentifiedModel> final_model;
};

/// Split the samples into halves, identify each half per lambda, select the
/// lambda whose two half-supports disagree least (ties -> larger lambda),
/// then identify the full samples at the selection.
LambdaSweepResult cmd_sweep_lambda(const Path& samples_path, const ExperimentConfig& cfg);

struct NSweepEntry {
    int N = 0;
    double deviation = 0.0;  // max-entry gap between completed blocks and true lags
};

/// Complete exact model lags at each N and report how fast the circulant
/// completion approaches the true stationary lags.
std::vector<NSweepEntry> cmd_sweep_N(const Path& model_path, const std::vector<int>& Ns,
                                     const ExperimentConfig& cfg);

/// Shared artifact names.
Path lambda_subdir(const Path& root, double lambda);

}  // namespace rgm
