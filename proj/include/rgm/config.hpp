#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace rgm {

/// Flat experiment configuration. Every key in the config file has a matching
/// CLI flag override; see the `rgm` tool.
struct ExperimentConfig {
    int m = 15;
    int n = 8;
    int N = 128;
    long T = 1000;
    std::uint64_t seed = 0;
    std::vector<double> lambdas{125.0};
    double pole_bound = 0.9;
    double sparsity = 0.1;
    double innovation_variance = 1.0;
    long burn_in = -1;  // -1: default 10n + 500
    double grad_tol = 1e-8;
    double leak_tol = 1e-6;
    int max_iters = 5000;
    double support_threshold = 1e-5;  // relative to the max banded off-diagonal
    bool accelerate = false;
    std::string out_dir = "out";

    void validate() const;  // throws std::invalid_argument
};

/// Parse `key = value` lines; '#' starts a comment, unknown keys are errors.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text);

std::vector<double> parse_lambda_list(const std::string& csv);

}  // namespace rgm
