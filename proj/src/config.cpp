#include "rgm/config.hpp"

#include <fstream>
#include <sstream>

#include "rgm/errors.hpp"

namespace rgm {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

template <typename T>
T parse_num(const std::string& value, const std::string& key) {
    std::istringstream is(value);
    T v{};
    if (!(is >> v) || !(is >> std::ws).eof()) {
        throw std::invalid_argument("config: bad value '" + value + "' for key '" + key + "'");
    }
    return v;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (m < 1) throw std::invalid_argument("config: m must be >= 1");
    if (n < 0) throw std::invalid_argument("config: n must be >= 0");
    if (N % 2 != 0 || N <= 2 * n) throw std::invalid_argument("config: N must be even and > 2n");
    if (T <= n) throw std::invalid_argument("config: T must be > n");
    if (lambdas.empty()) throw std::invalid_argument("config: lambda list is empty");
    for (double l : lambdas) {
        if (l < 0.0) throw std::invalid_argument("config: lambda values must be >= 0");
    }
    if (pole_bound <= 0.0 || pole_bound >= 1.0) {
        throw std::invalid_argument("config: pole_bound must be in (0,1)");
    }
    if (sparsity < 0.0 || sparsity > 1.0) {
        throw std::invalid_argument("config: sparsity must be in [0,1]");
    }
    if (innovation_variance <= 0.0) {
        throw std::invalid_argument("config: innovation_variance must be positive");
    }
    if (grad_tol <= 0 || leak_tol <= 0 || max_iters < 1 || support_threshold < 0) {
        throw std::invalid_argument("config: tolerances must be positive");
    }
    if (out_dir.empty()) throw std::invalid_argument("config: out directory is empty");
}

std::vector<double> parse_lambda_list(const std::string& csv) {
    std::vector<double> out;
    std::istringstream is(csv);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        out.push_back(parse_num<double>(tok, "lambda"));
    }
    if (out.empty()) throw std::invalid_argument("config: lambda list is empty");
    return out;
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: expected 'key = value', got '" + trim(line) + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "m") cfg.m = parse_num<int>(value, key);
        else if (key == "n") cfg.n = parse_num<int>(value, key);
        else if (key == "N") cfg.N = parse_num<int>(value, key);
        else if (key == "T") cfg.T = parse_num<long>(value, key);
        else if (key == "seed") cfg.seed = parse_num<std::uint64_t>(value, key);
        else if (key == "lambda") cfg.lambdas = parse_lambda_list(value);
        else if (key == "pole_bound") cfg.pole_bound = parse_num<double>(value, key);
        else if (key == "sparsity") cfg.sparsity = parse_num<double>(value, key);
        else if (key == "innovation_variance") cfg.innovation_variance = parse_num<double>(value, key);
        else if (key == "burn_in") cfg.burn_in = parse_num<long>(value, key);
        else if (key == "grad_tol") cfg.grad_tol = parse_num<double>(value, key);
        else if (key == "leak_tol") cfg.leak_tol = parse_num<double>(value, key);
        else if (key == "max_iters") cfg.max_iters = parse_num<int>(value, key);
        else if (key == "support_threshold") cfg.support_threshold = parse_num<double>(value, key);
        else if (key == "accelerate") cfg.accelerate = parse_num<int>(value, key) != 0;
        else if (key == "out") cfg.out_dir = value;
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace rgm
