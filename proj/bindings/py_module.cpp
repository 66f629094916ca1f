#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rgm/ar_process.hpp"
#include "rgm/block_circulant.hpp"
#include "rgm/io.hpp"
#include "rgm/maxent.hpp"
#include "rgm/pipeline.hpp"
#include "rgm/sparse_dual.hpp"

namespace py = pybind11;
using namespace rgm;

namespace {

std::vector<std::pair<int, int>> support_pairs(const SupportPattern& s) {
    return {s.offdiag_pairs().begin(), s.offdiag_pairs().end()};
}

}  // namespace

PYBIND11_MODULE(_rgm, mod) {
    mod.doc() = "block-circulant maximum-entropy completion and sparse graphical-model "
                "identification for periodic reciprocal processes";

    py::register_exception<NumericalError>(mod, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<IoError>(mod, "IoError", PyExc_IOError);

    py::class_<BlockCirculant>(mod, "BlockCirculant")
        .def(py::init<int, int, std::vector<Matrix>>(), py::arg("m"), py::arg("N"),
             py::arg("blocks"))
        .def_property_readonly("m", &BlockCirculant::m)
        .def_property_readonly("N", &BlockCirculant::N)
        .def_property_readonly("blocks", [](const BlockCirculant& c) { return c.blocks(); })
        .def("block", [](const BlockCirculant& c, int k) { return c.block_full(k); }, py::arg("k"));

    py::class_<BandedBlockCirculant>(mod, "BandedBlockCirculant")
        .def(py::init<int, int, int, std::vector<Matrix>>(), py::arg("m"), py::arg("N"),
             py::arg("n"), py::arg("blocks"))
        .def_property_readonly("m", &BandedBlockCirculant::m)
        .def_property_readonly("N", &BandedBlockCirculant::N)
        .def_property_readonly("n", &BandedBlockCirculant::band)
        .def_property_readonly("blocks", [](const BandedBlockCirculant& b) { return b.blocks(); })
        .def("max_offdiag", &BandedBlockCirculant::max_offdiag);

    py::class_<SymbolSpectrum>(mod, "SymbolSpectrum")
        .def_property_readonly("m", &SymbolSpectrum::m)
        .def_property_readonly("N", &SymbolSpectrum::N)
        .def_property_readonly("samples", [](const SymbolSpectrum& s) { return s.samples(); });

    py::class_<SupportPattern>(mod, "SupportPattern")
        .def(py::init<int>(), py::arg("m"))
        .def_property_readonly("m", &SupportPattern::m)
        .def("add", &SupportPattern::add)
        .def("contains", &SupportPattern::contains)
        .def_property_readonly("pairs", &support_pairs)
        .def("__len__", &SupportPattern::offdiag_count)
        .def("__eq__", [](const SupportPattern& a, const SupportPattern& b) { return a == b; });

    // Circulant algebra.
    mod.def("symbol_eval", &symbol_eval);
    mod.def("from_symbol", &from_symbol);
    mod.def("project_band", &project_band, py::arg("C"), py::arg("n"));
    mod.def("embed_banded", &embed_banded);
    mod.def("inner_product",
            py::overload_cast<const BlockCirculant&, const BlockCirculant&>(&inner_product));
    mod.def("logdet", py::overload_cast<const BlockCirculant&>(&logdet));
    mod.def("inverse", py::overload_cast<const BlockCirculant&>(&inverse));
    mod.def("min_symbol_eig", py::overload_cast<const BlockCirculant&>(&min_symbol_eig));
    mod.def("to_dense", py::overload_cast<const BlockCirculant&, int>(&to_dense), py::arg("C"),
            py::arg("size_limit") = 4096);
    mod.def("to_dense_banded", py::overload_cast<const BandedBlockCirculant&, int>(&to_dense),
            py::arg("B"), py::arg("size_limit") = 4096);

    // AR processes.
    py::class_<ARModel>(mod, "ARModel")
        .def(py::init([](int m, int n, std::vector<Matrix> coeffs, Matrix innovation) {
                 ARModel model{m, n, std::move(coeffs), std::move(innovation)};
                 model.validate();
                 return model;
             }),
             py::arg("m"), py::arg("n"), py::arg("coeffs"), py::arg("innovation"))
        .def_readonly("m", &ARModel::m)
        .def_readonly("n", &ARModel::n)
        .def_readonly("coeffs", &ARModel::coeffs)
        .def_readonly("innovation", &ARModel::innovation);

    py::class_<CovarianceEstimate>(mod, "CovarianceEstimate")
        .def_readonly("m", &CovarianceEstimate::m)
        .def_readonly("n", &CovarianceEstimate::n)
        .def_readonly("lags", &CovarianceEstimate::lags)
        .def_readonly("T", &CovarianceEstimate::T);

    mod.def("companion_spectral_radius", &companion_spectral_radius);
    mod.def("is_stable", &is_stable);
    mod.def("simulate_ar", &simulate_ar, py::arg("model"), py::arg("T"), py::arg("seed"),
            py::arg("burn_in") = -1);
    mod.def("estimate_covlags", &estimate_covlags, py::arg("samples"), py::arg("n"));
    mod.def("ar_true_spectrum", &ar_true_spectrum, py::arg("model"), py::arg("N"));
    mod.def("ar_inverse_spectrum_support", &ar_inverse_spectrum_support, py::arg("model"),
            py::arg("tol") = 1e-8, py::arg("grid_points") = 0);
    mod.def("ar_true_lags", &ar_true_lags, py::arg("model"), py::arg("upto"));
    mod.def(
        "generate_random_sparse_ar",
        [](int m, int n, std::uint64_t seed, double sparsity, double pole_bound) {
            auto g = generate_random_sparse_ar(m, n, seed, sparsity, pole_bound);
            return py::make_tuple(g.model, g.support);
        },
        py::arg("m"), py::arg("n"), py::arg("seed"), py::arg("sparsity") = 0.1,
        py::arg("pole_bound") = 0.9);
    mod.def(
        "build_sigma_hat",
        [](const CovarianceEstimate& est, int N) {
            auto r = build_sigma_hat(est, N);
            return py::make_tuple(r.sigma, r.diagonal_loading);
        },
        py::arg("est"), py::arg("N"));

    // Solvers.
    py::class_<SolverOptions>(mod, "SolverOptions")
        .def(py::init<>())
        .def_readwrite("max_iters", &SolverOptions::max_iters)
        .def_readwrite("grad_tol", &SolverOptions::grad_tol)
        .def_readwrite("backtrack_ratio", &SolverOptions::backtrack_ratio)
        .def_readwrite("armijo_c", &SolverOptions::armijo_c)
        .def_readwrite("initial_step", &SolverOptions::initial_step)
        .def_readwrite("leak_tol", &SolverOptions::leak_tol)
        .def_readwrite("accelerated", &SolverOptions::accelerated);

    py::class_<SolverReport>(mod, "SolverReport")
        .def_readonly("iterations", &SolverReport::iterations)
        .def_readonly("objective", &SolverReport::objective)
        .def_readonly("grad_norm", &SolverReport::grad_norm)
        .def_readonly("converged", &SolverReport::converged)
        .def_readonly("notes", &SolverReport::notes);

    mod.def("maxent_dual_objective", &maxent_dual_objective);
    mod.def("maxent_dual_gradient", &maxent_dual_gradient);
    mod.def("solve_maxent", &solve_maxent, py::arg("sigma_hat"),
            py::arg("opts") = SolverOptions{});
    mod.def("complete_covariance", &complete_covariance);

    py::class_<DualVariable>(mod, "DualVariable")
        .def_static("zero", &DualVariable::zero, py::arg("m"), py::arg("N"), py::arg("n"))
        .def_readonly("Z", &DualVariable::Z)
        .def_readonly("band", &DualVariable::band);

    py::class_<IdentifiedModel>(mod, "IdentifiedModel")
        .def_readonly("S_o", &IdentifiedModel::S_o)
        .def_readonly("Sigma_o", &IdentifiedModel::Sigma_o)
        .def_readonly("support", &IdentifiedModel::support)
        .def_readonly("lambda_", &IdentifiedModel::lambda)
        .def_readonly("report", &IdentifiedModel::report)
        .def_readonly("leakage", &IdentifiedModel::leakage)
        .def_readonly("duality_gap", &IdentifiedModel::duality_gap)
        .def_readonly("sigma_from_dual", &IdentifiedModel::sigma_from_dual);

    mod.def("h_infinity", &h_infinity);
    mod.def("primal_objective", &primal_objective);
    mod.def("dual_objective", &dual_objective);
    mod.def("weighted_l1_project", &weighted_l1_project, py::arg("v"), py::arg("w"), py::arg("r"));
    mod.def("project_constraints", &project_constraints, py::arg("Z"), py::arg("lambda_"));
    mod.def(
        "solve_sparse_dual",
        [](const BandedBlockCirculant& sigma_hat, double lambda, const SolverOptions& opts) {
            return solve_sparse_dual(sigma_hat, lambda, opts);
        },
        py::arg("sigma_hat"), py::arg("lambda_"), py::arg("opts") = SolverOptions{});
    mod.def("recover_concentration", &recover_concentration, py::arg("sigma_hat"), py::arg("Z_o"),
            py::arg("lambda_"), py::arg("support_threshold_rel") = 1e-5);
    mod.def("support_from_concentration", &support_from_concentration, py::arg("S"),
            py::arg("threshold"));

    // Pipeline.
    py::class_<ExperimentConfig>(mod, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("m", &ExperimentConfig::m)
        .def_readwrite("n", &ExperimentConfig::n)
        .def_readwrite("N", &ExperimentConfig::N)
        .def_readwrite("T", &ExperimentConfig::T)
        .def_readwrite("seed", &ExperimentConfig::seed)
        .def_readwrite("lambdas", &ExperimentConfig::lambdas)
        .def_readwrite("pole_bound", &ExperimentConfig::pole_bound)
        .def_readwrite("sparsity", &ExperimentConfig::sparsity)
        .def_readwrite("innovation_variance", &ExperimentConfig::innovation_variance)
        .def_readwrite("burn_in", &ExperimentConfig::burn_in)
        .def_readwrite("grad_tol", &ExperimentConfig::grad_tol)
        .def_readwrite("leak_tol", &ExperimentConfig::leak_tol)
        .def_readwrite("max_iters", &ExperimentConfig::max_iters)
        .def_readwrite("support_threshold", &ExperimentConfig::support_threshold)
        .def_readwrite("accelerate", &ExperimentConfig::accelerate)
        .def_readwrite("out_dir", &ExperimentConfig::out_dir)
        .def("validate", &ExperimentConfig::validate);

    mod.def("identify_from_samples", &identify_from_samples, py::arg("samples"),
            py::arg("lambda_"), py::arg("config"));
    mod.def("cmd_generate", &cmd_generate);
    mod.def("cmd_identify", &cmd_identify);
}
