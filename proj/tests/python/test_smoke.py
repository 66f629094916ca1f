"""Smoke tests for the python bindings: the main operations round-trip and
agree with numpy on small dense instances."""

import numpy as np
import pytest

import rgm


def scalar_circulant(values, N):
    return rgm.BlockCirculant(1, N, [np.array([[v]], float) for v in values])


def test_dense_and_symbol_match_numpy():
    C = scalar_circulant([2.0, 1.0, 0.0], 4)
    D = rgm.to_dense(C)
    expect = np.array([[2, 1, 0, 1], [1, 2, 1, 0], [0, 1, 2, 1], [1, 0, 1, 2]], float)
    assert np.array_equal(D, expect)

    samples = [s[0, 0] for s in rgm.symbol_eval(C).samples]
    assert np.allclose(samples, [4, 2, 0, 2])

    S = scalar_circulant([3.0, 1.0, 0.0], 4)
    sign, ld = np.linalg.slogdet(rgm.to_dense(S))
    assert sign > 0
    assert rgm.logdet(S) == pytest.approx(ld)
    assert np.allclose(rgm.to_dense(rgm.inverse(S)), np.linalg.inv(rgm.to_dense(S)))
    assert rgm.min_symbol_eig(C) == pytest.approx(0.0, abs=1e-12)


def test_simulation_estimation_completion_chain():
    model, support = rgm.generate_random_sparse_ar(3, 1, seed=5, sparsity=0.5, pole_bound=0.8)
    assert rgm.is_stable(model)
    assert rgm.companion_spectral_radius(model) <= 0.8 + 1e-9

    x = rgm.simulate_ar(model, 400, seed=9)
    assert x.shape == (400, 3)
    assert np.array_equal(x, rgm.simulate_ar(model, 400, seed=9))

    est = rgm.estimate_covlags(x, 1)
    sigma_hat, loading = rgm.build_sigma_hat(est, 16)
    assert loading == 0.0

    X, report = rgm.solve_maxent(sigma_hat)
    assert report.converged
    Sigma = rgm.complete_covariance(X)
    # KKT: the completion matches the banded data.
    for k in range(2):
        assert np.allclose(Sigma.block(k), sigma_hat.blocks[k], atol=1e-6)


def test_sparse_dual_and_support():
    model, support = rgm.generate_random_sparse_ar(3, 1, seed=11, sparsity=0.5, pole_bound=0.8)
    x = rgm.simulate_ar(model, 600, seed=13)
    sigma_hat, _ = rgm.build_sigma_hat(rgm.estimate_covlags(x, 1), 16)

    Z, report = rgm.solve_sparse_dual(sigma_hat, 2.0)
    assert report.converged
    ident = rgm.recover_concentration(sigma_hat, Z, 2.0)
    assert ident.duality_gap >= -1e-9
    assert ident.leakage <= 1e-6
    assert len(ident.support) <= 3

    # Huge lambda kills every edge.
    Zbig, _ = rgm.solve_sparse_dual(sigma_hat, 1e6)
    assert len(rgm.recover_concentration(sigma_hat, Zbig, 1e6).support) == 0


def test_weighted_l1_projection():
    u = rgm.weighted_l1_project(np.array([1.0, 0.0]), np.array([2.0, 1.0]), 1.0)
    assert np.allclose(u, [0.5, 0.0])
    v = np.array([0.05, -0.02, 0.01])
    w = np.array([2.0, 1.0, 1.0])
    assert np.array_equal(rgm.weighted_l1_project(v, w, 1.0), v)
    with pytest.raises(ValueError):
        rgm.weighted_l1_project(v, w, 0.0)


def test_pipeline_identify(tmp_path):
    cfg = rgm.ExperimentConfig()
    cfg.m, cfg.n, cfg.N, cfg.T = 3, 1, 16, 300
    cfg.seed = 7
    cfg.sparsity = 0.5
    cfg.lambdas = [1.5]
    cfg.out_dir = str(tmp_path / "gen")
    rgm.cmd_generate(cfg)
    assert (tmp_path / "gen" / "samples.csv").exists()

    cfg.out_dir = str(tmp_path / "ident")
    models = rgm.cmd_identify(tmp_path / "gen" / "samples.csv", cfg)
    assert len(models) == 1
    assert (tmp_path / "ident" / "lambda_1.5" / "support.txt").exists()


def test_errors_are_typed():
    bad = rgm.BandedBlockCirculant(1, 8, 1, [np.ones((1, 1)), np.ones((1, 1))])
    with pytest.raises(ArithmeticError):
        rgm.solve_maxent(bad)
