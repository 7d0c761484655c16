import math

import numpy as np
import pytest

from verdoorn.errors import ParameterError
from verdoorn.ols import ols, verdoorn_design
from verdoorn.optimize import golden_section_max
from verdoorn.spatial_ml import (coef_bounds, fit_error, fit_lag, likelihood_profile, log_jacobian, profile,
                                 weights_spectrum)
from verdoorn.weights import distance_band, lattice_coords

from conftest import random_weights, ring
from oracles import logdet_dense


def test_four_ring_spectrum():
    np.testing.assert_allclose(weights_spectrum(ring(4)), [-1, 0, 0, 1], atol=1e-12)


def test_spectrum_matches_dense_eigenvalues(rng):
    w = random_weights(rng, 20)
    dense = np.sort(np.linalg.eigvals(w.dense()).real)
    np.testing.assert_allclose(weights_spectrum(w), dense, atol=1e-10)


def test_island_contributes_zero_eigenvalue():
    w = distance_band(np.array([[0.0, 0], [1, 0], [2, 0], [50, 0]]), 1.0)
    s = weights_spectrum(w)
    assert np.sum(np.abs(s) < 1e-12) >= 2 and s[-1] == pytest.approx(1.0)


@pytest.mark.parametrize("seed", range(5))
def test_log_jacobian_matches_slogdet(seed):
    rng = np.random.default_rng(seed)
    w = random_weights(rng, 25)
    lo, hi = coef_bounds(w)
    for c in rng.uniform(lo * 0.99, hi * 0.99, 5):
        assert log_jacobian(c, w.spectrum) == pytest.approx(logdet_dense(c, w.dense()), abs=1e-8)


def test_golden_section_finds_quadratic_peak():
    res = golden_section_max(lambda x: -(x - 0.3) ** 2, -1.0, 1.0)
    assert res.x == pytest.approx(0.3, abs=1e-7)


def test_golden_section_endpoint_maximum():
    res = golden_section_max(lambda x: x, -1.0, 1.0)
    assert res.x == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("kind", ["LAG", "ERROR"])
def test_nesting_at_zero(kind, rng):
    w = random_weights(rng, 30)
    X = verdoorn_design(rng.standard_normal(30))
    y = X @ [0.1, 0.6] + rng.standard_normal(30)
    assert profile(kind, y, X, w).loglik(0.0) == pytest.approx(ols(y, X).loglik, abs=1e-10)


@pytest.mark.parametrize("fitter", [fit_lag, fit_error])
def test_fit_beats_every_grid_point(fitter, rng):
    w = random_weights(rng, 30)
    X = verdoorn_design(rng.standard_normal(30))
    y = X @ [0.1, 0.6] + rng.standard_normal(30)
    fit = fitter(y, X, w)
    lo, hi = fit.rho_bounds
    grid = np.linspace(lo + 1e-3, hi - 1e-3, 201)
    best = max(v for _, v in likelihood_profile(fit.kind, y, X, w, grid))
    assert fit.loglik >= best - 1e-9
    assert fit.loglik >= fit.loglik_ols - 1e-12


def test_profile_outside_bounds(rng):
    w = random_weights(rng, 10)
    X = verdoorn_design(rng.standard_normal(10))
    with pytest.raises(ParameterError):
        likelihood_profile("LAG", rng.standard_normal(10), X, w, [1.5])


def test_lag_residual_identity(rng):
    w = random_weights(rng, 30)
    X = verdoorn_design(rng.standard_normal(30))
    y = X @ [0.1, 0.6] + rng.standard_normal(30)
    fit = fit_lag(y, X, w)
    expected = y - fit.spatial_coef * (w.dense() @ y) - X @ fit.beta
    np.testing.assert_allclose(fit.residuals, expected, atol=1e-12)
    assert fit.sigma2 == pytest.approx(fit.residuals @ fit.residuals / 30)


def test_lag_likelihood_against_dense(rng):
    w = random_weights(rng, 20)
    X = verdoorn_design(rng.standard_normal(20))
    y = X @ [0.1, 0.6] + rng.standard_normal(20)
    fit = fit_lag(y, X, w)
    n, r = 20, fit.spatial_coef
    e = fit.residuals
    ref = -n / 2 * (math.log(2 * math.pi) + 1) - n / 2 * math.log(e @ e / n) + logdet_dense(r, w.dense())
    assert fit.loglik == pytest.approx(ref, abs=1e-9)


def test_lattice_recovery_single_seed():
    w = distance_band(lattice_coords(20, 20), 1.0)
    rng = np.random.default_rng(5)
    q = rng.standard_normal(400)
    X = verdoorn_design(q)
    y = np.linalg.solve(np.eye(400) - 0.7 * w.dense(), X @ [1.0, 0.5] + rng.standard_normal(400))
    fit = fit_lag(y, X, w)
    assert fit.spatial_coef == pytest.approx(0.7, abs=0.08)
    assert fit.beta[1] == pytest.approx(0.5, abs=0.1)
    assert fit.spatial_p < 0.05


def test_error_model_with_zero_lambda_matches_ols(rng):
    w = random_weights(rng, 25)
    X = verdoorn_design(rng.standard_normal(25))
    y = X @ [0.1, 0.6] + rng.standard_normal(25)
    prof = profile("ERROR", y, X, w)
    np.testing.assert_allclose(prof.beta(0.0), ols(y, X).beta, atol=1e-12)


def test_fit_to_dict_is_complete(rng):
    w = random_weights(rng, 25)
    X = verdoorn_design(rng.standard_normal(25))
    d = fit_error(X @ [0.1, 0.6] + rng.standard_normal(25), X, w).to_dict()
    assert d["kind"] == "ERROR" and set(d) >= {"constant", "coefficient", "spatial_coef", "bp", "pseudo_r2"}
