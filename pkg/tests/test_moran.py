import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from verdoorn.errors import DegenerateError, ParameterError
from verdoorn.moran import moran_scatter, morans_i, permutation_test

from conftest import random_weights, ring


def dense_moran(x, W):
    z = x - x.mean()
    return len(x) / W.sum() * (z @ W @ z) / (z @ z)


def test_alternating_ring_is_minus_one():
    assert morans_i(np.array([1.0, -1.0, 1.0, -1.0]), ring(4)).I == pytest.approx(-1.0, abs=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_matches_dense_formula(seed):
    rng = np.random.default_rng(seed)
    w = random_weights(rng, 25)
    x = rng.standard_normal(25)
    assert morans_i(x, w).I == pytest.approx(dense_moran(x, w.dense()), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(a=st.floats(0.01, 1e3), b=st.floats(-1e3, 1e3), seed=st.integers(0, 999))
def test_affine_invariance(a, b, seed):
    rng = np.random.default_rng(seed)
    w = random_weights(rng, 15)
    x = rng.standard_normal(15)
    assert morans_i(a * x + b, w).I == pytest.approx(morans_i(x, w).I, abs=1e-9)


def test_scatter_slope_equals_i(rng):
    w = random_weights(rng, 30)
    x = rng.standard_normal(30)
    sc = moran_scatter(x, w)
    slope = np.polyfit(sc.z, sc.lag, 1)[0]
    assert sc.slope == pytest.approx(morans_i(x, w).I, abs=1e-12)
    assert slope == pytest.approx(sc.slope, abs=1e-10)


def test_constant_input_is_degenerate():
    with pytest.raises(DegenerateError):
        morans_i(np.ones(4), ring(4))


def test_too_few_permutations():
    with pytest.raises(ParameterError):
        permutation_test(np.arange(4.0), ring(4), n_perm=10)


def test_permutation_is_deterministic(rng):
    w = random_weights(rng, 20)
    x = rng.standard_normal(20)
    a = permutation_test(x, w, 199, seed=7, keep=True)
    b = permutation_test(x, w, 199, seed=7, keep=True)
    np.testing.assert_array_equal(a.samples, b.samples)
    c = permutation_test(x, w, 199, seed=8, keep=True)
    assert not np.array_equal(a.samples, c.samples)


def test_pseudo_p_against_exhaustive_distribution():
    # n = 6: 720 permutations; with many draws the pseudo p converges to the exact one
    w = ring(6)
    x = np.array([3.0, 2.5, 1.0, -0.5, -1.0, 0.2])
    W = w.dense()
    ei = -1 / 5
    obs = dense_moran(x, W) - ei
    exact = np.mean([abs(dense_moran(x[list(p)], W) - ei) >= abs(obs) - 1e-12
                     for p in itertools.permutations(range(6))])
    res = permutation_test(x, w, 19_999, seed=3)
    se = math.sqrt(exact * (1 - exact) / 19_999)
    assert abs(res.pseudo_p - exact) < 4 * se + 1e-4


def test_permutation_mean_near_expectation(rng):
    w = random_weights(rng, 28)
    res = permutation_test(rng.standard_normal(28), w, 2999, seed=1)
    se = res.perm.perm_sd / math.sqrt(2999)
    assert abs(res.perm.perm_mean - res.expected) < 4 * se
