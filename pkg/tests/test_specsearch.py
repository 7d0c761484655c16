import numpy as np
import pytest

from verdoorn.ingest import GrowthVector
from verdoorn.ols import LMTests, OlsReport, TestStat, estimate_verdoorn_ols
from verdoorn.spatial_ml import SpatialFit
from verdoorn.specsearch import decide, run_selected

from conftest import random_weights
from reference import REPORTED_LM, lm_from_reported


@pytest.mark.parametrize("cell", sorted(REPORTED_LM, key=str))
def test_reported_choices(cell):
    values = REPORTED_LM[cell]
    assert decide(lm_from_reported(values)).choice == values[-1]


def lm(lag, err, rlag, rerr):
    mk = lambda v: None if v is None else TestStat.chi2(v, 1)
    return LMTests(mk(lag), mk(err), mk(rlag), mk(rerr))


def test_exact_robust_tie_goes_to_error():
    d = decide(lm(10.0, 10.0, 2.0, 2.0))
    assert d.choice == "ERROR" and d.branch == "both-robust-tie"


def test_robust_larger_lag():
    assert decide(lm(10.0, 9.0, 3.0, 1.0)).choice == "LAG"


def test_degenerate_robust_falls_back_to_plain():
    d = decide(lm(12.0, 8.0, None, None))
    assert d.choice == "LAG" and d.branch == "both-plain-fallback"
    assert any("warning" in line for line in d.narrative)


def test_neither_significant():
    assert decide(lm(1.0, 1.0, 5.0, 5.0)).choice == "OLS"


@pytest.mark.parametrize("cell", sorted(REPORTED_LM, key=str))
def test_raising_alpha_never_returns_to_ols(cell):
    tests = lm_from_reported(REPORTED_LM[cell])
    choices = [decide(tests, a).choice for a in np.linspace(0.001, 0.5, 40)]
    first = next((i for i, c in enumerate(choices) if c != "OLS"), len(choices))
    assert all(c != "OLS" for c in choices[first:])


def test_decision_narrative_and_dict():
    d = decide(lm_from_reported(REPORTED_LM[("Services", (1995, 1999))]))
    out = d.to_dict()
    assert out["choice"] == "LAG" and out["branch"] == "lag-only"
    assert out["evidence"]["lm_err"]["stat"] == 3.607


@pytest.mark.parametrize("spatial,expected_kind", [(0.0, None), (0.8, "LAG")])
def test_run_selected_dispatch(spatial, expected_kind):
    rng = np.random.default_rng(2)
    w = random_weights(rng, 40, threshold=30)
    q = rng.standard_normal(40)
    p = np.linalg.solve(np.eye(40) - spatial * w.dense(), 0.5 * q + 0.3 * rng.standard_normal(40))
    gv = GrowthVector("Services", (1995, 1999), w.ordering, p, q)
    rep = estimate_verdoorn_ols(gv, w, n_perm=99)
    d = decide(rep)
    out = run_selected(d, gv, w, rep)
    if d.choice == "OLS":
        assert out is rep and expected_kind is None
    else:
        assert isinstance(out, SpatialFit) and out.kind == d.choice and out.decision is d
        assert expected_kind is not None
