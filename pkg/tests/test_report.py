import json
import math

import pytest

from verdoorn.report import dumps, format_estimate, format_stat, jsonable, render_ml_table, render_tables
from verdoorn.stats import normal_sf_two_sided, t_sf_two_sided


def z_cell(est, z):
    return format_estimate(est, z, normal_sf_two_sided(z))


def t_cell(est, t, df=26):
    return format_estimate(est, t, t_sf_two_sided(t, df))


@pytest.mark.parametrize("est,stat,cell", [(0.854, 9.279, "0.854* (9.279)"), (0.169, 1.601, "0.169 (1.601)"),
                                           (-0.029, -3.675, "-0.029* (-3.675)")])
def test_ols_cells(est, stat, cell):
    assert t_cell(est, stat) == cell


@pytest.mark.parametrize("est,z,cell", [
    (0.698, 4.665, "0.698* (4.665)"), (0.545, 2.755, "0.545* (2.755)"), (0.478, 3.895, "0.478* (3.895)"),
    (0.016, 1.961, "0.016* (1.961)"), (0.011, 0.945, "0.011 (0.945)"), (-0.427, -2.272, "-0.427* (-2.272)"),
])
def test_ml_cells(est, z, cell):
    assert z_cell(est, z) == cell


def test_ten_percent_star():
    from verdoorn.ols import TestStat
    assert format_stat(3.050, TestStat.chi2(3.050, 1).p) == "3.050**"
    assert format_stat(2.230, TestStat.chi2(2.230, 1).p) == "2.230"
    assert format_stat(None, None) == "n/a"


def _stat(v):
    from verdoorn.ols import TestStat
    return TestStat.chi2(v, 1).to_dict()


def _ols(con, tcon, coef, tcoef):
    return {
        "constant": {"estimate": con, "t": tcon, "p": t_sf_two_sided(tcon, 26)},
        "coefficient": {"estimate": coef, "t": tcoef, "p": t_sf_two_sided(tcoef, 26)},
        "jb": {**_stat(1.978), "df": 2}, "bp": _stat(5.153), "kb": _stat(5.452),
        "residual_moran": {"I": 0.331, "permutation": {"pseudo_p": 0.01}},
        "lm_lag": _stat(0.416), "rlm_lag": _stat(7.111), "lm_err": _stat(8.774), "rlm_err": _stat(15.469),
        "r2_adj": 0.759, "n_obs": 28,
    }


def _fit(kind):
    return {
        "kind": kind, "n_obs": 28, "pseudo_r2": 0.852, "bp": _stat(4.246),
        "constant": {"estimate": 0.016, "z": 1.961, "p": normal_sf_two_sided(1.961)},
        "coefficient": {"estimate": 0.988, "z": 14.291, "p": normal_sf_two_sided(14.291)},
        "spatial_coef": {"estimate": 0.698, "z": 4.665, "p": normal_sf_two_sided(4.665)},
    }


def test_render_tables_layout():
    report = {"cells": [
        {"sector": "Agriculture", "period": [1995, 1999], "status": "ok", "ols": _ols(0.013, 3.042, 0.854, 9.279),
         "fit": _fit("ERROR")},
        {"sector": "Total", "period": [1995, 1999], "status": "ok", "ols": _ols(0.002, 0.411, 0.659, 8.874),
         "fit": None},
        {"sector": "Industry", "period": [1995, 1999], "status": "failed", "error": "DegenerateError: x"},
    ]}
    ols_text, ml_text = render_tables(report)
    assert "0.854* (9.279)" in ols_text and "0.331*" in ols_text and "15.469*" in ols_text
    assert "Total of sectors" in ols_text and "Industry 1995-1999: failed" in ols_text
    assert "0.698* (4.665)" in ml_text and "4.246*" in ml_text
    assert "Total of sectors" not in ml_text
    header = ols_text.splitlines()[3]
    for col in ("Con.", "Coef.", "JB", "BP", "KB", "M'I", "LM_l", "LMR_l", "LM_e", "LMR_e", "N.O."):
        assert col in header


def test_empty_ml_table():
    assert "(no spatial specification selected)" in render_ml_table("2000-2005", [])


def test_json_helpers():
    assert jsonable({"a": math.nan, "b": (1, 2.5)}) == {"a": None, "b": [1, 2.5]}
    assert json.loads(dumps({"x": float("inf")})) == {"x": None}
