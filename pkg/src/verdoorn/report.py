"""Fixed-width OLS and ML estimate tables, plus JSON helpers."""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .stats import stars

SECTOR_LABELS = {
    "Agriculture": "Agriculture",
    "Industry": "Industry",
    "Services": "Services",
    "Total": "Total of sectors",
}
OLS_COLUMNS = ("Con.", "Coef.", "JB", "BP", "KB", "M'I", "LM_l", "LMR_l", "LM_e", "LMR_e", "R²", "N.O.")
ML_COLUMNS = ("Constant", "Coefficient", "Coefficient^(S)", "Breusch-Pagan", "R²", "N.Observations")
OLS_TITLE = "OLS cross-section estimates of Verdoorn's equation with spatial specification tests ({period})"
ML_TITLE = "Results for ML estimates for Verdoorn's equation with spatial effects ({period})"
MISSING = "n/a"


def format_estimate(value: float, stat: float, p: float | None) -> str:
    """``0.854* (9.279)``: estimate with stars, test statistic in parentheses."""
    return f"{value:.3f}{stars(p)} ({stat:.3f})"


def format_stat(stat: float | None, p: float | None) -> str:
    if stat is None or not math.isfinite(stat):
        return MISSING
    return f"{stat:.3f}{stars(p)}"


def _test(d: dict | None) -> str:
    return MISSING if d is None else format_stat(d["stat"], d["p"])


def ols_row(ols: dict) -> list[str]:
    c, b = ols["constant"], ols["coefficient"]
    moran = ols.get("residual_moran")
    if moran is None:
        mi = MISSING
    else:
        perm = moran.get("permutation")
        mi = format_stat(moran["I"], perm["pseudo_p"] if perm else None)
    return [
        format_estimate(c["estimate"], c["t"], c["p"]),
        format_estimate(b["estimate"], b["t"], b["p"]),
        _test(ols.get("jb")),
        _test(ols.get("bp")),
        _test(ols.get("kb")),
        mi,
        _test(ols.get("lm_lag")),
        _test(ols.get("rlm_lag")),
        _test(ols.get("lm_err")),
        _test(ols.get("rlm_err")),
        f"{ols['r2_adj']:.3f}",
        str(ols["n_obs"]),
    ]


def ml_row(fit: dict) -> list[str]:
    c, b, s = fit["constant"], fit["coefficient"], fit["spatial_coef"]
    return [
        format_estimate(c["estimate"], c["z"], c["p"]),
        format_estimate(b["estimate"], b["z"], b["p"]),
        format_estimate(s["estimate"], s["z"], s["p"]),
        _test(fit.get("bp")),
        f"{fit['pseudo_r2']:.3f}",
        str(fit["n_obs"]),
    ]


def _grid(header: Sequence[str], rows: Sequence[Sequence[str]]) -> list[str]:
    widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]
    lines = []
    for r in [header, *rows]:
        cells = [r[0].ljust(widths[0])] + [cell.rjust(widths[i]) for i, cell in enumerate(r) if i > 0]
        lines.append("  ".join(cells).rstrip())
    return lines


def render_ols_table(period: str, rows: Iterable[tuple[str, dict]]) -> str:
    body = [[SECTOR_LABELS.get(label, label), *ols_row(d)] for label, d in rows]
    lines = [OLS_TITLE.format(period=period), "Equation: p = alpha + gamma q + u", ""]
    lines += _grid(["", *OLS_COLUMNS], body)
    lines += ["", "* significant at 5%; ** significant at 10%; t statistics in parentheses;",
              "M'I starred from its permutation pseudo p-value; R² is adjusted."]
    return "\n".join(lines) + "\n"


def render_ml_table(period: str, rows: Iterable[tuple[str, dict]]) -> str:
    rows = list(rows)
    lines = [ML_TITLE.format(period=period), ""]
    if not rows:
        return "\n".join(lines + ["(no spatial specification selected)"]) + "\n"
    body = [[SECTOR_LABELS.get(label, label), *ml_row(d)] for label, d in rows]
    lines += _grid(["", *ML_COLUMNS], body)
    kinds = "; ".join(
        f"{SECTOR_LABELS.get(label, label)}: {'spatial lag (rho)' if d['kind'] == 'LAG' else 'spatial error (lambda)'}"
        for label, d in rows
    )
    lines += ["", f"Coefficient^(S): {kinds}.",
              "* significant at 5%; ** significant at 10%; asymptotic z statistics in parentheses;",
              "R² is the squared correlation of predicted and observed values."]
    return "\n".join(lines) + "\n"


def _period_label(period) -> str:
    return f"{period[0]}-{period[1]}"


def render_tables(report: dict) -> tuple[str, str]:
    """OLS and ML table texts for every period of a serialized pipeline report."""
    periods: list[tuple[int, int]] = []
    for cell in report["cells"]:
        p = tuple(cell["period"])
        if p not in periods:
            periods.append(p)
    ols_parts, ml_parts = [], []
    for period in periods:
        cells = [c for c in report["cells"] if tuple(c["period"]) == period and c.get("status") == "ok"]
        ols_parts.append(render_ols_table(_period_label(period), [(c["sector"], c["ols"]) for c in cells]))
        ml_parts.append(render_ml_table(
            _period_label(period), [(c["sector"], c["fit"]) for c in cells if c.get("fit") is not None]
        ))
        failed = [c for c in report["cells"] if tuple(c["period"]) == period and c.get("status") != "ok"]
        for c in failed:
            ols_parts.append(f"{c['sector']} {_period_label(period)}: failed ({c.get('error')})\n")
    return "\n".join(ols_parts), "\n".join(ml_parts)


def jsonable(obj: Any) -> Any:
    """Plain JSON types with non-finite floats mapped to ``None``."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), indent=2, ensure_ascii=False) + "\n"


def write_atomic(path: str | Path, text: str) -> None:
    """Write through a temporary file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
