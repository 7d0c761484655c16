"""End-to-end runs over every sector and period."""

from __future__ import annotations

import csv
import io
import json
import logging
import platform
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import scipy

from . import __version__
from .errors import DegenerateError, ValidationError, VerdoornError
from .ingest import SECTORS, RegionalPanel, build_growth_vectors, canonical_sector, read_inputs
from .lisa import LisaResult, lisa
from .moran import MoranResult, MoranScatter, moran_scatter, permutation_test
from .ols import OlsReport, estimate_verdoorn_ols
from .report import dumps, render_tables, write_atomic
from .spatial_ml import SpatialFit
from .specsearch import SpecDecision, decide, run_selected
from .weights import SpatialWeights, distance_band

log = logging.getLogger(__name__)

DEFAULT_PERIODS = ((1995, 1999), (2000, 2005))

# seed purposes within a cell
_MORAN, _LISA, _RESID = 0, 1, 2


@dataclass
class RunConfig:
    panel_path: str | None = None
    coords_path: str | None = None
    threshold_km: float = 97.0
    periods: list[tuple[int, int]] = field(default_factory=lambda: [tuple(p) for p in DEFAULT_PERIODS])
    sectors: list[str] | None = None
    alpha: float = 0.05
    n_perm: int = 999
    seed: int = 0
    output_dir: str = "out"
    jobs: int = 1

    @classmethod
    def from_mapping(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        return cls(**data)

    def validate(self) -> "RunConfig":
        if not self.threshold_km > 0:
            raise ValidationError("threshold_km must be positive")
        if self.n_perm < 99:
            raise ValidationError("n_perm must be at least 99")
        if not 0 < self.alpha < 1:
            raise ValidationError("alpha must lie in (0, 1)")
        if self.jobs < 1:
            raise ValidationError("jobs must be at least 1")
        try:
            self.periods = [(int(a), int(b)) for a, b in self.periods]
        except (TypeError, ValueError):
            raise ValidationError("periods must be pairs of years") from None
        for a, b in self.periods:
            if b <= a:
                raise ValidationError(f"period {a}-{b} is empty")
        ordered = sorted(self.periods)
        for (a0, b0), (a1, b1) in zip(ordered, ordered[1:]):
            if a1 <= b0:
                raise ValidationError(f"periods {a0}-{b0} and {a1}-{b1} overlap")
        if self.sectors is not None:
            try:
                self.sectors = [canonical_sector(s) for s in self.sectors]
            except VerdoornError as exc:
                raise ValidationError(str(exc)) from None
        return self

    def echo(self) -> dict:
        """Settings that shape the results; output location and worker count are left out."""
        d = asdict(self)
        d["periods"] = [list(p) for p in self.periods]
        for key in _EXECUTION_ONLY:
            d.pop(key)
        return d


_EXECUTION_ONLY = ("output_dir", "jobs")


def cell_seed(seed: int, sector: str, period: tuple[int, int], purpose: int) -> int:
    """Seed for one task in one cell; independent of which other cells run."""
    ss = np.random.SeedSequence(seed, spawn_key=(SECTORS.index(sector), int(period[0]), int(period[1]), purpose))
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def cell_name(sector: str, period: tuple[int, int]) -> str:
    return f"{sector.lower()}_{period[0]}-{period[1]}"


@dataclass
class CellResult:
    sector: str
    period: tuple[int, int]
    status: str = "ok"
    error: str | None = None
    moran: MoranResult | None = None
    scatter: MoranScatter | None = None
    lisa: LisaResult | None = None
    ols: OlsReport | None = None
    decision: SpecDecision | None = None
    fit: SpatialFit | None = None

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"sector": self.sector, "period": list(self.period), "status": self.status}
        if self.error:
            out["error"] = self.error
        if self.status != "ok":
            return out
        out["moran"] = self.moran.to_dict()
        out["lisa"] = {
            "alpha": self.lisa.alpha, "n_perm": self.lisa.n_perm, "seed": self.lisa.seed,
            "counts": self.lisa.counts(), "clusters": self.lisa.cluster_map(),
        }
        out["ols"] = self.ols.to_dict()
        out["decision"] = self.decision.to_dict()
        out["fit"] = None if self.fit is None else self.fit.to_dict()
        return out


@dataclass
class PipelineReport:
    config: RunConfig
    weights: SpatialWeights
    cells: list[CellResult]

    @property
    def failed(self) -> list[CellResult]:
        return [c for c in self.cells if c.status != "ok"]

    def to_dict(self) -> dict:
        lo, hi = _safe_bounds(self.weights)
        return {
            "meta": {
                "package": "verdoorn",
                "version": __version__,
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "config": self.config.echo(),
                "assumptions": [
                    "growth rates are compound (log end-point) annual rates",
                    "distance band threshold is inclusive",
                    f"LISA significance alpha={self.config.alpha}, {self.config.n_perm} conditional permutations, no multiple-comparison correction",
                    "permutation p-values are two-sided around the permutation-null mean",
                    "ML R² is the squared correlation of predicted and observed values",
                    "ML z statistics are asymptotic, from the analytic information matrix",
                ],
            },
            "weights": {
                "n": self.weights.n,
                "threshold_km": self.weights.threshold_km,
                "ordering": list(self.weights.ordering),
                "islands": sorted(self.weights.islands),
                "eigen_bounds": [lo, hi],
            },
            "cells": [c.to_dict() for c in self.cells],
        }


def _safe_bounds(w: SpatialWeights):
    try:
        return w.eigen_bounds
    except DegenerateError:
        return None, None


def analyse_cell(panel: RegionalPanel, w: SpatialWeights, sector: str, period: tuple[int, int],
                 config: RunConfig) -> CellResult:
    """Run one (sector, period) cell; domain errors are captured, not raised."""
    cell = CellResult(sector, period)
    try:
        gv = build_growth_vectors(panel, sector, period)
        cell.moran = permutation_test(gv.p, w, config.n_perm, cell_seed(config.seed, sector, period, _MORAN))
        cell.scatter = moran_scatter(gv.p, w)
        cell.lisa = lisa(gv.p, w, config.n_perm, cell_seed(config.seed, sector, period, _LISA), config.alpha)
        cell.ols = estimate_verdoorn_ols(gv, w, config.n_perm, cell_seed(config.seed, sector, period, _RESID))
        if cell.ols.lm is None:
            raise DegenerateError("LM statistics unavailable: " + "; ".join(cell.ols.notes))
        cell.decision = decide(cell.ols, config.alpha)
        selected = run_selected(cell.decision, gv, w, cell.ols)
        cell.fit = selected if isinstance(selected, SpatialFit) else None
    except VerdoornError as exc:
        cell.status, cell.error = "failed", f"{type(exc).__name__}: {exc}"
        log.warning("cell %s %s failed: %s", sector, period, exc)
    return cell


def load_inputs(config: RunConfig) -> tuple[RegionalPanel, SpatialWeights]:
    if not config.panel_path or not config.coords_path:
        raise ValidationError("panel_path and coords_path are required")
    panel = read_inputs(config.panel_path, config.coords_path)
    for sector in config.sectors or ():
        if sector not in panel.sectors:
            raise ValidationError(f"sector {sector} not present in the panel")
    for a, b in config.periods:
        if a < panel.years[0] or b > panel.years[-1]:
            raise ValidationError(f"period {a}-{b} outside data coverage {panel.years[0]}-{panel.years[-1]}")
    w = distance_band(panel.coordinate_array(), config.threshold_km, panel.metric, panel.regions)
    return panel, w


def run_pipeline(config: RunConfig, write: bool = True) -> PipelineReport:
    config.validate()
    panel, w = load_inputs(config)
    sectors = config.sectors or list(panel.sectors)
    tasks = [(s, p) for p in config.periods for s in sectors]
    if config.jobs > 1:
        with ThreadPoolExecutor(config.jobs) as pool:
            cells = list(pool.map(lambda t: analyse_cell(panel, w, t[0], t[1], config), tasks))
    else:
        cells = [analyse_cell(panel, w, s, p, config) for s, p in tasks]
    report = PipelineReport(config, w, cells)
    if write:
        write_outputs(report)
    return report


def _csv(rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    for r in rows:
        wr.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def scatter_csv(scatter: MoranScatter) -> str:
    return _csv([("region", "z", "lag"), *scatter.rows()])


def moran_summary(result: MoranResult) -> str:
    perm = result.perm
    summary = {
        "I": result.I,
        "expected": result.expected,
        "pseudo_p": perm.pseudo_p if perm else None,
        "n_perm": perm.n_perm if perm else None,
        "seed": perm.seed if perm else None,
    }
    return json.dumps(summary) + "\n"


def lisa_csv(result: LisaResult) -> str:
    return _csv([("region", "z", "lag", "I_local", "pseudo_p", "cluster"), *result.rows()])


def lisa_json(result: LisaResult) -> str:
    return dumps({"alpha": result.alpha, "n_perm": result.n_perm, "seed": result.seed,
                  "clusters": result.cluster_map()})


def write_cell_files(out: Path, cell: CellResult) -> None:
    if cell.status != "ok":
        return
    name = cell_name(cell.sector, cell.period)
    write_atomic(out / f"moran_scatter_{name}.csv", scatter_csv(cell.scatter))
    write_atomic(out / f"moran_{name}.json", moran_summary(cell.moran))
    write_atomic(out / f"lisa_{name}.csv", lisa_csv(cell.lisa))
    write_atomic(out / f"lisa_{name}.json", lisa_json(cell.lisa))


def write_outputs(report: PipelineReport) -> Path:
    out = Path(report.config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for cell in report.cells:
        write_cell_files(out, cell)
    data = report.to_dict()
    write_atomic(out / "report.json", dumps(data))
    ols_text, ml_text = render_tables(data)
    write_atomic(out / "tables_ols.txt", ols_text)
    write_atomic(out / "tables_ml.txt", ml_text)
    report.weights.save(out / "weights.txt")
    # wall-clock data stays out of report.json so reruns are byte-identical
    write_atomic(out / "run_meta.json", dumps({
        "finished_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "failed_cells": [cell_name(c.sector, c.period) for c in report.failed],
        **{key: getattr(report.config, key) for key in _EXECUTION_ONLY},
    }))
    return out


@dataclass(frozen=True)
class SweepRow:
    threshold: float
    sector: str
    period: tuple[int, int]
    I: float | None
    pseudo_p: float | None
    islands: int


def sweep_threshold(panel: RegionalPanel, thresholds: Sequence[float], sectors: Sequence[str],
                    periods: Sequence[tuple[int, int]], n_perm: int = 999, seed: int = 0) -> list[SweepRow]:
    """Global Moran's I of productivity growth under each distance threshold."""
    thresholds = [float(t) for t in thresholds]
    if any(t <= 0 for t in thresholds):
        raise ValidationError("thresholds must be positive")
    if thresholds != sorted(thresholds):
        raise ValidationError("thresholds must be sorted ascending")
    coords = panel.coordinate_array()
    growth = {(s, p): build_growth_vectors(panel, s, p) for p in periods for s in sectors}
    rows = []
    for t in thresholds:
        w = distance_band(coords, t, panel.metric, panel.regions)
        n_isl = len(w.island_index)
        for p in periods:
            for s in sectors:
                gv = growth[(s, p)]
                if n_isl == w.n:
                    rows.append(SweepRow(t, s, p, None, None, n_isl))
                    continue
                res = permutation_test(gv.p, w, n_perm, cell_seed(seed, s, p, _MORAN))
                rows.append(SweepRow(t, s, p, res.I, res.pseudo_p, n_isl))
    return rows


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    body = [("threshold", "sector", "period", "I", "pseudo_p", "islands")]
    for r in rows:
        body.append((r.threshold, r.sector, f"{r.period[0]}-{r.period[1]}",
                     "unavailable" if r.I is None else r.I,
                     "unavailable" if r.pseudo_p is None else r.pseudo_p, r.islands))
    return _csv(body)
