"""Regional accounts ingestion and growth-rate construction.

Panels arrive as delimited text with one (region, sector, year) observation
per row; coordinates come from a separate file keyed by region.  Region
order is fixed at first appearance and every downstream array uses it.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence, TextIO

import numpy as np

from .errors import DomainError, IntegrityError, SchemaError

SECTORS = ("Agriculture", "Industry", "Services", "Total")
COMPONENT_SECTORS = SECTORS[:3]
METRICS = ("planar_km", "latlon_deg")

DEFAULT_SCHEMA = {
    "region": "region",
    "sector": "sector",
    "year": "year",
    "output": "output",
    "employment": "employment",
}

_SECTOR_ALIASES = {s.lower(): s for s in SECTORS}
_SECTOR_ALIASES.update({"all": "Total", "total of sectors": "Total", "all sectors": "Total"})


def canonical_sector(name: str) -> str:
    try:
        return _SECTOR_ALIASES[name.strip().lower()]
    except KeyError:
        raise DomainError(f"unknown sector {name!r}; expected one of {', '.join(SECTORS)}") from None


@dataclass(frozen=True)
class Observation:
    output: float
    employment: float


@dataclass(frozen=True)
class RegionalPanel:
    regions: tuple[str, ...]
    sectors: tuple[str, ...]
    years: tuple[int, ...]
    observations: Mapping[tuple[str, str, int], Observation]
    coords: Mapping[str, tuple[float, float]] = field(default_factory=dict)
    metric: str = "planar_km"
    total_derived: bool = False

    @property
    def n(self) -> int:
        return len(self.regions)

    def with_coords(self, coords: Mapping[str, tuple[float, float]], metric: str) -> "RegionalPanel":
        missing = [r for r in self.regions if r not in coords]
        if missing:
            raise SchemaError(f"no coordinates for regions: {', '.join(missing)}")
        return RegionalPanel(
            self.regions, self.sectors, self.years, self.observations,
            {r: coords[r] for r in self.regions}, metric, self.total_derived,
        )

    def coordinate_array(self) -> np.ndarray:
        if not self.coords:
            raise SchemaError("panel has no coordinates attached")
        return np.array([self.coords[r] for r in self.regions], dtype=float)


@dataclass(frozen=True)
class GrowthVector:
    """Per-region average annual growth of productivity (p) and output (q)."""

    sector: str
    period: tuple[int, int]
    regions: tuple[str, ...]
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        n = len(self.regions)
        if self.p.shape != (n,) or self.q.shape != (n,):
            raise DomainError("growth vectors must have one entry per region")
        if not (np.all(np.isfinite(self.p)) and np.all(np.isfinite(self.q))):
            raise DomainError(f"non-finite growth rate in {self.sector} {self.period}")


def _sniff_delimiter(header: str) -> str:
    return "\t" if "\t" in header and "," not in header else ","


def _read_rows(source: TextIO | str, delimiter: str | None):
    text = source if isinstance(source, str) else source.read()
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise SchemaError("empty input: no header line")
    delim = delimiter or _sniff_delimiter(lines[0])
    reader = csv.reader(io.StringIO(text), delimiter=delim)
    header = [h.strip() for h in next(reader)]
    return header, reader


def load_panel(
    source: TextIO | str,
    schema: Mapping[str, str] | None = None,
    delimiter: str | None = None,
) -> RegionalPanel:
    """Parse a delimited panel into a validated :class:`RegionalPanel`.

    ``schema`` maps the logical names region/sector/year/output/employment to
    the column headers actually used in ``source``.
    """
    schema = {**DEFAULT_SCHEMA, **(schema or {})}
    header, reader = _read_rows(source, delimiter)
    try:
        idx = {key: header.index(col) for key, col in schema.items()}
    except ValueError:
        missing = [col for col in schema.values() if col not in header]
        raise SchemaError(f"missing column(s): {', '.join(missing)}") from None

    regions: list[str] = []
    seen_regions: set[str] = set()
    obs: dict[tuple[str, str, int], Observation] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) < len(header):
            raise SchemaError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        region = row[idx["region"]].strip()
        try:
            sector = canonical_sector(row[idx["sector"]])
            year = int(row[idx["year"]])
            output = float(row[idx["output"]])
            employment = float(row[idx["employment"]])
        except DomainError as exc:
            raise DomainError(f"line {lineno}: {exc}") from None
        except ValueError as exc:
            raise SchemaError(f"line {lineno}: malformed value ({exc})") from None
        if not region:
            raise SchemaError(f"line {lineno}: empty region id")
        if not (math.isfinite(output) and math.isfinite(employment)):
            raise DomainError(f"line {lineno}: non-finite output or employment")
        if employment <= 0:
            raise DomainError(f"line {lineno}: non-positive employment {employment} for {region}/{sector}/{year}")
        if output < 0:
            raise DomainError(f"line {lineno}: negative output {output} for {region}/{sector}/{year}")
        key = (region, sector, year)
        if key in obs:
            raise IntegrityError(f"line {lineno}: duplicate observation {key}")
        obs[key] = Observation(output, employment)
        if region not in seen_regions:
            seen_regions.add(region)
            regions.append(region)

    if not obs:
        raise SchemaError("empty input: header but no observations")
    return _assemble(tuple(regions), obs)


def _assemble(regions: tuple[str, ...], obs: dict) -> RegionalPanel:
    years = sorted({k[2] for k in obs})
    full_years = tuple(range(years[0], years[-1] + 1))
    present = {k[1] for k in obs}
    sectors = tuple(s for s in SECTORS if s in present)
    for region in regions:
        for sector in sectors:
            gaps = [y for y in full_years if (region, sector, y) not in obs]
            if gaps:
                raise IntegrityError(f"{region}/{sector} has no observation for year(s) {gaps}")

    total_derived = False
    if "Total" not in present and all(s in present for s in COMPONENT_SECTORS):
        for region in regions:
            for year in full_years:
                parts = [obs[(region, s, year)] for s in COMPONENT_SECTORS]
                obs[(region, "Total", year)] = Observation(
                    sum(o.output for o in parts), sum(o.employment for o in parts)
                )
        sectors = sectors + ("Total",)
        total_derived = True
    return RegionalPanel(regions, sectors, full_years, obs, total_derived=total_derived)


def load_coords(source: TextIO | str, delimiter: str | None = None) -> tuple[dict[str, tuple[float, float]], str]:
    """Read ``region,x,y,metric`` rows.  Returns ``(coords, metric)``.

    For ``latlon_deg`` the x column holds latitude and y holds longitude.
    """
    header, reader = _read_rows(source, delimiter)
    missing = [c for c in ("region", "x", "y") if c not in header]
    if missing:
        raise SchemaError(f"missing column(s): {', '.join(missing)}")
    ir, ix, iy = header.index("region"), header.index("x"), header.index("y")
    im = header.index("metric") if "metric" in header else None
    coords: dict[str, tuple[float, float]] = {}
    metrics = set()
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        try:
            region = row[ir].strip()
            xy = (float(row[ix]), float(row[iy]))
        except (ValueError, IndexError) as exc:
            raise SchemaError(f"line {lineno}: malformed coordinate row ({exc})") from None
        metric = row[im].strip() if im is not None and row[im].strip() else "planar_km"
        if metric not in METRICS:
            raise DomainError(f"line {lineno}: unknown metric {metric!r}")
        if region in coords:
            raise IntegrityError(f"line {lineno}: duplicate coordinates for {region}")
        coords[region] = xy
        metrics.add(metric)
    if not coords:
        raise SchemaError("empty coordinate file")
    if len(metrics) > 1:
        raise DomainError(f"coordinate file mixes metrics: {sorted(metrics)}")
    return coords, metrics.pop()


def read_inputs(panel_path: str | Path, coords_path: str | Path | None = None) -> RegionalPanel:
    """Load ``panel.csv`` and, if given, ``coords.csv`` from disk."""
    with open(panel_path, encoding="utf-8", newline="") as fh:
        panel = load_panel(fh)
    if coords_path is not None:
        with open(coords_path, encoding="utf-8", newline="") as fh:
            coords, metric = load_coords(fh)
        panel = panel.with_coords(coords, metric)
    return panel


def productivity(panel: RegionalPanel) -> dict[tuple[str, str, int], float]:
    """Output per worker for every observation."""
    out = {}
    for key, o in panel.observations.items():
        if o.employment <= 0:
            raise DomainError(f"non-positive employment at {key}")
        out[key] = o.output / o.employment
    return out


def avg_growth(series: Sequence[float], years: Sequence[int] | None = None) -> float:
    """Compound annual growth between the first and last level.

    >>> round(avg_growth([100, 110, 121]), 6)
    0.09531
    """
    values = [float(v) for v in series]
    if len(values) < 2:
        raise DomainError("growth needs at least two levels")
    bad = [v for v in values if not v > 0]
    if bad:
        raise DomainError(f"non-positive level(s) {bad} in growth series")
    span = (years[-1] - years[0]) if years is not None else len(values) - 1
    if span <= 0:
        raise DomainError("growth series must span a positive number of years")
    return (math.log(values[-1]) - math.log(values[0])) / span


def build_growth_vectors(panel: RegionalPanel, sector: str, period: tuple[int, int]) -> GrowthVector:
    sector = canonical_sector(sector)
    start, end = int(period[0]), int(period[1])
    if sector not in panel.sectors:
        raise DomainError(f"sector {sector} not present in panel")
    if end <= start or start < panel.years[0] or end > panel.years[-1]:
        raise DomainError(f"period {start}-{end} outside panel coverage {panel.years[0]}-{panel.years[-1]}")
    years = list(range(start, end + 1))
    p = np.empty(panel.n)
    q = np.empty(panel.n)
    for i, region in enumerate(panel.regions):
        rows = [panel.observations[(region, sector, y)] for y in years]
        try:
            q[i] = avg_growth([o.output for o in rows], years)
            p[i] = avg_growth([o.output / o.employment for o in rows], years)
        except DomainError as exc:
            raise DomainError(f"{region}/{sector} {start}-{end}: {exc}") from None
    return GrowthVector(sector, (start, end), panel.regions, p, q)


def iter_cells(sectors: Iterable[str], periods: Iterable[tuple[int, int]]):
    for period in periods:
        for sector in sectors:
            yield canonical_sector(sector), (int(period[0]), int(period[1]))
