"""Synthetic 28-region panel with planted spatial data-generating processes.

Coordinates are approximate centroids of the mainland Portuguese NUTS III
regions, projected to planar kilometres.  Growth rates are drawn per sector
and period from a Verdoorn equation with a planted spatial structure
(none, lag or error), then turned into annual output and employment levels
whose end-point log growth reproduces the drawn rates exactly.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .weights import distance_band

DEFAULT_SEED = 8
FIXTURE_THRESHOLD_KM = 97.0
PERIODS = ((1995, 1999), (2000, 2005))

# (name, lat, lon)
REGIONS = (
    ("Minho-Lima", 41.85, -8.55),
    ("Cavado", 41.60, -8.35),
    ("Ave", 41.45, -8.20),
    ("Grande Porto", 41.20, -8.55),
    ("Tamega", 41.20, -8.05),
    ("Entre Douro e Vouga", 40.90, -8.45),
    ("Douro", 41.15, -7.55),
    ("Alto Tras-os-Montes", 41.65, -7.10),
    ("Baixo Vouga", 40.65, -8.55),
    ("Baixo Mondego", 40.20, -8.60),
    ("Pinhal Litoral", 39.85, -8.85),
    ("Pinhal Interior Norte", 40.10, -8.15),
    ("Dao-Lafoes", 40.65, -7.90),
    ("Pinhal Interior Sul", 39.75, -7.95),
    ("Serra da Estrela", 40.45, -7.55),
    ("Beira Interior Norte", 40.65, -7.10),
    ("Beira Interior Sul", 39.85, -7.35),
    ("Cova da Beira", 40.20, -7.45),
    ("Oeste", 39.30, -9.15),
    ("Medio Tejo", 39.50, -8.30),
    ("Grande Lisboa", 38.80, -9.20),
    ("Peninsula de Setubal", 38.60, -8.95),
    ("Leziria do Tejo", 39.10, -8.60),
    ("Alentejo Litoral", 38.00, -8.60),
    ("Alto Alentejo", 39.15, -7.65),
    ("Alentejo Central", 38.60, -7.85),
    ("Baixo Alentejo", 37.90, -7.85),
    ("Algarve", 37.20, -8.10),
)

LISBON_HOT = ("Grande Lisboa", "Peninsula de Setubal", "Oeste")
CENTRAL_COLD = ("Dao-Lafoes", "Serra da Estrela", "Pinhal Interior Norte", "Cova da Beira")

_KM_PER_DEG = 6371.0 * math.pi / 180.0
_REF_LAT, _REF_LON = 39.5, -8.0


def planar_coords() -> np.ndarray:
    """Equirectangular projection of the centroids around (39.5N, 8W)."""
    lat = np.array([r[1] for r in REGIONS])
    lon = np.array([r[2] for r in REGIONS])
    x = (lon - _REF_LON) * math.cos(math.radians(_REF_LAT)) * _KM_PER_DEG
    y = (lat - _REF_LAT) * _KM_PER_DEG
    return np.round(np.column_stack([x, y]), 3)


def region_names() -> tuple[str, ...]:
    return tuple(r[0] for r in REGIONS)


@dataclass(frozen=True)
class CellDGP:
    sector: str
    period: tuple[int, int]
    model: str  # OLS | LAG | ERROR
    alpha: float
    gamma: float
    spatial: float
    noise_sd: float
    q_mean: float
    q_sd: float
    pattern: float = 0.0


DGPS = (
    CellDGP("Agriculture", (1995, 1999), "ERROR", 0.013, 0.85, 0.9, 0.012, 0.01, 0.08),
    CellDGP("Industry", (1995, 1999), "OLS", -0.029, 0.95, 0.0, 0.008, 0.03, 0.02),
    CellDGP("Services", (1995, 1999), "LAG", 0.02, 0.40, 0.65, 0.004, 0.035, 0.006, pattern=0.025),
    CellDGP("Total", (1995, 1999), "OLS", 0.002, 0.66, 0.0, 0.006, 0.03, 0.015),
    CellDGP("Agriculture", (2000, 2005), "OLS", -0.014, 0.68, 0.0, 0.02, 0.0, 0.03),
    CellDGP("Industry", (2000, 2005), "LAG", 0.015, 0.64, -0.8, 0.006, 0.01, 0.03),
    CellDGP("Services", (2000, 2005), "LAG", -0.011, 0.55, 0.75, 0.005, 0.03, 0.02),
    CellDGP("Total", (2000, 2005), "ERROR", 0.001, 0.51, 0.9, 0.006, 0.02, 0.05),
)


def services_pattern(coords: np.ndarray) -> np.ndarray:
    """Alternating north-south field: high around Porto and Lisbon, low in the Centre and lower Alentejo."""
    names = region_names()
    y = coords[:, 1]
    field = np.cos(2.0 * math.pi * (y + 80.0) / 270.0)
    idx = {n: i for i, n in enumerate(names)}
    for n in LISBON_HOT:
        field[idx[n]] += 1.2
    for n in CENTRAL_COLD:
        field[idx[n]] -= 1.2
    return field


def simulate_growth(dgp: CellDGP, w, coords: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``(p, q)`` for one cell from its planted process."""
    n = w.n
    q = dgp.q_mean + dgp.q_sd * rng.standard_normal(n)
    if dgp.pattern:
        q = q + dgp.pattern * services_pattern(coords)
    eps = dgp.noise_sd * rng.standard_normal(n)
    W = w.dense()
    A = np.eye(n) - dgp.spatial * W
    if dgp.model == "LAG":
        p = np.linalg.solve(A, dgp.alpha + dgp.gamma * q + eps)
    elif dgp.model == "ERROR":
        p = dgp.alpha + dgp.gamma * q + np.linalg.solve(A, eps)
    else:
        p = dgp.alpha + dgp.gamma * q + eps
    return p, q


def generate(seed: int = DEFAULT_SEED):
    """Simulate the panel.  Returns ``(rows, coords, growth)``.

    ``rows`` are ``(region, sector, year, output, employment)`` tuples and
    ``growth`` maps ``(sector, period)`` to the planted ``(p, q)``.
    """
    names = region_names()
    coords = planar_coords()
    w = distance_band(coords, FIXTURE_THRESHOLD_KM, ordering=names)
    root = np.random.SeedSequence(seed)
    cell_seeds = root.spawn(len(DGPS) + 1)
    growth = {}
    for dgp, ss in zip(DGPS, cell_seeds):
        growth[(dgp.sector, dgp.period)] = simulate_growth(dgp, w, coords, np.random.default_rng(ss))

    rng = np.random.default_rng(cell_seeds[-1])
    sectors = sorted({d.sector for d in DGPS}, key=[d.sector for d in DGPS].index)
    years = range(PERIODS[0][0], PERIODS[-1][1] + 1)
    rows = []
    for i, region in enumerate(names):
        for sector in sectors:
            log_y = math.log(rng.uniform(200.0, 5000.0))
            log_l = math.log(rng.uniform(5.0, 150.0))
            levels = {}
            for (start, end) in PERIODS:
                p, q = growth[(sector, (start, end))]
                if start != PERIODS[0][0]:
                    # one-year bridge into the new period
                    log_y += 0.5 * q[i] + 0.01 * rng.standard_normal()
                    log_l += 0.5 * (q[i] - p[i])
                for t in range(start, end + 1):
                    k = t - start
                    wobble = 0.0 if t in (start, end) else 0.004 * rng.standard_normal()
                    levels[t] = (log_y + q[i] * k + wobble, log_l + (q[i] - p[i]) * k)
                log_y, log_l = log_y + q[i] * (end - start), log_l + (q[i] - p[i]) * (end - start)
            for t in years:
                ly, ll = levels[t]
                rows.append((region, sector, t, math.exp(ly), math.exp(ll)))
    return rows, coords, growth


def write_fixture(out_dir: str | Path, seed: int = DEFAULT_SEED) -> dict[str, Path]:
    """Write ``panel.csv``, ``coords.csv`` and ``manifest.json`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows, coords, _ = generate(seed)
    panel_path = out / "panel.csv"
    with open(panel_path, "w", encoding="utf-8", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["region", "sector", "year", "output", "employment"])
        for region, sector, year, y, l in rows:
            wr.writerow([region, sector, year, repr(float(y)), repr(float(l))])
    coords_path = out / "coords.csv"
    with open(coords_path, "w", encoding="utf-8", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["region", "x", "y", "metric"])
        for name, (x, y) in zip(region_names(), coords):
            wr.writerow([name, repr(float(x)), repr(float(y)), "planar_km"])
    manifest = {
        "seed": seed,
        "threshold_km": FIXTURE_THRESHOLD_KM,
        "periods": [list(p) for p in PERIODS],
        "cells": [{**asdict(d), "period": list(d.period)} for d in DGPS],
        "hot_regions": list(LISBON_HOT),
        "cold_regions": list(CENTRAL_COLD),
        "notes": [
            "Total rows are simulated directly and are not the sum of the three sectors",
            "growth rates are log end-point rates; interior years carry small output noise",
        ],
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return {"panel": panel_path, "coords": coords_path, "manifest": manifest_path}
