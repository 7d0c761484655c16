"""Distance-band spatial weights.

Binary adjacency links every pair of regions whose distance lies in
``(0, threshold_km]``; the standardized matrix divides each row by its
neighbour count.  Regions without neighbours (islands) keep an all-zero row.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import sparse

from .errors import DomainError, ParameterError

EARTH_RADIUS_KM = 6371.0
DENSE_LIMIT = 2000


def distance(a: Sequence[float], b: Sequence[float], metric: str = "planar_km", metric_b: str | None = None) -> float:
    """Distance in km between two points sharing ``metric``.

    ``planar_km`` is Euclidean; ``latlon_deg`` is the haversine great-circle
    distance on a sphere of radius 6371 km with points given as (lat, lon).
    """
    if metric_b is not None and metric_b != metric:
        raise DomainError(f"cannot mix metrics {metric} and {metric_b}")
    if metric == "planar_km":
        return math.hypot(b[0] - a[0], b[1] - a[1])
    if metric == "latlon_deg":
        lat1, lon1, lat2, lon2 = map(math.radians, (a[0], a[1], b[0], b[1]))
        h = math.sin((lat2 - lat1) / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2
        return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))
    raise DomainError(f"unknown metric {metric!r}")


def pairwise_distances(coords: np.ndarray, metric: str = "planar_km") -> np.ndarray:
    coords = np.asarray(coords, dtype=float)
    if metric == "planar_km":
        diff = coords[:, None, :] - coords[None, :, :]
        return np.hypot(diff[..., 0], diff[..., 1])
    if metric == "latlon_deg":
        lat = np.radians(coords[:, 0])
        lon = np.radians(coords[:, 1])
        h = (
            np.sin((lat[None, :] - lat[:, None]) / 2) ** 2
            + np.cos(lat)[:, None] * np.cos(lat)[None, :] * np.sin((lon[None, :] - lon[:, None]) / 2) ** 2
        )
        return 2 * EARTH_RADIUS_KM * np.arcsin(np.minimum(1.0, np.sqrt(h)))
    raise DomainError(f"unknown metric {metric!r}")


def row_standardize(binary: sparse.spmatrix) -> sparse.csr_matrix:
    """Divide each row by its sum; island rows stay zero."""
    b = sparse.csr_matrix(binary, dtype=float)
    sums = np.asarray(b.sum(axis=1)).ravel()
    scale = np.divide(1.0, sums, out=np.zeros_like(sums), where=sums > 0)
    out = sparse.diags(scale) @ b
    out = sparse.csr_matrix(out)
    out.sort_indices()
    return out


@dataclass(frozen=True, eq=False)
class SpatialWeights:
    ordering: tuple[str, ...]
    threshold_km: float
    binary: sparse.csr_matrix
    standardized: sparse.csr_matrix
    distances: sparse.csr_matrix | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.ordering)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self.binary.indptr)

    @cached_property
    def island_index(self) -> np.ndarray:
        return np.flatnonzero(self.degrees == 0)

    @property
    def islands(self) -> frozenset[str]:
        return frozenset(self.ordering[i] for i in self.island_index)

    @property
    def s0(self) -> float:
        return float(self.standardized.sum())

    def neighbors(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Column indices and standardized weights of row ``i``."""
        w = self.standardized
        lo, hi = w.indptr[i], w.indptr[i + 1]
        return w.indices[lo:hi], w.data[lo:hi]

    def dense(self) -> np.ndarray:
        if self.n > DENSE_LIMIT:
            raise ParameterError(f"dense conversion limited to n <= {DENSE_LIMIT}")
        return self.standardized.toarray()

    def is_symmetric_binary(self) -> bool:
        b = self.binary
        return (b != b.T).nnz == 0 and not b.diagonal().any()

    @cached_property
    def spectrum(self) -> np.ndarray:
        from .spatial_ml import weights_spectrum

        return weights_spectrum(self)

    @property
    def eigen_bounds(self) -> tuple[float, float]:
        s = self.spectrum
        return float(s[0]), float(s[-1])

    def lag(self, x: np.ndarray) -> np.ndarray:
        return self.standardized @ np.asarray(x, dtype=float)

    def save(self, path: str | Path) -> None:
        """Write ``n threshold`` then one ``i j w_ij`` line per nonzero."""
        w = self.standardized.tocoo()
        order = np.lexsort((w.col, w.row))
        lines = [f"{self.n} {self.threshold_km!r}"]
        lines += [f"{w.row[k]} {w.col[k]} {w.data[k]:.17g}" for k in order]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path, ordering: Sequence[str] | None = None) -> "SpatialWeights":
        lines = Path(path).read_text(encoding="utf-8").split("\n")
        head = lines[0].split()
        n, threshold = int(head[0]), float(head[1])
        rows, cols, vals = [], [], []
        for line in lines[1:]:
            if not line.strip():
                continue
            i, j, v = line.split()
            rows.append(int(i))
            cols.append(int(j))
            vals.append(float(v))
        std = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
        std.sort_indices()
        binary = sparse.csr_matrix((np.ones(len(vals)), (rows, cols)), shape=(n, n))
        binary.sort_indices()
        if ordering is None:
            ordering = [str(i) for i in range(n)]
        if len(ordering) != n:
            raise ParameterError("ordering length does not match weights file")
        return cls(tuple(ordering), threshold, binary, std)


def distance_band(
    coords: np.ndarray | dict,
    threshold_km: float,
    metric: str = "planar_km",
    ordering: Sequence[str] | None = None,
) -> SpatialWeights:
    """Binary neighbours within ``threshold_km`` (inclusive) plus their row-standardized form."""
    if isinstance(coords, dict):
        ordering = tuple(ordering or coords.keys())
        coords = np.array([coords[r] for r in ordering], dtype=float)
    coords = np.asarray(coords, dtype=float)
    n = coords.shape[0]
    if n < 2:
        raise ParameterError("distance band needs at least two regions")
    if not threshold_km > 0:
        raise ParameterError("threshold_km must be positive")
    ordering = tuple(ordering) if ordering is not None else tuple(str(i) for i in range(n))
    if len(ordering) != n:
        raise ParameterError("ordering length does not match coordinates")

    d = pairwise_distances(coords, metric)
    off = ~np.eye(n, dtype=bool)
    dup = np.argwhere((d == 0) & off)
    if len(dup):
        i, j = dup[0]
        warnings.warn(f"regions {ordering[i]} and {ordering[j]} share coordinates", stacklevel=2)
    # coincident distinct regions are neighbours; only the diagonal is excluded
    adj = (d <= threshold_km) & off
    binary = sparse.csr_matrix(adj.astype(float))
    binary.sort_indices()
    dist = sparse.csr_matrix(np.where(adj, d, 0.0))
    if len(dup):
        # explicit zeros would be dropped; keep the structure aligned with binary
        dist = sparse.csr_matrix((d[binary.nonzero()], binary.nonzero()), shape=(n, n))
    return SpatialWeights(ordering, float(threshold_km), binary, row_standardize(binary), dist)


def lattice_coords(rows: int, cols: int, spacing: float = 1.0) -> np.ndarray:
    """Planar coordinates of a regular grid, row-major."""
    yy, xx = np.mgrid[0:rows, 0:cols]
    return np.column_stack([xx.ravel() * spacing, yy.ravel() * spacing]).astype(float)
