"""Local Moran statistics and LISA cluster classification."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .moran import MIN_PERMUTATIONS, _check_n, count_extreme, standardize, substream
from .weights import SpatialWeights

LABELS = ("HH", "LL", "HL", "LH", "NS", "ISLAND")


def local_moran(x, w: SpatialWeights) -> np.ndarray:
    """``I_i = z_i * sum_j w_ij z_j`` with population-standardized ``z``."""
    z = standardize(_check_n(x, w))
    return z * (w.standardized @ z)


def lisa_permutation(x, w: SpatialWeights, n_perm: int = 999, seed: int | None = 0) -> np.ndarray:
    """Conditional-permutation pseudo p-values, one per region.

    Region ``i`` keeps its own value while its neighbours are redrawn without
    replacement from the other ``n - 1`` values.  The two-sided count is taken
    around the conditional mean ``-z_i**2 * w_i / (n - 1)``.  Islands get 1.0.
    """
    if n_perm < MIN_PERMUTATIONS:
        raise ParameterError(f"n_perm must be at least {MIN_PERMUTATIONS}")
    z = standardize(_check_n(x, w))
    n = z.size
    pvals = np.ones(n)
    for i in range(n):
        cols, wts = w.neighbors(i)
        k = cols.size
        if k == 0:
            continue
        others = np.delete(z, i)
        rng = substream(seed, i)
        keys = rng.random((n_perm, n - 1))
        picks = np.argpartition(keys, k - 1, axis=1)[:, :k] if k < n - 1 else np.argsort(keys, axis=1)
        sims = z[i] * (others[picks] @ wts)
        centre = -z[i] ** 2 * wts.sum() / (n - 1)
        observed = z[i] * (z[cols] @ wts)
        pvals[i] = (1 + count_extreme(sims - centre, observed - centre)) / (1 + n_perm)
    return pvals


def classify(z_i: float, lag_i: float, p_i: float, alpha: float = 0.05) -> str:
    """Quadrant label of a significant region; ``NS`` otherwise or on a zero axis."""
    if p_i > alpha or z_i == 0 or lag_i == 0:
        return "NS"
    if z_i > 0:
        return "HH" if lag_i > 0 else "HL"
    return "LH" if lag_i > 0 else "LL"


@dataclass(frozen=True)
class LisaResult:
    regions: tuple[str, ...]
    z: np.ndarray
    lag: np.ndarray
    local_i: np.ndarray
    pseudo_p: np.ndarray
    clusters: tuple[str, ...]
    alpha: float
    n_perm: int
    seed: int | None

    def counts(self) -> dict[str, int]:
        return {label: self.clusters.count(label) for label in LABELS}

    def rows(self):
        return zip(self.regions, self.z.tolist(), self.lag.tolist(), self.local_i.tolist(),
                   self.pseudo_p.tolist(), self.clusters)

    def cluster_map(self) -> dict[str, str]:
        return dict(zip(self.regions, self.clusters))

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "n_perm": self.n_perm,
            "seed": self.seed,
            "counts": self.counts(),
            "regions": [
                {"region": r, "z": zi, "lag": li, "I_local": ii, "pseudo_p": pi, "cluster": c}
                for r, zi, li, ii, pi, c in self.rows()
            ],
        }


def lisa(x, w: SpatialWeights, n_perm: int = 999, seed: int | None = 0, alpha: float = 0.05) -> LisaResult:
    """Local statistics, pseudo p-values and cluster labels in one pass."""
    z = standardize(_check_n(x, w))
    lag = w.standardized @ z
    local_i = z * lag
    pvals = lisa_permutation(x, w, n_perm, seed)
    islands = set(w.island_index.tolist())
    labels = tuple(
        "ISLAND" if i in islands else classify(z[i], lag[i], pvals[i], alpha) for i in range(w.n)
    )
    return LisaResult(w.ordering, z, lag, local_i, pvals, labels, alpha, n_perm, seed)
