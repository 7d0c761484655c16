"""Global Moran's I, the Moran scatterplot and permutation inference."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DegenerateError, ParameterError
from .weights import SpatialWeights

MIN_PERMUTATIONS = 99
# permuted statistics within this relative distance of the observed one count as ties
TIE_RTOL = 1e-10


def substream(seed: int | None, *key: int) -> np.random.Generator:
    """Independent generator for one unit of work, fixed by ``(seed, key)``."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def _centered(x) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    z = x - x.mean()
    ss = z @ z
    if not ss > 1e-30 * max(1.0, float(x @ x)):
        raise DegenerateError("values are constant; Moran's I is undefined")
    return z


def standardize(x) -> np.ndarray:
    """Zero mean, unit population variance."""
    z = _centered(x)
    return z / math.sqrt(z @ z / z.size)


def count_extreme(perm_dev: np.ndarray, obs_dev: float) -> int:
    """Number of permuted |deviations| at least as large as the observed one."""
    tol = TIE_RTOL * max(1.0, abs(obs_dev))
    return int(np.count_nonzero(np.abs(perm_dev) >= abs(obs_dev) - tol))


@dataclass(frozen=True)
class PermutationSummary:
    n_perm: int
    pseudo_p: float
    perm_mean: float
    perm_sd: float
    seed: int | None


@dataclass(frozen=True)
class MoranResult:
    I: float
    expected: float
    z_norm: float
    n: int
    perm: PermutationSummary | None = None
    samples: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def pseudo_p(self) -> float | None:
        return None if self.perm is None else self.perm.pseudo_p

    def to_dict(self) -> dict:
        out = {"I": self.I, "expected": self.expected, "z_norm": self.z_norm, "n": self.n}
        out["permutation"] = None if self.perm is None else asdict(self.perm)
        return out


def _check_n(x, w: SpatialWeights) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if x.size != w.n:
        raise ParameterError(f"x has {x.size} entries but weights have {w.n} regions")
    if x.size < 3:
        raise ParameterError("Moran's I needs at least three regions")
    if not np.all(np.isfinite(x)):
        raise ParameterError("x contains non-finite values")
    return x


def _normal_moments(w: SpatialWeights) -> tuple[float, float]:
    # mean and variance of I under the normality assumption (Cliff and Ord)
    n = w.n
    W = w.standardized
    s0 = W.sum()
    s1 = 0.5 * ((W + W.T).multiply(W + W.T)).sum()
    rs = np.asarray(W.sum(axis=1)).ravel()
    cs = np.asarray(W.sum(axis=0)).ravel()
    s2 = float(((rs + cs) ** 2).sum())
    ei = -1.0 / (n - 1)
    var = (n * n * s1 - n * s2 + 3 * s0 * s0) / ((n * n - 1) * s0 * s0) - ei * ei
    return ei, var


def _statistic(z: np.ndarray, w: SpatialWeights) -> float:
    return float(w.n / w.s0 * (z @ (w.standardized @ z)) / (z @ z))


def morans_i(x, w: SpatialWeights) -> MoranResult:
    """Global Moran's I with its normal-approximation deviate."""
    x = _check_n(x, w)
    if w.s0 == 0:
        raise DegenerateError("weights have no neighbour pairs")
    z = _centered(x)
    stat = _statistic(z, w)
    ei, var = _normal_moments(w)
    z_norm = (stat - ei) / math.sqrt(var) if var > 0 else float("nan")
    return MoranResult(stat, ei, z_norm, w.n)


def permutation_test(x, w: SpatialWeights, n_perm: int = 999, seed: int | None = 0, keep: bool = False) -> MoranResult:
    """Two-sided permutation inference for global Moran's I.

    Permutation ``k`` draws from its own generator ``substream(seed, k)`` so
    the result does not depend on how the permutations are scheduled.
    """
    if n_perm < MIN_PERMUTATIONS:
        raise ParameterError(f"n_perm must be at least {MIN_PERMUTATIONS}")
    base = morans_i(x, w)
    z = _centered(_check_n(x, w))
    n = z.size
    order = np.empty((n_perm, n), dtype=np.intp)
    for k in range(n_perm):
        order[k] = substream(seed, k).permutation(n)
    zp = z[order]
    lag = (w.standardized @ zp.T).T
    sims = n / w.s0 * np.einsum("ij,ij->i", zp, lag) / (z @ z)
    extreme = count_extreme(sims - base.expected, base.I - base.expected)
    perm = PermutationSummary(
        n_perm=n_perm,
        pseudo_p=(1 + extreme) / (1 + n_perm),
        perm_mean=float(sims.mean()),
        perm_sd=float(sims.std(ddof=1)),
        seed=seed,
    )
    return MoranResult(base.I, base.expected, base.z_norm, n, perm, sims if keep else None)


@dataclass(frozen=True)
class MoranScatter:
    regions: tuple[str, ...]
    z: np.ndarray
    lag: np.ndarray
    slope: float

    def rows(self):
        return zip(self.regions, self.z.tolist(), self.lag.tolist())


def moran_scatter(x, w: SpatialWeights) -> MoranScatter:
    """Standardized values against their spatial lags.

    Without islands the least-squares slope equals global Moran's I.
    """
    x = _check_n(x, w)
    z = standardize(x)
    lag = w.standardized @ z
    slope = float(z @ lag / (z @ z))
    return MoranScatter(w.ordering, z, lag, slope)
