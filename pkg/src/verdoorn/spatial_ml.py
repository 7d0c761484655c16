"""Maximum-likelihood spatial lag and spatial error models.

Both likelihoods are concentrated on the single spatial parameter and the
Jacobian ``ln|I - cW|`` is evaluated from the eigenvalues of ``W`` as
``sum(log(1 - c * omega))``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import linalg

from .errors import DegenerateError, EstimationError, ParameterError
from .ols import LN_2PI, TestStat, _design, _qr, breusch_pagan, ols
from .optimize import golden_section_max
from .stats import normal_sf_two_sided
from .weights import SpatialWeights

BOUND_DELTA = 1e-6
BOUNDARY_TOL = 1e-4
KINDS = ("LAG", "ERROR")


def weights_spectrum(w: SpatialWeights) -> np.ndarray:
    """Sorted real eigenvalues of the row-standardized matrix.

    For a symmetric binary adjacency ``B`` with degrees ``D`` the standardized
    matrix is similar to ``D^-1/2 B D^-1/2``; islands contribute zeros.
    """
    n = w.n
    keep = np.flatnonzero(w.degrees > 0)
    if keep.size == 0:
        raise DegenerateError("every region is an island; the weights are empty")
    if w.is_symmetric_binary():
        b = w.binary[keep][:, keep].toarray()
        d = 1.0 / np.sqrt(w.degrees[keep].astype(float))
        sym = b * d[:, None] * d[None, :]
        vals = linalg.eigvalsh(sym)
    else:
        full = linalg.eigvals(w.dense()[np.ix_(keep, keep)])
        if np.max(np.abs(full.imag)) > 1e-8:
            raise DegenerateError("weights have a complex spectrum")
        vals = full.real
    return np.sort(np.concatenate([vals, np.zeros(n - keep.size)]))


def eigen_bounds(w: SpatialWeights) -> tuple[float, float, np.ndarray]:
    """``(omega_min, omega_max, spectrum)``; the spectrum is cached on ``w``."""
    s = w.spectrum
    return float(s[0]), float(s[-1]), s


def coef_bounds(w: SpatialWeights) -> tuple[float, float]:
    """Open interval ``(1/omega_min, 1/omega_max)`` for the spatial coefficient."""
    lo, hi, _ = eigen_bounds(w)
    if not (lo < 0 < hi):
        raise DegenerateError("spectrum does not straddle zero")
    return 1.0 / lo, 1.0 / hi


def log_jacobian(c: float, spectrum: np.ndarray) -> float:
    return float(np.sum(np.log1p(-c * spectrum)))


class _Profile:
    kind: str

    def __init__(self, y, X, w: SpatialWeights):
        self.y = np.asarray(y, dtype=float).ravel()
        self.X = _design(X)
        if self.y.size != w.n:
            raise ParameterError("y and weights disagree on the number of regions")
        self.w = w
        self.n = self.y.size
        self.spectrum = w.spectrum
        self.bounds = coef_bounds(w)
        self.const = -0.5 * self.n * (LN_2PI + 1.0)
        self.Wy = w.lag(self.y)

    def check(self, c: float) -> None:
        lo, hi = self.bounds
        if not lo < c < hi:
            raise ParameterError(f"coefficient {c} outside the open interval ({lo}, {hi})")

    def loglik(self, c: float) -> float:
        s2 = self.sigma2(c)
        if not s2 > 0:
            return -math.inf
        return self.const - 0.5 * self.n * math.log(s2) + log_jacobian(c, self.spectrum)


class LagProfile(_Profile):
    """Concentrated likelihood of ``y = rho W y + X beta + eps``."""

    kind = "LAG"

    def __init__(self, y, X, w):
        super().__init__(y, X, w)
        q, r = _qr(self.X)
        self._q, self._r = q, r
        self.b0 = linalg.solve_triangular(r, q.T @ self.y)
        self.bL = linalg.solve_triangular(r, q.T @ self.Wy)
        self.e0 = self.y - self.X @ self.b0
        self.eL = self.Wy - self.X @ self.bL

    def sigma2(self, c: float) -> float:
        u = self.e0 - c * self.eL
        return float(u @ u) / self.n

    def beta(self, c: float) -> np.ndarray:
        return self.b0 - c * self.bL

    def residuals(self, c: float) -> np.ndarray:
        return self.y - c * self.Wy - self.X @ self.beta(c)


class ErrorProfile(_Profile):
    """Concentrated likelihood of ``y = X beta + u``, ``u = lambda W u + xi``."""

    kind = "ERROR"

    def __init__(self, y, X, w):
        super().__init__(y, X, w)
        self.WX = w.standardized @ self.X
        _qr(self.X)

    def _filtered(self, c: float):
        return self.y - c * self.Wy, self.X - c * self.WX

    def beta(self, c: float) -> np.ndarray:
        ys, xs = self._filtered(c)
        q, r = _qr(xs)
        return linalg.solve_triangular(r, q.T @ ys)

    def residuals(self, c: float) -> np.ndarray:
        ys, xs = self._filtered(c)
        return ys - xs @ self.beta(c)

    def sigma2(self, c: float) -> float:
        e = self.residuals(c)
        return float(e @ e) / self.n


def _profile(kind: str, y, X, w) -> _Profile:
    kind = kind.upper()
    if kind == "LAG":
        return LagProfile(y, X, w)
    if kind == "ERROR":
        return ErrorProfile(y, X, w)
    raise ParameterError(f"unknown model kind {kind!r}")


@dataclass(frozen=True)
class SpatialFit:
    kind: str
    spatial_coef: float
    spatial_z: float
    spatial_p: float
    beta: np.ndarray
    beta_z: np.ndarray
    beta_p: np.ndarray
    sigma2: float
    loglik: float
    loglik_ols: float
    pseudo_r2: float
    bp_spatial: TestStat | None
    rho_bounds: tuple[float, float]
    n_obs: int
    residuals: np.ndarray = field(repr=False)
    warnings: tuple[str, ...] = ()
    decision: Any = field(default=None, compare=False, repr=False)

    def to_dict(self) -> dict:
        names = ("constant", "coefficient")
        out = {
            "kind": self.kind,
            "n_obs": self.n_obs,
            "spatial_coef": {"estimate": self.spatial_coef, "z": self.spatial_z, "p": self.spatial_p},
        }
        for i, b in enumerate(self.beta):
            name = names[i] if i < len(names) else f"beta_{i}"
            out[name] = {"estimate": float(b), "z": float(self.beta_z[i]), "p": float(self.beta_p[i])}
        out.update({
            "sigma2": self.sigma2,
            "loglik": self.loglik,
            "loglik_ols": self.loglik_ols,
            "pseudo_r2": self.pseudo_r2,
            "pseudo_r2_definition": "squared Pearson correlation of predicted and observed y",
            "bp": None if self.bp_spatial is None else self.bp_spatial.to_dict(),
            "bounds": list(self.rho_bounds),
            "z_statistics": "asymptotic",
            "warnings": list(self.warnings),
        })
        return out


def _maximise(prof: _Profile):
    lo, hi = prof.bounds
    res = golden_section_max(prof.loglik, lo + BOUND_DELTA, hi - BOUND_DELTA)
    notes = []
    if min(res.x - lo, hi - res.x) < BOUNDARY_TOL:
        notes.append(f"estimate {res.x:.6g} lies at the edge of ({lo:.6g}, {hi:.6g})")
        warnings.warn(notes[-1], stacklevel=3)
    if not math.isfinite(res.fx):
        raise EstimationError("likelihood maximum is not finite", res.trace)
    return res.x, res.fx, notes


def _pearson_r2(a: np.ndarray, b: np.ndarray) -> float:
    a = a - a.mean()
    b = b - b.mean()
    den = float((a @ a) * (b @ b))
    return float((a @ b) ** 2 / den) if den > 0 else 0.0


def _zs(coefs: np.ndarray, cov: np.ndarray):
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, coefs / se, np.nan)
    p = np.array([normal_sf_two_sided(v) if math.isfinite(v) else float("nan") for v in z])
    return z, p


def _bp(resid, X, notes) -> TestStat | None:
    try:
        return breusch_pagan(resid, X)
    except DegenerateError as exc:
        notes.append(f"Breusch-Pagan unavailable: {exc}")
        return None


def fit_lag(y, X, w: SpatialWeights) -> SpatialFit:
    """ML fit of the spatial lag model."""
    prof = LagProfile(y, X, w)
    rho, ll, notes = _maximise(prof)
    n, k = prof.X.shape
    beta = prof.beta(rho)
    resid = prof.residuals(rho)
    s2 = prof.sigma2(rho)

    Wd = w.dense()
    A = np.eye(n) - rho * Wd
    WA = linalg.solve(A.T, Wd.T).T  # W (I - rho W)^-1
    xb = prof.X @ beta
    wxb = WA @ xb
    info = np.zeros((k + 2, k + 2))
    info[:k, :k] = prof.X.T @ prof.X / s2
    info[:k, k] = info[k, :k] = prof.X.T @ wxb / s2
    info[k, k] = np.trace(WA @ WA) + np.sum(WA * WA) + float(wxb @ wxb) / s2
    info[k, k + 1] = info[k + 1, k] = np.trace(WA) / s2
    info[k + 1, k + 1] = n / (2.0 * s2 * s2)
    cov = linalg.inv(info)
    z, p = _zs(np.append(beta, rho), cov[: k + 1, : k + 1])

    yhat = linalg.solve(A, xb)
    return SpatialFit(
        kind="LAG", spatial_coef=float(rho), spatial_z=float(z[k]), spatial_p=float(p[k]),
        beta=beta, beta_z=z[:k], beta_p=p[:k], sigma2=s2, loglik=ll,
        loglik_ols=prof.loglik(0.0), pseudo_r2=_pearson_r2(yhat, prof.y),
        bp_spatial=_bp(resid, prof.X, notes), rho_bounds=prof.bounds, n_obs=n,
        residuals=resid, warnings=tuple(notes),
    )


def fit_error(y, X, w: SpatialWeights) -> SpatialFit:
    """ML fit of the spatial error model."""
    prof = ErrorProfile(y, X, w)
    lam, ll, notes = _maximise(prof)
    n, k = prof.X.shape
    beta = prof.beta(lam)
    resid = prof.residuals(lam)
    s2 = prof.sigma2(lam)

    Wd = w.dense()
    B = np.eye(n) - lam * Wd
    WB = linalg.solve(B.T, Wd.T).T
    _, xs = prof._filtered(lam)
    cov_beta = s2 * linalg.inv(xs.T @ xs)
    tr = np.trace(WB)
    info = np.array([
        [np.trace(WB @ WB) + np.sum(WB * WB), tr / s2],
        [tr / s2, n / (2.0 * s2 * s2)],
    ])
    var_lam = linalg.inv(info)[0, 0]
    cov = np.zeros((k + 1, k + 1))
    cov[:k, :k] = cov_beta
    cov[k, k] = var_lam
    z, p = _zs(np.append(beta, lam), cov)

    return SpatialFit(
        kind="ERROR", spatial_coef=float(lam), spatial_z=float(z[k]), spatial_p=float(p[k]),
        beta=beta, beta_z=z[:k], beta_p=p[:k], sigma2=s2, loglik=ll,
        loglik_ols=prof.loglik(0.0), pseudo_r2=_pearson_r2(prof.X @ beta, prof.y),
        bp_spatial=_bp(resid, prof.X, notes), rho_bounds=prof.bounds, n_obs=n,
        residuals=resid, warnings=tuple(notes),
    )


def fit(kind: str, y, X, w: SpatialWeights) -> SpatialFit:
    kind = kind.upper()
    if kind == "LAG":
        return fit_lag(y, X, w)
    if kind == "ERROR":
        return fit_error(y, X, w)
    raise ParameterError(f"unknown model kind {kind!r}")


def likelihood_profile(kind: str, y, X, w: SpatialWeights, grid) -> list[tuple[float, float]]:
    """Concentrated log-likelihood evaluated at each grid point."""
    prof = _profile(kind, y, X, w)
    out = []
    for c in np.asarray(grid, dtype=float).ravel():
        prof.check(float(c))
        out.append((float(c), prof.loglik(float(c))))
    return out


def profile(kind: str, y, X, w: SpatialWeights) -> _Profile:
    """The concentrated-likelihood object behind a fit (for diagnostics)."""
    return _profile(kind, y, X, w)


def ols_loglik(y, X) -> float:
    return ols(y, X).loglik
