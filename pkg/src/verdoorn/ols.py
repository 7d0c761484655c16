"""OLS estimation of the Verdoorn equation with its diagnostic battery.

The error variance used by the diagnostics is the ML one, ``e'e / n``;
coefficient standard errors use ``e'e / (n - k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
from scipy import linalg

from .errors import DegenerateError, DiagnosticDegeneracyError, InsufficientDataError, SingularDesignError
from .moran import MoranResult, permutation_test
from .stats import chi2_sf, t_sf_two_sided
from .weights import SpatialWeights

LN_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class TestStat:
    __test__ = False  # keep pytest from collecting it

    stat: float
    df: int
    p: float

    @classmethod
    def chi2(cls, stat: float, df: int) -> "TestStat":
        return cls(float(stat), int(df), chi2_sf(float(stat), df))

    def to_dict(self) -> dict:
        return {"stat": self.stat, "df": self.df, "p": self.p}


@dataclass(frozen=True)
class OlsFit:
    beta: np.ndarray
    resid: np.ndarray
    fitted: np.ndarray
    sigma2: float
    se: np.ndarray
    t_stats: np.ndarray
    p_values: np.ndarray
    r2: float
    r2_adj: float
    loglik: float
    n: int
    k: int


def _qr(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n, k = X.shape
    if n <= k:
        raise InsufficientDataError(f"need more observations ({n}) than regressors ({k})")
    q, r = linalg.qr(X, mode="economic")
    diag = np.abs(np.diag(r))
    if diag.min() <= max(n, k) * np.finfo(float).eps * diag.max():
        raise SingularDesignError("design matrix is rank deficient")
    return q, r


def _design(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return X[:, None] if X.ndim == 1 else X


def ols(y, X) -> OlsFit:
    """Least squares via a QR decomposition with classical inference."""
    y = np.asarray(y, dtype=float).ravel()
    X = _design(X)
    n, k = X.shape
    q, r = _qr(X)
    beta = linalg.solve_triangular(r, q.T @ y)
    fitted = X @ beta
    e = y - fitted
    ee = float(e @ e)
    rinv = linalg.solve_triangular(r, np.eye(k))
    xtx_inv = rinv @ rinv.T
    se = np.sqrt(ee / (n - k) * np.diag(xtx_inv))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(se > 0, beta / se, np.copysign(np.inf, beta))
    p = np.array([t_sf_two_sided(ti, n - k) for ti in t])
    tss = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ee / tss if tss > 0 else 1.0
    r2_adj = 1.0 - (1.0 - r2) * (n - 1) / (n - k)
    sigma2 = ee / n
    loglik = -0.5 * n * (LN_2PI + 1.0) - 0.5 * n * math.log(sigma2) if sigma2 > 0 else math.inf
    return OlsFit(beta, e, fitted, sigma2, se, t, p, r2, r2_adj, loglik, n, k)


def _residual_moments(e) -> tuple[np.ndarray, float]:
    e = np.asarray(e, dtype=float).ravel()
    d = e - e.mean()
    m2 = float(d @ d) / e.size
    if not m2 > 0:
        raise DegenerateError("residuals have zero variance")
    return d, m2


def jarque_bera(e) -> TestStat:
    """Normality of residuals from sample skewness and kurtosis (chi2, 2 df)."""
    e = np.asarray(e, dtype=float).ravel()
    n = e.size
    if n < 4:
        raise InsufficientDataError("Jarque-Bera needs at least four residuals")
    d, m2 = _residual_moments(e)
    s = float(np.mean(d**3)) / m2**1.5
    kurt = float(np.mean(d**4)) / m2**2
    return TestStat.chi2(n / 6.0 * (s * s + (kurt - 3.0) ** 2 / 4.0), 2)


def _explained_ss(g: np.ndarray, X: np.ndarray) -> tuple[float, float]:
    q, _ = _qr(X)
    fitted = q @ (q.T @ g)
    ess = float(((fitted - g.mean()) ** 2).sum())
    tss = float(((g - g.mean()) ** 2).sum())
    return ess, tss


def breusch_pagan(e, X) -> TestStat:
    """Half the explained sum of squares of ``e**2 / sigma2 - 1`` on ``X``."""
    e = np.asarray(e, dtype=float).ravel()
    X = _design(X)
    sigma2 = float(e @ e) / e.size
    if not sigma2 > 0:
        raise DegenerateError("residuals are identically zero")
    ess, _ = _explained_ss(e * e / sigma2 - 1.0, X)
    return TestStat.chi2(ess / 2.0, X.shape[1] - 1)


def koenker_bassett(e, X) -> TestStat:
    """Studentized Breusch-Pagan: ``n * R^2`` of ``e**2`` on ``X``."""
    e = np.asarray(e, dtype=float).ravel()
    X = _design(X)
    e2 = e * e
    ess, tss = _explained_ss(e2, X)
    if not tss > 0:
        raise DegenerateError("squared residuals have zero variance")
    return TestStat.chi2(e.size * ess / tss, X.shape[1] - 1)


def residual_moran(e, w: SpatialWeights, X=None, n_perm: int = 999, seed: int | None = 0) -> MoranResult:
    """Global Moran's I of OLS residuals with permutation inference."""
    return permutation_test(e, w, n_perm=n_perm, seed=seed)


LM_NAMES = ("lm_lag", "lm_err", "rlm_lag", "rlm_err")


@dataclass(frozen=True)
class LMTests:
    lm_lag: TestStat
    lm_err: TestStat
    rlm_lag: TestStat | None
    rlm_err: TestStat | None
    quantities: dict = field(default_factory=dict, compare=False)

    @property
    def degenerate(self) -> bool:
        return self.rlm_lag is None or self.rlm_err is None

    def to_dict(self) -> dict:
        return {
            name: (None if t is None else t.to_dict())
            for name, t in (("lm_lag", self.lm_lag), ("lm_err", self.lm_err),
                            ("rlm_lag", self.rlm_lag), ("rlm_err", self.rlm_err))
        }


def trace_terms(w: SpatialWeights) -> float:
    """``tr(W'W + WW)``."""
    W = w.standardized
    return float(W.multiply(W).sum() + W.multiply(W.T).sum())


def lm_tests(y, X, w: SpatialWeights, fit: OlsFit | None = None) -> LMTests:
    """Plain and robust Lagrange multiplier tests for lag and error dependence.

    Raises :class:`DiagnosticDegeneracyError` when ``D <= T``; its
    ``quantities`` carry the plain statistics, which stay valid.
    """
    y = np.asarray(y, dtype=float).ravel()
    X = _design(X)
    fit = fit or ols(y, X)
    e, n = fit.resid, fit.n
    s2 = float(e @ e) / n
    if not s2 > 0:
        raise DegenerateError("OLS residuals are identically zero")
    W = w.standardized
    T = trace_terms(w)
    if not T > 0:
        raise DegenerateError("weights have no neighbour pairs")
    d_lam = float(e @ (W @ e)) / s2
    d_rho = float(e @ (W @ y)) / s2
    wxb = W @ (X @ fit.beta)
    q, _ = _qr(X)
    m_wxb = wxb - q @ (q.T @ wxb)
    # D - T is kept as its own quadratic form; subtracting T from D would cancel digits
    excess = float(m_wxb @ m_wxb) / s2
    D = excess + T
    lm_err = TestStat.chi2(d_lam**2 / T, 1)
    lm_lag = TestStat.chi2(d_rho**2 / D, 1)
    quantities = {"d_lambda": d_lam, "d_rho": d_rho, "D": D, "T": T, "sigma2": s2}
    if excess <= 1e-12 * T:
        raise DiagnosticDegeneracyError(
            "robust LM denominators are non-positive (D <= T)",
            {**quantities, "lm_lag": lm_lag, "lm_err": lm_err},
        )
    rlm_lag = TestStat.chi2((d_rho - d_lam) ** 2 / excess, 1)
    rlm_err = TestStat.chi2((d_lam - T / D * d_rho) ** 2 / (T * excess / D), 1)
    return LMTests(lm_lag, lm_err, rlm_lag, rlm_err, quantities)


@dataclass(frozen=True)
class OlsReport:
    alpha_hat: float
    gamma_hat: float
    t_stats: tuple[float, float]
    p_values: tuple[float, float]
    sigma2: float
    r2: float
    r2_adj: float
    loglik: float
    jb: TestStat | None
    bp: TestStat | None
    kb: TestStat | None
    residual_moran: MoranResult | None
    lm: LMTests | None
    n_obs: int
    sector: str | None = None
    period: tuple[int, int] | None = None
    notes: tuple[str, ...] = ()

    @property
    def lm_lag(self) -> TestStat | None:
        return None if self.lm is None else self.lm.lm_lag

    @property
    def lm_err(self) -> TestStat | None:
        return None if self.lm is None else self.lm.lm_err

    @property
    def rlm_lag(self) -> TestStat | None:
        return None if self.lm is None else self.lm.rlm_lag

    @property
    def rlm_err(self) -> TestStat | None:
        return None if self.lm is None else self.lm.rlm_err

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_obs": self.n_obs,
            "constant": {"estimate": self.alpha_hat, "t": self.t_stats[0], "p": self.p_values[0]},
            "coefficient": {"estimate": self.gamma_hat, "t": self.t_stats[1], "p": self.p_values[1]},
            "sigma2": self.sigma2,
            "r2": self.r2,
            "r2_adj": self.r2_adj,
            "loglik": self.loglik,
            "jb": _opt(self.jb),
            "bp": _opt(self.bp),
            "kb": _opt(self.kb),
            "residual_moran": _opt(self.residual_moran),
            **(self.lm.to_dict() if self.lm is not None else dict.fromkeys(LM_NAMES)),
            "notes": list(self.notes),
        }


def _opt(obj):
    return None if obj is None else obj.to_dict()


def verdoorn_design(q) -> np.ndarray:
    q = np.asarray(q, dtype=float).ravel()
    return np.column_stack([np.ones_like(q), q])


def estimate_verdoorn_ols(gv, w: SpatialWeights, n_perm: int = 999, seed: int | None = 0) -> OlsReport:
    """Regress productivity growth on output growth and run every diagnostic."""
    if tuple(gv.regions) != tuple(w.ordering):
        raise ValueError("growth vector and weights use different region orderings")
    y = gv.p
    X = verdoorn_design(gv.q)
    fit = ols(y, X)
    notes: list[str] = []
    tss = float(((y - y.mean()) ** 2).sum())
    exact = fit.sigma2 * fit.n <= 1e-24 * tss

    def attempt(name, fn, *args, **kwargs):
        if exact:
            notes.append(f"{name} skipped: exact fit")
            return None
        try:
            return fn(*args, **kwargs)
        except DegenerateError as exc:
            notes.append(f"{name} unavailable: {exc}")
            return None

    lm = None
    if not exact:
        try:
            lm = lm_tests(y, X, w, fit)
        except DiagnosticDegeneracyError as exc:
            qd = exc.quantities
            lm = LMTests(qd["lm_lag"], qd["lm_err"], None, None,
                         {k: v for k, v in qd.items() if k not in ("lm_lag", "lm_err")})
            notes.append(f"robust LM tests unavailable: {exc}")
        except DegenerateError as exc:
            notes.append(f"LM tests unavailable: {exc}")
    else:
        notes.append("LM tests skipped: exact fit")
    return OlsReport(
        alpha_hat=float(fit.beta[0]),
        gamma_hat=float(fit.beta[1]),
        t_stats=(float(fit.t_stats[0]), float(fit.t_stats[1])),
        p_values=(float(fit.p_values[0]), float(fit.p_values[1])),
        sigma2=fit.sigma2,
        r2=fit.r2,
        r2_adj=fit.r2_adj,
        loglik=fit.loglik,
        jb=attempt("Jarque-Bera", jarque_bera, fit.resid),
        bp=attempt("Breusch-Pagan", breusch_pagan, fit.resid, X),
        kb=attempt("Koenker-Bassett", koenker_bassett, fit.resid, X),
        residual_moran=attempt("residual Moran", residual_moran, fit.resid, w, X, n_perm=n_perm, seed=seed),
        lm=lm,
        n_obs=fit.n,
        sector=gv.sector,
        period=tuple(gv.period),
        notes=tuple(notes),
    )


def with_lm(report: OlsReport, lm: LMTests) -> OlsReport:
    return replace(report, lm=lm)
