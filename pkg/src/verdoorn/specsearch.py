"""Classical specification search: OLS, spatial lag or spatial error.

Plain LM tests decide whether any spatial structure is needed; when both
are significant the robust statistics break the tie.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .ols import LMTests, OlsReport, TestStat, estimate_verdoorn_ols, verdoorn_design
from .spatial_ml import SpatialFit, fit_error, fit_lag

CHOICES = ("OLS", "LAG", "ERROR")


@dataclass(frozen=True)
class SpecDecision:
    choice: str
    alpha: float
    branch: str
    evidence: dict
    narrative: tuple[str, ...] = field(default_factory=tuple)
    sector: str | None = None
    period: tuple[int, int] | None = None

    def to_dict(self) -> dict:
        return {
            "sector": self.sector,
            "period": list(self.period) if self.period else None,
            "choice": self.choice,
            "alpha": self.alpha,
            "branch": self.branch,
            "evidence": self.evidence,
            "narrative": list(self.narrative),
        }


def _fmt(t: TestStat) -> str:
    return f"{t.stat:.3f} (p={t.p:.4f})"


def decide(report: OlsReport | LMTests, alpha: float = 0.05) -> SpecDecision:
    lm = report.lm if isinstance(report, OlsReport) else report
    if lm is None:
        raise ValueError("report carries no LM statistics")
    sector = getattr(report, "sector", None)
    period = getattr(report, "period", None)
    evidence = lm.to_dict()
    trace = ["plain LM tests are applied first; robust tests only break a tie"]
    lag_sig = lm.lm_lag.p <= alpha
    err_sig = lm.lm_err.p <= alpha
    trace.append(f"LM_lag = {_fmt(lm.lm_lag)} {'significant' if lag_sig else 'not significant'} at {alpha}")
    trace.append(f"LM_err = {_fmt(lm.lm_err)} {'significant' if err_sig else 'not significant'} at {alpha}")

    if not lag_sig and not err_sig:
        choice, branch = "OLS", "neither"
        trace.append("no plain LM test is significant: keep OLS")
    elif lag_sig and not err_sig:
        choice, branch = "LAG", "lag-only"
        trace.append("only LM_lag is significant: spatial lag")
    elif err_sig and not lag_sig:
        choice, branch = "ERROR", "error-only"
        trace.append("only LM_err is significant: spatial error")
    elif lm.degenerate:
        branch = "both-plain-fallback"
        choice = "LAG" if lm.lm_lag.stat > lm.lm_err.stat else "ERROR"
        trace.append("warning: robust LM tests unavailable; comparing plain statistics instead")
        trace.append(f"larger plain statistic: {choice}")
    else:
        trace.append(f"both significant; robust LM_lag = {_fmt(lm.rlm_lag)}, robust LM_err = {_fmt(lm.rlm_err)}")
        if lm.rlm_lag.stat > lm.rlm_err.stat:
            choice, branch = "LAG", "both-robust"
        elif lm.rlm_err.stat > lm.rlm_lag.stat:
            choice, branch = "ERROR", "both-robust"
        else:
            choice, branch = "ERROR", "both-robust-tie"
            trace.append("robust statistics tie exactly: spatial error chosen by convention")
        if branch == "both-robust":
            trace.append(f"robust statistic is larger for {choice}")
    return SpecDecision(choice, alpha, branch, evidence, tuple(trace), sector, period)


def run_selected(decision: SpecDecision, gv, w, report: OlsReport | None = None,
                 n_perm: int = 999, seed: int | None = 0) -> OlsReport | SpatialFit:
    """Estimate the chosen specification.  OLS returns ``report`` itself."""
    if decision.choice == "OLS":
        return report if report is not None else estimate_verdoorn_ols(gv, w, n_perm=n_perm, seed=seed)
    X = verdoorn_design(gv.q)
    fitter = fit_lag if decision.choice == "LAG" else fit_error
    return replace(fitter(gv.p, X, w), decision=decision)
