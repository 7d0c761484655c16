"""Straight-from-formula dense reference implementations used as test oracles."""

import mpmath
import numpy as np


def lm_dense(y, X, W, digits=40):
    """LM statistics from the textbook formulas, evaluated in ``digits``-digit arithmetic.

    Extended precision keeps the oracle trustworthy on instances where
    ``(WXb)'M(WXb)`` is small and double precision cancels digits.
    """
    with mpmath.workdps(digits):
        n = len(y)
        Wm, Xm, ym = mpmath.matrix(W.tolist()), mpmath.matrix(X.tolist()), mpmath.matrix(list(map(float, y)))
        XtX_inv = mpmath.inverse(Xm.T * Xm)
        beta = XtX_inv * (Xm.T * ym)
        e = ym - Xm * beta
        s2 = (e.T * e)[0] / n
        T = mpmath.fsum(Wm[i, j] * (Wm[i, j] + Wm[j, i]) for i in range(n) for j in range(n))
        wxb = Wm * (Xm * beta)
        m_wxb = wxb - Xm * (XtX_inv * (Xm.T * wxb))  # M = I - X (X'X)^-1 X'
        D_minus_T = (m_wxb.T * m_wxb)[0] / s2
        D = D_minus_T + T
        a = (e.T * (Wm * e))[0] / s2
        b = (e.T * (Wm * ym))[0] / s2
        out = {
            "lm_lag": b**2 / D,
            "lm_err": a**2 / T,
            "rlm_lag": (b - a) ** 2 / D_minus_T,
            "rlm_err": (a - T / D * b) ** 2 / (T * D_minus_T / D),
        }
        return {k: float(v) for k, v in out.items()}


def logdet_dense(c, W):
    sign, val = np.linalg.slogdet(np.eye(len(W)) - c * W)
    assert sign > 0
    return val


def random_lm_instance(rng, n):
    from conftest import random_weights

    w = random_weights(rng, n)
    k = int(rng.integers(1, 3))
    X = np.column_stack([np.ones(n), rng.standard_normal((n, k))])
    y = X @ rng.standard_normal(k + 1) + rng.standard_normal(n)
    return y, X, w
