"""Derivative-free maximisation of a smooth univariate function on an interval."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import EstimationError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class MaxResult:
    x: float
    fx: float
    evaluations: int
    trace: list[tuple[float, float]] = field(repr=False, default_factory=list)


def golden_section_max(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-9,
    grid: int = 64,
    max_iter: int = 500,
) -> MaxResult:
    """Maximise ``f`` on ``[lo, hi]``.

    A coarse grid locates the best cell, golden-section search narrows it,
    and successive parabolic steps polish the optimum until the step falls
    below ``tol``.
    """
    if not hi > lo:
        raise ValueError("empty search interval")
    trace: list[tuple[float, float]] = []

    def g(x: float) -> float:
        v = f(x)
        trace.append((x, v))
        return v if math.isfinite(v) else -math.inf

    xs = [lo + (hi - lo) * i / grid for i in range(grid + 1)]
    vals = [g(x) for x in xs]
    best = max(range(len(xs)), key=vals.__getitem__)
    if not math.isfinite(vals[best]):
        raise EstimationError("objective is not finite anywhere on the interval", trace)
    a = xs[max(best - 1, 0)]
    b = xs[min(best + 1, grid)]

    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = g(c), g(d)
    it = 0
    while b - a > max(1e-7, 10 * tol) and it < max_iter:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = g(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = g(d)
        it += 1

    # parabolic refinement within [a, b]
    x, fx = (c, fc) if fc >= fd else (d, fd)
    pts = sorted([(a, g(a)), (c, fc), (d, fd), (b, g(b))], key=lambda t: -t[1])[:3]
    for _ in range(100):
        (x1, f1), (x2, f2), (x3, f3) = sorted(pts)
        den = (x2 - x1) * (f2 - f3) - (x2 - x3) * (f2 - f1)
        if den == 0:
            break
        num = (x2 - x1) ** 2 * (f2 - f3) - (x2 - x3) ** 2 * (f2 - f1)
        xn = x2 - 0.5 * num / den
        if not (a <= xn <= b) or not math.isfinite(xn):
            break
        fn = g(xn)
        step = abs(xn - x)
        if fn > fx:
            x, fx = xn, fn
        pts = sorted(pts + [(xn, fn)], key=lambda t: -t[1])[:3]
        if step < tol:
            break
    for xe in (lo, hi):
        fe = g(xe)
        if fe > fx:
            x, fx = xe, fe
    return MaxResult(x, fx, len(trace), trace)
