from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence

import scipy.optimize

log = logging.getLogger(__name__)


def sign_brackets(xs: Sequence[float], fs: Sequence[float]) -> list[tuple[float, float, float, float]]:
    """Adjacent grid cells whose end values change sign (or touch zero on the left)."""
    brackets = []
    for x1, x2, f1, f2 in zip(xs[:-1], xs[1:], fs[:-1], fs[1:]):
        if not (math.isfinite(f1) and math.isfinite(f2)):
            continue
        if f1 == 0.0 or f1 * f2 < 0.0:
            brackets.append((x1, x2, f1, f2))
    return brackets


def bisect(
    func: Callable[[float], float],
    x1: float,
    x2: float,
    tol: float,
    f1: float | None = None,
    f2: float | None = None,
    max_iter: int = 200,
) -> float:
    """Refine a sign-change bracket with ``scipy.optimize.bisect`` to width ``tol``.

    Known end values short-circuit exact zeros on the grid.
    """
    if f1 == 0.0:
        return x1
    if f2 == 0.0:
        return x2
    root, result = scipy.optimize.bisect(func, x1, x2, xtol=tol, maxiter=max_iter, full_output=True, disp=False)
    if not result.converged:
        log.warning("bisection on [%r, %r] stopped after %s iterations: %s", x1, x2, result.iterations, result.flag)
    return float(root)
