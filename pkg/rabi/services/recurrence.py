"""Expansion coefficients of the displaced-basis ansatz.

The lower spin component obeys ``d[m+1] = T_m d[m] - R_{m-1} d[m-1]`` and the
upper one follows from ``c[m] (beta (k+m) - E) = (eps/2) d[m]``.
Sequences are stored as mantissas plus a per-index natural-log scale so
the dominant solution can be followed far beyond the float range.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from rabi.models import DerivedQuantities, ModelParams
from rabi.services.algebra import derive, unify
from rabi.utils.errors import DegenerateWindowError, PoleError

log = logging.getLogger(__name__)

RESCALE_ABOVE = 1e250
RESCALE_BY = 1e-200
_LOG_RESCALE = -math.log(RESCALE_BY)


@dataclass(frozen=True)
class CoefficientSequence:
    E: float
    d: np.ndarray
    c: np.ndarray
    log_scale: np.ndarray
    params: ModelParams
    truncated: bool = False
    method: str = "forward"

    @property
    def k(self) -> float:
        return self.params.k_value

    @property
    def m_max(self) -> int:
        return len(self.d) - 1

    def d_values(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self.d * np.exp(self.log_scale)

    def c_values(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self.c * np.exp(self.log_scale)

    def ln_abs_d(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.d)) + self.log_scale

    def ln_abs_c(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.c)) + self.log_scale


class RecurrenceKernel:
    """Per-parameter-set cache of the m-dependent recurrence factors."""

    def __init__(self, params: ModelParams, dq: DerivedQuantities | None = None, pole_guard: float = 1e-12) -> None:
        self.params = unify(params)
        self.dq = dq if dq is not None else derive(self.params)
        self.k = self.params.k_value
        self.half_eps = self.params.epsilon / 2.0
        self.quarter_eps_sq = self.half_eps * self.half_eps
        self.guard = pole_guard * self.params.omega
        self._baseline: list[float] = []
        self._diag: list[float] = []
        self._offdiag: list[float] = []
        self._ratio: list[float] = []

    def _grow(self, m: int) -> None:
        beta, k = self.dq.beta, self.k
        for j in range(len(self._baseline), m + 1):
            self._baseline.append(beta * (k + j))
            self._diag.append(beta * self.dq.cosh2r * (k + j))
            self._offdiag.append(beta * self.dq.sinh2r * math.sqrt((j + 1) * (j + 2 * k)))
            self._ratio.append(math.sqrt((j + 1) * (j + 2 * k) / ((j + 2) * (j + 2 * k + 1))))

    def baseline(self, m: int) -> float:
        self._grow(m)
        return self._baseline[m]

    def check_pole(self, m: int, E: float) -> float:
        gap = self.baseline(m) - E
        if self.half_eps != 0.0 and abs(gap) < self.guard:
            raise PoleError(f"E={E!r} lies on baseline m={m} ({self._baseline[m]!r})", m, self._baseline[m])
        return gap

    def t(self, m: int, E: float) -> float:
        gap = self.check_pole(m, E)
        pole = self.quarter_eps_sq / gap if self.half_eps != 0.0 else 0.0
        return 2.0 * (self._diag[m] - pole - E) / self._offdiag[m]

    def r(self, m: int) -> float:
        self._grow(m)
        return self._ratio[m]

    def c_from_d(self, m: int, E: float, d: float) -> float:
        if self.half_eps == 0.0:
            return 0.0
        return self.half_eps * d / self.check_pole(m, E)


def t_coeff(m: int, E: float, params: ModelParams, dq: DerivedQuantities | None = None, pole_guard: float = 1e-12) -> float:
    return RecurrenceKernel(params, dq, pole_guard).t(m, E)


def r_coeff(m: int, k) -> float:
    k = float(k)
    return math.sqrt((m + 1) * (m + 2 * k) / ((m + 2) * (m + 2 * k + 1)))


def forward_d(kernel: RecurrenceKernel, E: float, m_max: int) -> tuple[list[float], list[float], bool]:
    """Forward recursion from d[0] = 1; returns mantissas, log scales, truncation flag."""
    d = [1.0]
    scale = [0.0]
    if m_max < 1:
        return d, scale, False

    s = 0.0
    prev, cur = 0.0, 1.0
    for m in range(m_max):
        nxt = kernel.t(m, E) * cur
        if m > 0:
            nxt -= kernel.r(m - 1) * prev
        if not math.isfinite(nxt):
            log.warning("forward recurrence lost finiteness at m=%s for E=%r", m + 1, E)
            return d, scale, True
        if abs(nxt) > RESCALE_ABOVE:
            nxt *= RESCALE_BY
            cur *= RESCALE_BY
            s += _LOG_RESCALE
        d.append(nxt)
        scale.append(s)
        prev, cur = cur, nxt
    return d, scale, False


def _with_c(kernel: RecurrenceKernel, E: float, d: list[float], scale: list[float], truncated: bool, method: str) -> CoefficientSequence:
    c = [kernel.c_from_d(m, E, dm) for m, dm in enumerate(d)]
    return CoefficientSequence(
        E=E,
        d=np.asarray(d, dtype=float),
        c=np.asarray(c, dtype=float),
        log_scale=np.asarray(scale, dtype=float),
        params=kernel.params,
        truncated=truncated,
        method=method,
    )


def run_recurrence(E: float, params: ModelParams, M_max: int, pole_guard: float = 1e-12) -> CoefficientSequence:
    kernel = RecurrenceKernel(params, pole_guard=pole_guard)
    d, scale, truncated = forward_d(kernel, E, M_max)
    return _with_c(kernel, E, d, scale, truncated, "forward")


def minimal_solution(E: float, params: ModelParams, m_max: int, pole_guard: float = 1e-12, extra: int | None = None) -> CoefficientSequence:
    """Decaying solution d^(0) by backward recursion, normalized to d[0] = 1."""
    kernel = RecurrenceKernel(params, pole_guard=pole_guard)
    if extra is None:
        extra = min(20000, max(50, math.ceil(40.0 / kernel.dq.gamma_d)))
    top = m_max + extra

    mantissa = [0.0] * (top + 1)
    scale = [0.0] * (top + 1)
    s = 0.0
    nxt, cur = 0.0, 1.0
    mantissa[top] = cur
    for m in range(top, 0, -1):
        prev = (kernel.t(m, E) * cur - nxt) / kernel.r(m - 1)
        if abs(prev) > RESCALE_ABOVE:
            prev *= RESCALE_BY
            cur *= RESCALE_BY
            s += _LOG_RESCALE
        mantissa[m - 1] = prev
        scale[m - 1] = s
        nxt, cur = cur, prev

    head = mantissa[0]
    if head == 0.0:
        raise DegenerateWindowError(f"minimal solution vanishes at m=0 for E={E!r}")
    d = [mantissa[m] / head for m in range(m_max + 1)]
    # scales decrease along m once normalized to the m = 0 entry
    rel = [scale[m] - scale[0] for m in range(m_max + 1)]
    return _with_c(kernel, E, d, rel, False, "minimal")


def fit_decay_rate(seq: CoefficientSequence, m_lo: int, m_hi: int, log_correction: bool = False) -> float:
    """Negated least-squares slope of ln|d_m| over ``[m_lo, m_hi]``.

    With ``log_correction`` the model is ``a - gamma m + p ln m + q / m``,
    which absorbs the algebraic prefactor of the asymptotic solutions.
    """
    if m_hi - m_lo < 10:
        raise DegenerateWindowError(f"window [{m_lo}, {m_hi}] shorter than 10")
    if m_lo < 0 or m_hi > seq.m_max:
        raise DegenerateWindowError(f"window [{m_lo}, {m_hi}] outside 0..{seq.m_max}")
    if log_correction and m_lo < 1:
        raise DegenerateWindowError("log-corrected fit needs m_lo >= 1")

    window = seq.d[m_lo : m_hi + 1]
    if np.any(window == 0.0):
        raise DegenerateWindowError(f"d_m vanishes inside [{m_lo}, {m_hi}]")

    m = np.arange(m_lo, m_hi + 1, dtype=float)
    y = seq.ln_abs_d()[m_lo : m_hi + 1]
    columns = [np.ones_like(m), m]
    if log_correction:
        columns.extend([np.log(m), 1.0 / m])
    coef, *_ = np.linalg.lstsq(np.column_stack(columns), y, rcond=None)
    return float(-coef[1])


def schrodinger_residuals(seq: CoefficientSequence, closed: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Residuals of the upper and lower Schrodinger rows in the displaced basis.

    With ``closed`` the state is finite: coefficients beyond ``m_max`` are
    zero and the rows ``0..m_max+1`` are checked; otherwise rows
    ``0..m_max-1`` (the last row needs d[m+1]).
    """
    p = seq.params
    dq = derive(p)
    k, E, half_eps = p.k_value, seq.E, p.epsilon / 2.0
    d = seq.d_values()
    c = seq.c_values()
    if closed:
        d = np.concatenate([d, [0.0, 0.0]])
        c = np.concatenate([c, [0.0, 0.0]])
        rows = seq.m_max + 2
    else:
        rows = seq.m_max

    m = np.arange(rows, dtype=float)
    baseline = dq.beta * (k + m)
    d_prev = np.concatenate([[0.0], d[: rows - 1]])
    d_next = d[1 : rows + 1]
    down = np.sqrt(m * (m + 2 * k - 1))
    up = np.sqrt((m + 1) * (m + 2 * k))

    upper = baseline * c[:rows] - half_eps * d[:rows] - E * c[:rows]
    lower = (
        -half_eps * c[:rows]
        + dq.beta * (dq.cosh2r * (k + m) * d[:rows] - 0.5 * dq.sinh2r * (down * d_prev + up * d_next))
        - E * d[:rows]
    )
    return upper, lower
