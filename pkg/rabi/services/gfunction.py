"""Parity-resolved G-function, its roots, and the regular spectrum."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from rabi.config import Settings
from rabi.models import ModelParams, Parity
from rabi.services.algebra import derive, map_realization
from rabi.services.recurrence import RESCALE_ABOVE, RESCALE_BY, RecurrenceKernel
from rabi.utils.errors import PoleError
from rabi.utils.roots import bisect, sign_brackets
from rabi.utils.special import log_overlaps, log_pochhammer_ratio

log = logging.getLogger(__name__)

_LOG_RESCALE = -math.log(RESCALE_BY)
_MIN_TERMS = 20
_QUIET_TERMS = 5


class LevelSource(str, Enum):
    G_ROOT = "g-root"
    ORACLE = "oracle"


@dataclass(frozen=True)
class GEvaluation:
    E: float
    parity: Parity
    value: float
    terms_used: int
    truncation_estimate: float
    converged: bool = True


@dataclass(frozen=True)
class SpectrumLevel:
    E: float
    parity: Parity
    source: LevelSource
    residual: float


@dataclass(frozen=True)
class SpectrumResult:
    levels: list[SpectrumLevel]
    params: ModelParams
    baselines: list[float]
    shift: float = 0.0
    converged: bool = True
    notes: list[str] = field(default_factory=list)

    def energies(self, parity: Parity | None = None) -> list[float]:
        return [lvl.E for lvl in self.levels if parity is None or lvl.parity is parity]


def overlap_coeff(k, m: int, xi: float) -> float:
    """<k,0|k,m>_+ = (1 - xi^2)^k sqrt(Gamma(2k+m) / (m! Gamma(2k))) xi^m."""
    k = float(k)
    log_value = k * math.log1p(-xi * xi) + 0.5 * float(log_pochhammer_ratio(2.0 * k, m)) + m * math.log(xi)
    return math.exp(log_value)


class GFunction:
    def __init__(self, params: ModelParams, settings: Settings | None = None) -> None:
        self.settings = settings or Settings()
        self.kernel = RecurrenceKernel(params, pole_guard=self.settings.pole_guard)
        self.params = self.kernel.params
        self.dq = self.kernel.dq
        self.max_terms = self.settings.max_terms
        self.series_tol = self.settings.series_tol
        self._log_overlap = log_overlaps(self.params.k_value, self.dq.xi, self.max_terms).tolist()

    @property
    def pole_window(self) -> float:
        return 10.0 * self.settings.pole_guard * self.params.omega

    def baselines_between(self, E_lo: float, E_hi: float) -> list[float]:
        beta, k = self.dq.beta, self.params.k_value
        m = max(0, math.ceil(E_lo / beta - k))
        found = []
        while beta * (k + m) <= E_hi:
            found.append(self.kernel.baseline(m))
            m += 1
        return found

    def evaluate(self, E: float, parities: tuple[Parity, ...] = (Parity.EVEN, Parity.ODD)) -> dict[Parity, GEvaluation]:
        """Sum the G series for several parities from one recurrence pass."""
        kernel = self.kernel
        log_overlap = self._log_overlap
        tol = self.series_tol

        sums = {p: 0.0 for p in parities}
        peak = {p: 0.0 for p in parities}
        quiet = {p: 0 for p in parities}
        last = {p: 0.0 for p in parities}

        scale = 0.0
        prev, cur = 0.0, 1.0
        terms = 0
        converged = False
        for m in range(self.max_terms + 1):
            if m > 0:
                nxt = kernel.t(m - 1, E) * cur
                if m > 1:
                    nxt -= kernel.r(m - 2) * prev
                prev, cur = cur, nxt
                if abs(cur) > RESCALE_ABOVE:
                    prev *= RESCALE_BY
                    cur *= RESCALE_BY
                    scale += _LOG_RESCALE
            c = kernel.c_from_d(m, E, cur)
            weight = math.exp(log_overlap[m] + scale)
            terms = m + 1
            if not math.isfinite(cur * weight):
                log.warning("G series lost finiteness at m=%s for E=%r", m, E)
                break

            for p in parities:
                term = (cur - int(p) * c) * weight
                sums[p] += term
                peak[p] = max(peak[p], abs(term), abs(sums[p]))
                last[p] = abs(term)
                quiet[p] = quiet[p] + 1 if abs(term) < tol * peak[p] else 0

            if m >= _MIN_TERMS and all(quiet[p] >= _QUIET_TERMS for p in parities):
                converged = True
                break

        if not converged:
            log.warning("G series not converged after %s terms at E=%r", terms, E)
        return {
            p: GEvaluation(
                E=E,
                parity=p,
                value=sums[p],
                terms_used=terms,
                truncation_estimate=last[p] / peak[p] if peak[p] else 0.0,
                converged=converged,
            )
            for p in parities
        }

    def value(self, E: float, parity: Parity) -> float:
        return self.evaluate(E, (parity,))[parity].value

    def grid(self, energies: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """G_even, G_odd on a grid; points inside a pole window are masked (NaN)."""
        energies = np.asarray(energies, dtype=float)
        even = np.full(energies.shape, np.nan)
        odd = np.full(energies.shape, np.nan)
        masked = np.zeros(energies.shape, dtype=bool)
        if energies.size == 0:
            return even, odd, masked
        baselines = np.asarray(self.baselines_between(energies.min() - 1.0, energies.max() + 1.0))
        window = self.pole_window if self.params.epsilon != 0.0 else 0.0
        for i, E in enumerate(energies):
            if window and baselines.size and np.min(np.abs(baselines - E)) <= window:
                masked[i] = True
                continue
            try:
                result = self.evaluate(float(E))
            except PoleError:
                masked[i] = True
                continue
            even[i] = result[Parity.EVEN].value
            odd[i] = result[Parity.ODD].value
        return even, odd, masked

    def segments(self, E_lo: float, E_hi: float) -> list[tuple[float, float]]:
        """Sub-intervals of [E_lo, E_hi] with every baseline pole window removed."""
        if self.params.epsilon == 0.0:
            return [(E_lo, E_hi)]
        window = self.pole_window
        edges = [E_lo]
        for b in self.baselines_between(E_lo - window, E_hi + window):
            edges.extend([b - window, b + window])
        edges.append(E_hi)
        pairs = zip(edges[0::2], edges[1::2])
        return [(max(a, E_lo), min(b, E_hi)) for a, b in pairs if min(b, E_hi) > max(a, E_lo)]

    def scan_roots(self, E_lo: float, E_hi: float, parity: Parity, grid_n: int) -> list[float]:
        span = E_hi - E_lo
        if not span > 0.0:
            return []
        tol = self.settings.root_tol * self.params.omega

        def g(E: float) -> float:
            return self.value(E, parity)

        roots = []
        for a, b in self.segments(E_lo, E_hi):
            n = max(8, math.ceil(grid_n * (b - a) / span) + 1)
            xs = np.linspace(a, b, n).tolist()
            fs = [g(x) for x in xs]
            for x1, x2, f1, f2 in sign_brackets(xs, fs):
                root = bisect(g, x1, x2, tol, f1, f2)
                residual = abs(g(root))
                if residual > self.settings.root_rel_tol * max(abs(f1), abs(f2)):
                    log.debug("discarding bracket [%r, %r]: |G| did not shrink (%.3e)", x1, x2, residual)
                    continue
                roots.append(root)
        log.debug("parity=%s: %s root(s) in [%r, %r]", parity.label, len(roots), E_lo, E_hi)
        return sorted(roots)


def g_eval(
    E: float,
    parity: Parity,
    params: ModelParams,
    series_tol: float = 1e-14,
    M_max: int = 500,
    settings: Settings | None = None,
) -> GEvaluation:
    settings = replace(settings or Settings(), series_tol=series_tol, max_terms=M_max)
    return GFunction(params, settings).evaluate(E, (parity,))[parity]


def scan_roots(
    E_lo: float,
    E_hi: float,
    parity: Parity,
    params: ModelParams,
    grid_n: int,
    settings: Settings | None = None,
) -> list[float]:
    """Roots of G^parity in [E_lo, E_hi] (unified energy frame)."""
    return GFunction(params, settings).scan_roots(E_lo, E_hi, parity, grid_n)


def g_values(
    energies: np.ndarray,
    parity: Parity,
    params: ModelParams,
    settings: Settings | None = None,
    normalize: bool = True,
) -> np.ma.MaskedArray:
    """G on a grid as a masked array; pole windows are masked.

    With ``normalize`` the values are divided by the median of |G| over the
    unmasked points so curves for different parameters share a scale.
    """
    gfun = GFunction(params, settings)
    even, odd, masked = gfun.grid(energies)
    raw = even if parity is Parity.EVEN else odd
    if not normalize:
        return np.ma.masked_array(raw, mask=masked | ~np.isfinite(raw))
    return median_normalize(raw, masked)[0]


def median_normalize(raw: np.ndarray, masked: np.ndarray) -> tuple[np.ma.MaskedArray, float]:
    """Divide by the median |G| over unmasked finite points; returns (values, scale).

    The scale is 1.0 when no usable point remains.
    """
    raw = np.asarray(raw, dtype=float)
    values = np.ma.masked_array(raw, mask=np.asarray(masked, dtype=bool) | ~np.isfinite(raw))
    scale = float(np.ma.median(np.ma.abs(values))) if values.count() else 1.0
    if not scale > 0.0:
        scale = 1.0
    return values / scale, scale


def default_window(params: ModelParams, n_levels: int) -> tuple[float, float]:
    """[beta k - eps, beta (k + n_levels) + eps] in the unified frame."""
    dq = derive(params)
    k, eps = dq.params.k_value, dq.params.epsilon
    return dq.beta * k - eps, dq.beta * (k + n_levels) + eps


def spectrum(
    params: ModelParams,
    E_max: float | None = None,
    settings: Settings | None = None,
    n_levels: int | None = None,
    method: str = "auto",
) -> SpectrumResult:
    """Merged both-parity spectrum in the model's own energy frame.

    ``E_max`` is given in the model frame; without it the window covers the
    lowest ``n_levels`` levels.
    """
    settings = settings or Settings()
    n_levels = n_levels or settings.n_levels
    unified, shift = map_realization(params)
    if method == "auto":
        method = "oracle" if unified.g == 0.0 else "groot"

    if method == "oracle":
        return _oracle_spectrum(params, unified, shift, E_max, settings, n_levels)
    if method != "groot":
        raise ValueError(f"unknown spectrum method {method!r}")

    gfun = GFunction(unified, settings)
    E_lo, E_hi = default_window(unified, n_levels)
    if E_max is not None:
        E_hi = E_max + shift
    grid_n = math.ceil(settings.scan_density * (E_hi - E_lo) / gfun.dq.beta)

    levels = []
    for parity in (Parity.EVEN, Parity.ODD):
        for root in gfun.scan_roots(E_lo, E_hi, parity, grid_n):
            levels.append(SpectrumLevel(root - shift, parity, LevelSource.G_ROOT, abs(gfun.value(root, parity))))
    levels.sort(key=lambda lvl: (lvl.E, -int(lvl.parity)))

    baselines = [b - shift for b in gfun.baselines_between(E_lo, E_hi)]
    return SpectrumResult(levels, params, baselines, shift)


def _oracle_spectrum(
    params: ModelParams,
    unified: ModelParams,
    shift: float,
    E_max: float | None,
    settings: Settings,
    n_levels: int,
) -> SpectrumResult:
    from rabi.services.oracle import certify

    N = settings.truncation
    report = certify(params, N // 2, N, settings.convergence_tol, n_lowest=N // 4)
    pairs = list(zip(report.levels, report.deltas))
    if E_max is None:
        pairs = pairs[:n_levels]
    else:
        pairs = [(lvl, delta) for lvl, delta in pairs if lvl[0] <= E_max]
    levels = [SpectrumLevel(E, parity, LevelSource.ORACLE, delta) for (E, parity), delta in pairs]

    # bare ladder omega (k + m) when uncoupled, beta (k + m) otherwise
    beta = math.sqrt((unified.omega - 2.0 * unified.g) * (unified.omega + 2.0 * unified.g))
    top = levels[-1].E + shift if levels else 0.0
    baselines = []
    m = 0
    while beta * (unified.k_value + m) <= top:
        baselines.append(beta * (unified.k_value + m) - shift)
        m += 1
    notes = [] if report.converged else [f"truncation N={N // 2} vs N={N} not converged (max delta {report.max_delta:.3e})"]
    return SpectrumResult(levels, params, baselines, shift, report.converged, notes)
