"""Exact isolated (Juddian) solutions on the baselines E = beta (k + M)."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from rabi.models import ModelParams, as_fraction
from rabi.services.recurrence import (
    RESCALE_ABOVE,
    RESCALE_BY,
    CoefficientSequence,
    RecurrenceKernel,
    forward_d,
)
from rabi.utils.errors import DomainError
from rabi.utils.roots import bisect, sign_brackets

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class IsolatedSolution:
    k: Fraction
    M: int
    g_star: float
    E_star: float
    epsilon: float
    omega: float
    state: CoefficientSequence | None = None

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.epsilon, self.omega, self.g_star, self.k)


def _kernel(g: float, M: int, k, epsilon: float, omega: float) -> tuple[RecurrenceKernel, float]:
    if M < 1:
        raise DomainError(f"baseline index must be >= 1, got {M}")
    kernel = RecurrenceKernel(ModelParams(epsilon, omega, g, as_fraction(k)))
    return kernel, kernel.baseline(M)


def isolated_residual(g: float, M: int, k, epsilon: float, omega: float) -> float:
    """d_M at E = beta (k + M); its zeros in g are isolated solutions."""
    kernel, E = _kernel(g, M, k, epsilon, omega)
    d, scale, _ = forward_d(kernel, E, M)
    return d[M] * math.exp(scale[M])


def judd_determinant(g: float, M: int, k, epsilon: float, omega: float) -> float:
    """Leading M x M minor of the tridiagonal (-T_m, 1, R_m) matrix.

    Equal to ``(-1)**M * d_M`` until the minors need rescaling; rescaling only
    multiplies by positive factors, so the sign and the roots are preserved.
    """
    kernel, E = _kernel(g, M, k, epsilon, omega)
    p_prev, p_cur = 1.0, -kernel.t(0, E)
    for n in range(2, M + 1):
        p_prev, p_cur = p_cur, -kernel.t(n - 1, E) * p_cur - kernel.r(n - 2) * p_prev
        if abs(p_cur) > RESCALE_ABOVE:
            p_prev *= RESCALE_BY
            p_cur *= RESCALE_BY
    return p_cur


def closed_form_m1(k, epsilon: float, omega: float) -> float | None:
    """Coupling of the M = 1 solution, where T_0 vanishes on the first baseline."""
    numerator = omega * omega - epsilon * epsilon / 4.0
    if numerator <= 0.0:
        return None
    return math.sqrt(numerator / (4.0 * (2.0 * float(k) + 1.0)))


def find_isolated(
    M: int,
    k,
    epsilon: float,
    omega: float,
    grid_n: int = 400,
    tol: float = 1e-12,
    with_state: bool = True,
) -> list[IsolatedSolution]:
    k = as_fraction(k)
    if epsilon == 0.0:
        log.warning("epsilon=0 decouples the spin; no isolated solutions on baseline M=%s", M)
        return []
    if epsilon * epsilon / 4.0 >= omega * omega:
        log.warning("eps^2/4 >= omega^2 (eps=%s, omega=%s): no isolated solutions expected", epsilon, omega)
        return []

    grid = np.linspace(0.001 * omega, 0.4999 * omega, grid_n)
    values = [isolated_residual(float(g), M, k, epsilon, omega) for g in grid]

    def residual(g: float) -> float:
        return isolated_residual(g, M, k, epsilon, omega)

    solutions = []
    for g1, g2, f1, f2 in sign_brackets(grid.tolist(), values):
        g_star = bisect(residual, g1, g2, tol, f1, f2)
        solution = IsolatedSolution(k, M, g_star, _kernel(g_star, M, k, epsilon, omega)[1], epsilon, omega)
        if with_state:
            solution = replace(solution, state=build_isolated_state(solution))
        solutions.append(solution)

    log.info("baseline M=%s k=%s: %s isolated solution(s)", M, k, len(solutions))
    return sorted(solutions, key=lambda s: s.g_star)


def build_isolated_state(sol: IsolatedSolution) -> CoefficientSequence:
    """Finite eigenstate c[0..M], d[0..M] (d[M] = 0), normalized to unit norm."""
    if sol.epsilon == 0.0:
        raise DomainError("epsilon=0 leaves c_M undefined (decoupled case)")
    M = sol.M
    kernel, E = _kernel(sol.g_star, M, sol.k, sol.epsilon, sol.omega)
    dq = kernel.dq
    k = float(sol.k)

    mantissa, scale, _ = forward_d(kernel, E, M - 1)
    d = np.asarray(mantissa, dtype=float) * np.exp(scale)
    c = np.array([kernel.c_from_d(m, E, d[m]) for m in range(M)], dtype=float)
    c_top = -dq.beta * dq.sinh2r * math.sqrt(M * (M + 2 * k - 1)) * d[M - 1] / sol.epsilon

    d = np.append(d, 0.0)
    c = np.append(c, c_top)
    norm = math.sqrt(float(np.sum(c * c + d * d)))
    return CoefficientSequence(
        E=E,
        d=d / norm,
        c=c / norm,
        log_scale=np.zeros(M + 1),
        params=kernel.params,
        method="isolated",
    )

