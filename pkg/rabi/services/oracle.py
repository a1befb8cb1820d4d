"""Truncated-basis diagonalization of the unified model and its realizations.

Every builder reduces to a bosonic ladder ``m = 0..N-1``: the bare bosonic
energies on the diagonal and the ``m -> m+1`` coupling elements. The spin
is then attached in either the sigma-z or the sigma-x basis. Parity acts as
``-sigma_z (-1)^m`` in every realization.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from rabi.models import BasisLabel, ModelParams, Parity, Realization
from rabi.services.algebra import su11_elements, unify
from rabi.utils.errors import ConvergenceError, DomainError, ParameterError

log = logging.getLogger(__name__)

SIGMA_Z = "sigma-z"
SIGMA_X = "sigma-x"
BASES = (SIGMA_Z, SIGMA_X)

_COLLAPSE_WARN = 0.45


@dataclass(frozen=True)
class TruncatedHamiltonian:
    N: int
    matrix: np.ndarray = field(repr=False)
    basis: str
    realization: Realization
    epsilon: float

    @property
    def dim(self) -> int:
        return 2 * self.N


@dataclass(frozen=True)
class TruncationReport:
    """Parity-labelled levels at the larger truncation and their drift."""

    levels: list[tuple[float, Parity]]
    deltas: list[float]
    N_small: int
    N_large: int
    tol: float

    @property
    def max_delta(self) -> float:
        return max(self.deltas, default=0.0)

    @property
    def converged(self) -> bool:
        return all(d <= self.tol * max(1.0, abs(E)) for (E, _), d in zip(self.levels, self.deltas))


def _check_oracle_params(params: ModelParams, N: int) -> None:
    if N < 2:
        raise ParameterError(f"truncation N must be >= 2, got {N}")
    unified = unify(params)
    if not 0.0 <= unified.g < unified.omega / 2.0:
        raise DomainError(f"oracle needs 0 <= g < omega/2 in unified units, got g={unified.g}, omega={unified.omega}")


def _ladder(params: ModelParams, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Bare bosonic energies (N) and coupling elements g <m+1|X|m> (N-1) in the model's own frame."""
    m = np.arange(N, dtype=float)
    k = params.k_value
    omega, g = params.omega, params.g
    realization = params.realization

    if realization is Realization.UNIFIED:
        bare = np.empty(N)
        up = np.empty(N - 1)
        for j in range(N):
            k0, kplus, _ = su11_elements(BasisLabel(params.k, j))
            bare[j] = omega * k0
            if j < N - 1:
                up[j] = g * kplus
        return bare, up

    if realization is Realization.TWO_PHOTON:
        # even Fock sector for k = 1/4, odd for k = 3/4
        n = 2.0 * m + (0.0 if k < 0.5 else 1.0)
        bare = omega * n
        up = g * np.sqrt((n[:-1] + 1.0) * (n[:-1] + 2.0))
    elif realization is Realization.TWO_MODE:
        # fixed-difference ladder |m + 2k - 1>_a |m>_b
        n_a, n_b = m + 2.0 * k - 1.0, m
        bare = omega * (n_a + n_b)
        up = g * np.sqrt((n_a[:-1] + 1.0) * (n_b[:-1] + 1.0))
    else:
        # a^dag sqrt(n + 2k - 1) raises |n> with factor sqrt(n + 1) sqrt(n + 2k)
        n = m
        bare = omega * n
        up = g * np.sqrt(n[:-1] + 1.0) * np.sqrt(n[:-1] + 1.0 + 2.0 * k - 1.0)
    return bare, up


def _assemble(bare: np.ndarray, up: np.ndarray, epsilon: float, basis: str) -> np.ndarray:
    N = len(bare)
    h = np.zeros((2 * N, 2 * N))
    top, low = np.arange(N), np.arange(N, 2 * N)
    half = epsilon / 2.0

    if basis == SIGMA_Z:
        h[top, top] = bare + half
        h[low, low] = bare - half
        # g (K+ + K-) flips the spin
        for m, x in enumerate(up):
            h[m, N + m + 1] = h[N + m + 1, m] = x
            h[m + 1, N + m] = h[N + m, m + 1] = x
    elif basis == SIGMA_X:
        h[top, top] = bare
        h[low, low] = bare
        for m, x in enumerate(up):
            h[m, m + 1] = h[m + 1, m] = x
            h[N + m, N + m + 1] = h[N + m + 1, N + m] = -x
        h[top, low] = h[low, top] = -half
    else:
        raise ParameterError(f"unknown basis {basis!r}; expected one of {BASES}")
    h.setflags(write=False)
    return h


def build_unified(params: ModelParams, N: int, basis: str = SIGMA_Z) -> TruncatedHamiltonian:
    unified = unify(params)
    _check_oracle_params(unified, N)
    bare, up = _ladder(unified, N)
    return TruncatedHamiltonian(N, _assemble(bare, up, unified.epsilon, basis), basis, Realization.UNIFIED, unified.epsilon)


def build_realization(params: ModelParams, N: int, basis: str = SIGMA_Z) -> TruncatedHamiltonian:
    """Native Fock-space matrix of a physical realization (model energy frame)."""
    if params.realization is Realization.UNIFIED:
        raise ParameterError("build_realization needs a physical realization")
    _check_oracle_params(params, N)
    bare, up = _ladder(params, N)
    return TruncatedHamiltonian(N, _assemble(bare, up, params.epsilon, basis), basis, params.realization, params.epsilon)


def build(params: ModelParams, N: int, basis: str = SIGMA_Z) -> TruncatedHamiltonian:
    if params.realization is Realization.UNIFIED:
        return build_unified(params, N, basis)
    return build_realization(params, N, basis)


def eigen_sym(h: TruncatedHamiltonian | np.ndarray, n_lowest: int | None = None) -> np.ndarray:
    matrix = h.matrix if isinstance(h, TruncatedHamiltonian) else np.asarray(h, dtype=float)
    dim = matrix.shape[0]
    if n_lowest is not None and not 0 < n_lowest <= dim:
        raise ParameterError(f"n_lowest must be in 1..{dim}, got {n_lowest}")
    subset = None if n_lowest is None else [0, n_lowest - 1]
    try:
        values = scipy.linalg.eigh(matrix, eigvals_only=True, subset_by_index=subset)
    except scipy.linalg.LinAlgError as exc:
        raise ConvergenceError(f"symmetric eigensolver failed on a {dim}x{dim} matrix: {exc}") from exc
    return np.sort(values)


def parity_vectors(h: TruncatedHamiltonian, parity: Parity) -> np.ndarray:
    """Orthonormal columns spanning the ``parity`` eigenspace of ``-sigma_z (-1)^m``."""
    N = h.N
    sign = np.where(np.arange(N) % 2 == 0, 1.0, -1.0)
    vectors = np.zeros((2 * N, N))
    cols = np.arange(N)
    if h.basis == SIGMA_Z:
        # up m carries -(-1)^m, down m carries (-1)^m
        up_has = -sign == int(parity)
        vectors[np.where(up_has, cols, N + cols), cols] = 1.0
    else:
        # parity swaps |+,m> and |-,m> with a factor (-1)^m
        vectors[cols, cols] = 1.0 / math.sqrt(2.0)
        vectors[N + cols, cols] = int(parity) * sign / math.sqrt(2.0)
    return vectors


def parity_operator(h: TruncatedHamiltonian) -> np.ndarray:
    even, odd = parity_vectors(h, Parity.EVEN), parity_vectors(h, Parity.ODD)
    return even @ even.T - odd @ odd.T


def parity_project(h: TruncatedHamiltonian) -> tuple[np.ndarray, np.ndarray]:
    """(H_even, H_odd) blocks; in the sigma-z basis these are exact sub-matrices."""
    blocks = []
    for parity in (Parity.EVEN, Parity.ODD):
        if h.basis == SIGMA_Z:
            idx = np.argmax(parity_vectors(h, parity), axis=0)
            blocks.append(h.matrix[np.ix_(idx, idx)])
        else:
            v = parity_vectors(h, parity)
            blocks.append(v.T @ h.matrix @ v)
    return blocks[0], blocks[1]


def labeled_spectrum(
    params: ModelParams,
    N: int,
    n_lowest: int | None = None,
    basis: str = SIGMA_Z,
) -> list[tuple[float, Parity]]:
    """Lowest levels from the parity blocks, ascending; ties put even first."""
    h = build(params, N, basis)
    even, odd = parity_project(h)
    per_block = None if n_lowest is None else min(n_lowest, N)
    levels = [(float(E), Parity.EVEN) for E in eigen_sym(even, per_block)]
    levels += [(float(E), Parity.ODD) for E in eigen_sym(odd, per_block)]
    levels.sort(key=lambda lvl: (lvl[0], -int(lvl[1])))
    return levels if n_lowest is None else levels[:n_lowest]


def certify(
    params: ModelParams,
    N_small: int,
    N_large: int,
    tol: float = 1e-9,
    n_lowest: int | None = None,
    basis: str = SIGMA_Z,
) -> TruncationReport:
    """Compare parity-resolved levels at two truncations.

    Only the lowest quarter of the smaller truncation is compared unless
    ``n_lowest`` says otherwise.
    """
    if N_small >= N_large:
        raise ParameterError(f"need N_small < N_large, got {N_small} and {N_large}")
    count = n_lowest or max(1, N_small // 4)
    per_block = min(count, N_small)

    h_small, h_large = build(params, N_small, basis), build(params, N_large, basis)
    levels: list[tuple[float, Parity]] = []
    deltas: list[float] = []
    for parity, small_block, large_block in zip(
        (Parity.EVEN, Parity.ODD), parity_project(h_small), parity_project(h_large)
    ):
        small = eigen_sym(small_block, per_block)
        large = eigen_sym(large_block, per_block)
        levels += [(float(E), parity) for E in large]
        deltas += np.abs(large - small).tolist()

    order = sorted(range(len(levels)), key=lambda i: (levels[i][0], -int(levels[i][1])))[:count]
    report = TruncationReport([levels[i] for i in order], [deltas[i] for i in order], N_small, N_large, tol)
    if not report.converged:
        unified = unify(params)
        hint = " (near spectral collapse)" if unified.g > _COLLAPSE_WARN * unified.omega else ""
        log.warning(
            "truncation N=%s vs N=%s not converged%s: max delta %.3e > tol %.1e",
            N_small,
            N_large,
            hint,
            report.max_delta,
            tol,
        )
    return report
