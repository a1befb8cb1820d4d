"""su(1,1) algebra, realization catalog and derived quantities."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from rabi.models import BasisLabel, DerivedQuantities, ModelParams, Realization
from rabi.utils.errors import DomainError


def map_realization(params: ModelParams) -> tuple[ModelParams, float]:
    """Return the unified parameters and the shift with ``E_model = E_unified - shift``."""
    realization = params.realization
    if realization is Realization.UNIFIED:
        return params, 0.0

    if realization is Realization.TWO_PHOTON:
        # omega_2p = omega/2, g_2p = g/2
        omega, g, shift = 2.0 * params.omega, 2.0 * params.g, params.omega / 2.0
    elif realization is Realization.TWO_MODE:
        # omega_2m = omega/2, g_2m = g
        omega, g, shift = 2.0 * params.omega, params.g, params.omega
    else:
        omega, g, shift = params.omega, params.g, params.k_value * params.omega

    return ModelParams(params.epsilon, omega, g, params.k, Realization.UNIFIED), shift


def unify(params: ModelParams) -> ModelParams:
    return map_realization(params)[0]


def derive(params: ModelParams) -> DerivedQuantities:
    unified = unify(params)
    omega, g = unified.omega, unified.g
    if not 0.0 < g < omega / 2.0:
        raise DomainError(
            f"coupling g={g} outside (0, omega/2={omega / 2.0}); "
            "g >= omega/2 is the spectral-collapse / non-self-adjoint regime"
        )

    beta_sq = (omega - 2.0 * g) * (omega + 2.0 * g)
    beta = math.sqrt(beta_sq)
    return DerivedQuantities(
        beta=beta,
        r=math.atanh(2.0 * g / omega),
        cosh2r=(omega * omega + 4.0 * g * g) / beta_sq,
        sinh2r=4.0 * g * omega / beta_sq,
        xi=2.0 * g / (omega + beta),
        gamma_d=math.log(omega / (2.0 * g)),
        params=unified,
    )


def su11_elements(label: BasisLabel) -> tuple[float, float, float]:
    """(K0 diagonal, K+ coefficient, K- coefficient) on ``|k, m>``."""
    k, m = label.k, label.m
    k0 = float(k + m)
    kplus = math.sqrt(float((m + 1) * (m + 2 * k)))
    kminus = math.sqrt(float(m * (m + 2 * k - 1))) if m > 0 else 0.0
    return k0, kplus, kminus


def generator_matrices(k: Fraction, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Truncated K0, K+, K- on ``|k, 0..n-1>``; K- is the transpose of K+."""
    k0 = np.zeros((n, n))
    kplus = np.zeros((n, n))
    for m in range(n):
        diag, up, _ = su11_elements(BasisLabel(k, m))
        k0[m, m] = diag
        if m + 1 < n:
            kplus[m + 1, m] = up
    return k0, kplus, kplus.T.copy()
