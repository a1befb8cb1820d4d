from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from rabi.models import BasisLabel, ModelParams, Parity, Realization, as_fraction
from rabi.services.algebra import derive, generator_matrices, map_realization, su11_elements, unify
from rabi.utils.errors import DomainError, ParameterError
from tests.reference import HALF, QUARTER, unified


def test_derived_quantities_at_g_04() -> None:
    dq = derive(unified(0.4))
    assert dq.beta == pytest.approx(0.6, abs=1e-15)
    assert dq.r == pytest.approx(math.log(3.0), abs=1e-12)
    assert dq.xi == pytest.approx(0.5, abs=1e-15)
    assert dq.gamma_d == pytest.approx(0.2231435513, abs=1e-9)


@pytest.mark.parametrize("g", [0.01, 0.1, 0.25, 0.4, 0.499])
def test_derived_identities(g: float) -> None:
    dq = derive(unified(g))
    assert dq.beta**2 + 4 * g * g == pytest.approx(1.0, rel=1e-14)
    assert dq.cosh2r**2 - dq.sinh2r**2 == pytest.approx(1.0, rel=1e-10)
    assert dq.xi < math.tanh(dq.r)
    assert dq.baseline(2) == pytest.approx(dq.beta * 2.5)


@pytest.mark.parametrize("g", [0.0, -0.1, 0.5, 0.7])
def test_derive_rejects_collapse_regime(g: float) -> None:
    with pytest.raises(DomainError):
        derive(unified(g))


def test_realization_maps() -> None:
    two_photon, shift = map_realization(ModelParams(1.0, 0.5, 0.2, QUARTER, Realization.TWO_PHOTON))
    assert (two_photon.omega, two_photon.g, shift) == (1.0, 0.4, 0.25)
    assert two_photon.realization is Realization.UNIFIED

    two_mode, shift = map_realization(ModelParams(1.0, 0.5, 0.4, HALF, Realization.TWO_MODE))
    assert (two_mode.omega, two_mode.g, shift) == (1.0, 0.4, 0.5)

    intensity, shift = map_realization(ModelParams(1.0, 1.0, 0.4, Fraction(1), "intensity-dependent"))
    assert (intensity.omega, intensity.g, shift) == (1.0, 0.4, 1.0)

    plain = unified()
    assert map_realization(plain) == (plain, 0.0)
    assert unify(plain) is plain


@pytest.mark.parametrize(
    ("realization", "k"),
    [
        (Realization.TWO_PHOTON, "1/2"),
        (Realization.TWO_MODE, "1/4"),
        (Realization.TWO_MODE, "1/3"),
        (Realization.INTENSITY_DEPENDENT, "1/4"),
    ],
)
def test_realization_constraints(realization: Realization, k: str) -> None:
    with pytest.raises(ParameterError):
        ModelParams(1.0, 1.0, 0.2, k, realization)


@pytest.mark.parametrize("kwargs", [{"epsilon": -1.0}, {"omega": 0.0}, {"k": "0"}, {"k": "-1/2"}])
def test_invalid_model_params(kwargs) -> None:
    values = {"epsilon": 1.0, "omega": 1.0, "g": 0.2, "k": "1/2", **kwargs}
    with pytest.raises(ParameterError):
        ModelParams(**values)


def test_bargmann_index_parsing() -> None:
    assert as_fraction("1/4") == Fraction(1, 4)
    assert as_fraction(2) == Fraction(2)
    assert as_fraction(0.75) == Fraction(3, 4)
    with pytest.raises(ParameterError):
        as_fraction("quarter")
    with pytest.raises(ParameterError):
        as_fraction("1/0")


def test_parity_values() -> None:
    assert int(Parity.EVEN) == 1 and int(Parity.ODD) == -1
    assert Parity.ODD.label == "odd"


def test_su11_elements() -> None:
    assert su11_elements(BasisLabel(HALF, 0)) == (0.5, 1.0, 0.0)
    k0, kplus, kminus = su11_elements(BasisLabel(QUARTER, 2))
    assert k0 == 2.25
    assert kplus == pytest.approx(math.sqrt(3 * 2.5))
    assert kminus == pytest.approx(math.sqrt(2 * 1.5))
    with pytest.raises(ParameterError):
        BasisLabel(HALF, -1)


@pytest.mark.parametrize("k", [QUARTER, HALF, Fraction(3, 4), Fraction(3, 2)])
def test_generator_algebra(k: Fraction) -> None:
    n = 40
    k0, kplus, kminus = generator_matrices(k, n)
    scale = np.abs(k0).max() ** 2

    np.testing.assert_array_equal(kminus, kplus.T)
    np.testing.assert_allclose(k0 @ kplus - kplus @ k0, kplus, atol=1e-10 * scale)
    np.testing.assert_allclose(k0 @ kminus - kminus @ k0, -kminus, atol=1e-10 * scale)

    # [K-, K+] = 2 K0 away from the truncation edge
    commutator = kminus @ kplus - kplus @ kminus
    np.testing.assert_allclose(commutator[: n - 1, : n - 1], 2 * k0[: n - 1, : n - 1], atol=1e-10 * scale)

    casimir = k0 @ k0 - k0 - kplus @ kminus
    kf = float(k)
    np.testing.assert_allclose(casimir, kf * (kf - 1) * np.eye(n), atol=1e-10 * scale)


def test_beta_falls_to_zero_at_collapse() -> None:
    betas = np.array([derive(unified(float(g))).beta for g in np.linspace(0.01, 0.4999, 200)])
    assert np.all(np.diff(betas) < 0.0)
    assert derive(unified(0.4999999)).beta < 1e-3
