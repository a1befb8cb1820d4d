from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum
from fractions import Fraction

from rabi.utils.errors import ParameterError


class Realization(str, Enum):
    UNIFIED = "unified"
    TWO_PHOTON = "two-photon"
    TWO_MODE = "two-mode"
    INTENSITY_DEPENDENT = "intensity-dependent"


class Parity(IntEnum):
    EVEN = 1
    ODD = -1

    @property
    def label(self) -> str:
        return self.name.lower()


def as_fraction(value: Fraction | int | float | str) -> Fraction:
    """Bargmann index as an exact rational; accepts ``"p/q"`` strings."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParameterError(f"invalid Bargmann index {value!r}") from exc
    return Fraction(value).limit_denominator(10**6)


@dataclass(frozen=True)
class ModelParams:
    """Physical inputs in the frame of ``realization``.

    For a physical realization ``omega`` and ``g`` are the model's own
    frequency and coupling (omega_2p, g_2p, ...), not the unified ones.
    """

    epsilon: float
    omega: float
    g: float
    k: Fraction
    realization: Realization = Realization.UNIFIED

    def __post_init__(self) -> None:
        object.__setattr__(self, "k", as_fraction(self.k))
        object.__setattr__(self, "realization", Realization(self.realization))
        if not self.epsilon >= 0:
            raise ParameterError(f"epsilon must be >= 0, got {self.epsilon}")
        if not self.omega > 0:
            raise ParameterError(f"omega must be > 0, got {self.omega}")
        if self.k <= 0:
            raise ParameterError(f"Bargmann index must be positive, got {self.k}")

        k = self.k
        if self.realization is Realization.TWO_PHOTON and k not in (Fraction(1, 4), Fraction(3, 4)):
            raise ParameterError(f"two-photon realization requires k in {{1/4, 3/4}}, got {k}")
        if self.realization is Realization.TWO_MODE and (2 * k).denominator != 1:
            raise ParameterError(f"two-mode realization requires k in {{1/2, 1, 3/2, ...}}, got {k}")
        if self.realization is Realization.INTENSITY_DEPENDENT and 2 * k - 1 < 0:
            raise ParameterError(f"intensity-dependent realization requires 2k-1 >= 0, got k={k}")

    @property
    def k_value(self) -> float:
        return float(self.k)

    def with_g(self, g: float) -> ModelParams:
        return ModelParams(self.epsilon, self.omega, g, self.k, self.realization)


@dataclass(frozen=True)
class BasisLabel:
    k: Fraction
    m: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "k", as_fraction(self.k))
        if self.m < 0:
            raise ParameterError(f"ladder level must be >= 0, got {self.m}")


@dataclass(frozen=True)
class DerivedQuantities:
    beta: float
    r: float
    cosh2r: float
    sinh2r: float
    xi: float
    gamma_d: float
    params: ModelParams = field(repr=False, compare=False)

    def baseline(self, m: int | float) -> float:
        return self.beta * (self.params.k_value + m)
