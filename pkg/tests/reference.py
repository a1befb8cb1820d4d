from __future__ import annotations

from fractions import Fraction

from rabi.models import ModelParams

QUARTER = Fraction(1, 4)
HALF = Fraction(1, 2)

# (g*, E*) per baseline index at eps = omega = 1
ISOLATED_REFERENCE = {
    QUARTER: {
        1: [(0.3535533906, 0.8838834765)],
        2: [(0.2204002402, 2.0196115013), (0.4547316538, 0.9355144259)],
        3: [(0.1568336781, 3.0859820301), (0.3626210904, 2.2376050069), (0.4782672783, 0.9477617545)],
    },
    HALF: {
        1: [(0.3061862178, 1.1858541226)],
        2: [(0.1994076564, 2.2925781698), (0.4291793563, 1.2826250435)],
        3: [(0.1457789392, 3.3479361619), (0.3419056455, 2.5538061692), (0.4636529203, 1.3100658403)],
    },
}


def unified(g: float = 0.4, k: Fraction | str = HALF, epsilon: float = 1.0, omega: float = 1.0) -> ModelParams:
    return ModelParams(epsilon, omega, g, k)
