from __future__ import annotations

import pytest

from rabi.config import Settings
from rabi.services.gfunction import spectrum
from rabi.services.oracle import labeled_spectrum
from tests.reference import HALF, QUARTER, unified


@pytest.fixture
def settings() -> Settings:
    return Settings()


@pytest.fixture(scope="session", params=[QUARTER, HALF], ids=["k=1/4", "k=1/2"])
def benchmark_levels(request):
    """G-root spectrum and oracle levels at eps = omega = 1, g = 0.4."""
    params = unified(0.4, request.param)
    roots = spectrum(params, settings=Settings(), method="groot")
    oracle = labeled_spectrum(params, 400, 10)
    return params, roots, oracle
