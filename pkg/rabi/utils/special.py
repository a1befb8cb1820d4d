from __future__ import annotations

import numpy as np
from scipy.special import gammaln


def log_pochhammer_ratio(two_k: float, m: np.ndarray | int) -> np.ndarray:
    """ln( Gamma(2k + m) / (m! Gamma(2k)) ), evaluated as log-gamma differences."""
    m = np.asarray(m, dtype=float)
    return gammaln(two_k + m) - gammaln(m + 1.0) - gammaln(two_k)


def log_overlaps(k: float, xi: float, m_max: int) -> np.ndarray:
    """ln <k,0|k,m>_+ for m = 0..m_max."""
    m = np.arange(m_max + 1, dtype=float)
    return k * np.log1p(-xi * xi) + 0.5 * log_pochhammer_ratio(2.0 * k, m) + m * np.log(xi)
