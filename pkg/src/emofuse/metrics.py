"""Agreement metrics: concordance correlation, Pearson correlation, MSE.

All moments are population moments (divide by N).
"""

from __future__ import annotations

import warnings

import numpy as np


class DegenerateWarning(RuntimeWarning):
    """A metric fell back to its convention for a constant series."""


def _paired(y, y_hat, min_n=2):
    y = np.asarray(y, dtype=float).ravel()
    y_hat = np.asarray(y_hat, dtype=float).ravel()
    if y.shape != y_hat.shape:
        raise ValueError(f"length mismatch: {y.size} vs {y_hat.size}")
    if y.size < min_n:
        raise ValueError(f"need at least {min_n} samples, got {y.size}")
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(y_hat))):
        raise ValueError("non-finite values")
    return y, y_hat


def ccc(y, y_hat) -> float:
    r"""Concordance correlation coefficient.

    Uses the covariance form ``2 cov / (var + var_hat + (m - m_hat)^2)``,
    which equals the correlation form because ``gamma * sigma * sigma_hat``
    is the covariance. A zero denominator only happens for identical
    constant series, which score 1.
    """
    y, y_hat = _paired(y, y_hat)
    m, mh = y.mean(), y_hat.mean()
    dy, dh = y - m, y_hat - mh
    cov = np.mean(dy * dh)
    den = np.mean(dy * dy) + np.mean(dh * dh) + (m - mh) ** 2
    if den == 0:
        return 1.0
    return float(np.clip(2.0 * cov / den, -1.0, 1.0))


def pearson(y, y_hat) -> float:
    """Pearson correlation; 0 with a :class:`DegenerateWarning` if a series is constant."""
    y, y_hat = _paired(y, y_hat)
    dy, dh = y - y.mean(), y_hat - y_hat.mean()
    vy, vh = np.mean(dy * dy), np.mean(dh * dh)
    if vy == 0 or vh == 0:
        warnings.warn("constant series: pearson defined as 0", DegenerateWarning, stacklevel=2)
        return 0.0
    return float(np.clip(np.mean(dy * dh) / np.sqrt(vy * vh), -1.0, 1.0))


def mse(y, y_hat) -> float:
    y, y_hat = _paired(y, y_hat, min_n=1)
    return float(np.mean((y - y_hat) ** 2))
