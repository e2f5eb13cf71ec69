"""Percentile clipping and min-max scaling fitted on the training split."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ScalerParams:
    p_low: np.ndarray
    p_high: np.ndarray
    min: np.ndarray
    max: np.ndarray
    fitted_on: str = "train"

    def __post_init__(self):
        n = len(self.p_low)
        if not all(len(v) == n for v in (self.p_high, self.min, self.max)):
            raise ValueError("scaler arrays differ in length")
        if np.any(self.p_low > self.p_high) or np.any(self.min > self.max):
            raise ValueError("scaler bounds are inverted")

    @property
    def n_features(self) -> int:
        return len(self.p_low)


def nearest_rank(sorted_col, p):
    """Nearest-rank percentile of an ascending column (1-based rank ceil(p/100*n))."""
    n = len(sorted_col)
    rank = min(max(math.ceil(p / 100.0 * n - 1e-12), 1), n)
    return sorted_col[rank - 1]


def fit_scaler(train, low=2.0, high=98.0, fitted_on="train") -> ScalerParams:
    X = np.asarray(train, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("fit_scaler needs a non-empty 2-D matrix")
    S = np.sort(X, axis=0)
    p_low = np.array([nearest_rank(S[:, j], low) for j in range(X.shape[1])])
    p_high = np.array([nearest_rank(S[:, j], high) for j in range(X.shape[1])])
    clipped = np.clip(X, p_low, p_high)
    return ScalerParams(p_low, p_high, clipped.min(axis=0), clipped.max(axis=0), fitted_on)


def transform(features, params: ScalerParams) -> np.ndarray:
    X = np.asarray(features, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != params.n_features:
        raise ValueError(f"expected {params.n_features} columns, got {X.shape[1]}")
    clipped = np.clip(X, params.p_low, params.p_high)
    span = params.max - params.min
    safe = np.where(span > 0, span, 1.0)
    out = np.where(span > 0, (clipped - params.min) / safe, 0.0)
    # clip bounds can sit outside [min, max] by rounding only
    return np.clip(out, 0.0, 1.0)
