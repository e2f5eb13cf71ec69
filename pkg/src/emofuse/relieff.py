"""RReliefF feature weighting for regression targets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RReliefFParams:
    m: int | None = None  # None: every instance, in index order
    k: int = 10
    sigma: float = 20.0
    seed: int = 0

    def __post_init__(self):
        if self.m is not None and self.m < 1:
            raise ValueError("m must be >= 1")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class FeatureRanking:
    weights: np.ndarray
    order: np.ndarray  # feature indices by descending weight, ties by index

    @classmethod
    def from_weights(cls, weights) -> "FeatureRanking":
        w = np.asarray(weights, dtype=float)
        order = np.lexsort((np.arange(w.size), -w))
        return cls(w, order)

    def __len__(self):
        return self.weights.size


def _ranges(a):
    span = a.max(axis=0) - a.min(axis=0)
    return np.where(span > 0, span, np.inf)  # zero range -> diff is 0


def rrelieff(X, y, params: RReliefFParams = RReliefFParams()) -> FeatureRanking:
    """Score features by how their differences between near neighbours track
    label differences.

    Neighbours are found by Manhattan distance on range-normalized features;
    the j-th nearest neighbour gets influence ``exp(-(j / sigma)^2)``,
    normalized over the ``k`` neighbours.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    n, d = X.shape
    if y.size != n:
        raise ValueError("X and y disagree on the number of instances")
    k = params.k
    if n <= k:
        raise ValueError(f"need more than k={k} instances, got {n}")

    y_span = y.max() - y.min()
    if y_span == 0:
        # no label differences to explain: every feature is equally useless
        return FeatureRanking.from_weights(np.zeros(d))
    Xn = X / _ranges(X)
    yn = y / y_span

    if params.m is None or params.m >= n:
        sample = np.arange(n)
    else:
        sample = np.sort(np.random.default_rng(params.seed).choice(n, params.m, replace=False))
    m_used = sample.size

    infl = np.exp(-((np.arange(1, k + 1) / params.sigma) ** 2))
    infl /= infl.sum()

    n_dc = 0.0
    n_da = np.zeros(d)
    n_dcda = np.zeros(d)
    for i in sample:
        diff = np.abs(Xn - Xn[i])
        dist = diff.sum(axis=1)
        dist[i] = np.inf
        nbrs = np.argsort(dist, kind="stable")[:k]
        dy = np.abs(yn[nbrs] - yn[i])
        n_dc += dy @ infl
        n_da += infl @ diff[nbrs]
        n_dcda += (dy * infl) @ diff[nbrs]

    w = np.zeros(d)
    if n_dc > 0:
        w += n_dcda / n_dc
    if m_used - n_dc > 0:
        w -= (n_da - n_dcda) / (m_used - n_dc)
    return FeatureRanking.from_weights(w)


def top_k(ranking: FeatureRanking, k: int) -> np.ndarray:
    if not 1 <= k <= len(ranking):
        raise ValueError(f"k must be in [1, {len(ranking)}]")
    return ranking.order[:k].copy()
