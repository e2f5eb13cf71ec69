"""Spectral meta-learner for regression (SMLR) fusion.

Base models are treated as noisy views of one latent target. The off-diagonal
part of their prediction covariance is rank one, ``Q_ij = r_i r_j``, so the
loadings ``r`` can be read off without labels. Each model's residual variance
``Q_ii - r_i^2`` then measures its error, and models are averaged with
weights proportional to ``r_i / (Q_ii - r_i^2)``.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)

DIAG_TOL = 1e-8
MAX_SWEEPS = 100
MAX_POWER_STEPS = 10000
NOISE_FLOOR = 1e-9  # relative to the mean prediction variance


class FusionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class PredictionSet:
    model_names: tuple
    utterance_ids: tuple
    P: np.ndarray  # (M, N), rows aligned to utterance_ids

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.P, dtype=float))
        names, ids = tuple(self.model_names), tuple(self.utterance_ids)
        if P.shape != (len(names), len(ids)):
            raise ValueError(f"P has shape {P.shape}, expected {(len(names), len(ids))}")
        if len(names) < 1 or len(ids) < 2:
            raise ValueError("need at least one model and two utterances")
        if len(set(names)) != len(names):
            raise ValueError("duplicate model names")
        if not np.all(np.isfinite(P)):
            raise ValueError("prediction matrix has missing or non-finite cells")
        object.__setattr__(self, "model_names", names)
        object.__setattr__(self, "utterance_ids", ids)
        object.__setattr__(self, "P", P)

    def subset(self, names) -> "PredictionSet":
        idx = [self.model_names.index(n) for n in names]
        return PredictionSet(tuple(names), self.utterance_ids, self.P[idx])


def _power_iteration(A, v0=None, tol=1e-13, max_steps=MAX_POWER_STEPS):
    """Largest (algebraic) eigenpair of a symmetric matrix.

    Iterates on ``A + cI`` with ``c`` a Gershgorin bound so the dominant
    eigenvalue is the largest one rather than the largest in magnitude.
    """
    M = A.shape[0]
    shift = np.abs(A).sum(axis=1).max()
    B = A + shift * np.eye(M)
    v = np.ones(M) / np.sqrt(M) if v0 is None else v0 / np.linalg.norm(v0)
    for _ in range(max_steps):
        w = B @ v
        norm = np.linalg.norm(w)
        if norm == 0:
            return 0.0, v
        w /= norm
        if w @ v < 0:
            w = -w
        if np.max(np.abs(w - v)) < tol:
            v = w
            break
        v = w
    else:
        raise RuntimeError(f"power iteration did not converge in {max_steps} steps")
    return float(v @ A @ v), v


def _refine(Q, r, steps=50):
    """Gauss-Newton on sum_{i<j} (Q_ij - r_i r_j)^2, the objective whose
    stationary point the diagonal-completion sweep converges to (linearly)."""
    M = r.size
    I, J = np.triu_indices(M, 1)
    rows = np.arange(I.size)
    best = np.sum((Q[I, J] - r[I] * r[J]) ** 2)
    for _ in range(steps):
        resid = Q[I, J] - r[I] * r[J]
        jac = np.zeros((I.size, M))
        jac[rows, I] = r[J]
        jac[rows, J] = r[I]
        step = np.linalg.lstsq(jac, resid, rcond=None)[0]
        cand = r + step
        cost = np.sum((Q[I, J] - cand[I] * cand[J]) ** 2)
        if cost > best:
            break
        r, best = cand, cost
        if np.max(np.abs(step)) < 1e-15 * max(1.0, np.max(np.abs(r))):
            break
    return r


def prediction_covariance(P) -> np.ndarray:
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Pc = P - P.mean(axis=1, keepdims=True)
    return Pc @ Pc.T / (P.shape[1] - 1)


def spectral_loadings(P, tol=DIAG_TOL, max_sweeps=MAX_SWEEPS) -> np.ndarray:
    """Rank-one factor ``r`` of the off-diagonal prediction covariance.

    The diagonal starts at each row's largest absolute off-diagonal entry
    and is replaced by ``lambda * v**2`` from the leading eigenpair until it
    stops moving; a Gauss-Newton pass then pins the same fixed point down
    to machine precision. The sign makes ``sum(r) > 0``.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    M = P.shape[0]
    if M < 3:
        raise ValueError(f"spectral estimation needs at least 3 models, got {M}")
    if P.shape[1] < 2:
        raise ValueError("need at least two utterances")
    if np.any(np.ptp(P, axis=1) == 0):
        raise ValueError("constant prediction row")
    Q = prediction_covariance(P)
    off = np.abs(Q - np.diag(np.diag(Q)))
    D = Q.copy()
    np.fill_diagonal(D, off.max(axis=1))
    v = None
    for _ in range(max_sweeps):
        lam, v = _power_iteration(D, v)
        new = lam * v * v
        change = np.max(np.abs(new - np.diag(D)))
        np.fill_diagonal(D, new)
        if change < tol:
            break
    r = np.sqrt(max(lam, 0.0)) * v
    r = _refine(Q, r)
    return r if r.sum() >= 0 else -r


@dataclass(frozen=True)
class AccuracyEstimate:
    loadings: np.ndarray  # covariance of each model with the latent target
    noise_var: np.ndarray  # residual variance Q_ii - r_i^2 (floored)
    accuracy: np.ndarray  # loadings / noise_var


def estimate_accuracies(P) -> AccuracyEstimate:
    """Unsupervised accuracy of each base model (rows of ``P``)."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    r = spectral_loadings(P)
    q = np.diag(prediction_covariance(P))
    floor = NOISE_FLOOR * q.mean()
    noise = np.maximum(q - r * r, floor)
    return AccuracyEstimate(r, noise, r / noise)


@dataclass(frozen=True)
class FusionResult:
    model_names: tuple
    weights: np.ndarray
    accuracy_estimates: np.ndarray  # NaN when fewer than 3 models remain
    fused: np.ndarray
    utterance_ids: tuple = ()
    loadings: np.ndarray | None = None


def smlr_fuse(preds: PredictionSet, exclude=()) -> FusionResult:
    """Accuracy-weighted average of the base predictions.

    ``exclude`` drops named models first. Three or more remaining models get
    spectral weights (negative accuracies clamp to 0; all zero falls back to
    uniform), two get uniform weights with a warning, one passes through.
    """
    exclude = list(exclude)
    unknown = [e for e in exclude if e not in preds.model_names]
    if unknown:
        raise ValueError(f"unknown model(s) in exclusion list: {unknown}")
    keep = [n for n in preds.model_names if n not in exclude]
    if not keep:
        raise ValueError("exclusion list removes every model")
    sub = preds.subset(keep)
    M = len(keep)
    acc = np.full(M, np.nan)
    loads = None
    if M >= 3:
        est = estimate_accuracies(sub.P)
        acc, loads = est.accuracy, est.loadings
        w = np.maximum(acc, 0.0)
        if w.sum() > 0:
            w = w / w.sum()
        else:
            log.warning("all accuracy estimates are non-positive; using uniform weights")
            w = np.full(M, 1.0 / M)
    elif M == 2:
        warnings.warn("only two models to fuse; using uniform weights", FusionWarning, stacklevel=2)
        w = np.full(2, 0.5)
    else:
        w = np.ones(1)
    fused = w @ sub.P
    # guard the convex-combination bound against rounding
    fused = np.clip(fused, sub.P.min(axis=0), sub.P.max(axis=0))
    return FusionResult(tuple(keep), w, acc, fused, sub.utterance_ids, loads)
