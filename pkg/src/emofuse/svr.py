"""Epsilon-SVR trained by SMO, and validation-driven model selection."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .metrics import ccc
from .relieff import FeatureRanking, top_k

KKT_TOL = 1e-3
TAU = 1e-12


class ConvergenceWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class SvrHyper:
    kernel: str = "rbf"
    C: float = 1.0
    epsilon: float = 0.1
    gamma: float | None = None  # rbf only; None resolves to 1/d at fit time

    def __post_init__(self):
        if self.kernel not in ("linear", "rbf"):
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if not self.C > 0:
            raise ValueError("C must be positive")
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be non-negative")
        if self.gamma is not None and not self.gamma > 0:
            raise ValueError("gamma must be positive")

    def resolved(self, d: int) -> "SvrHyper":
        if self.kernel == "rbf" and self.gamma is None:
            return replace(self, gamma=1.0 / max(d, 1))
        return self


def kernel_matrix(A, B, hyper: SvrHyper):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if hyper.kernel == "linear":
        return A @ B.T
    sq = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * (A @ B.T)
    return np.exp(-hyper.gamma * np.maximum(sq, 0.0))


@dataclass(frozen=True)
class SvrModel:
    support_vectors: np.ndarray  # (n_sv, d)
    beta: np.ndarray  # alpha - alpha*, per support vector
    bias: float
    hyper: SvrHyper
    feature_indices: np.ndarray | None = None  # columns of the full feature matrix
    kkt_violation: float = 0.0
    n_iter: int = 0
    converged: bool = True

    @property
    def n_features(self) -> int:
        return self.support_vectors.shape[1]

    def predict(self, X) -> np.ndarray:
        return predict(self, X)


def dual_objective(beta, K, y, epsilon) -> float:
    """``-1/2 b'Kb - eps*|b|_1 + y'b``; the quantity SMO maximizes."""
    beta = np.asarray(beta, dtype=float)
    return float(-0.5 * beta @ K @ beta - epsilon * np.abs(beta).sum() + y @ beta)


def _smo(K, y, C, eps, tol, max_iter, trace=None):
    n = y.size
    z = np.concatenate([np.ones(n), -np.ones(n)])
    pos = z > 0
    alpha = np.zeros(2 * n)
    G = np.concatenate([eps - y, eps + y])
    Kd = np.diag(K)
    Kz = np.concatenate([K, -K])  # column t of Q is z_t * Kz[:, t mod n]
    # index sets of the maximal-violating-pair rule; only entries i, j change per step
    up = pos.copy()
    low = ~pos
    it = 0
    gap = 0.0
    while True:
        score = -z * G
        if not up.any() or not low.any():
            gap = 0.0
            break
        i = int(np.argmax(np.where(up, score, -np.inf)))
        j = int(np.argmin(np.where(low, score, np.inf)))
        gap = float(score[i] - score[j])
        if gap < tol or it >= max_iter:
            break
        it += 1

        ii, jj = i % n, j % n
        Qij = z[i] * z[j] * K[ii, jj]
        ai, aj = alpha[i], alpha[j]
        if z[i] != z[j]:
            quad = Kd[ii] + Kd[jj] + 2.0 * Qij
            delta = (-G[i] - G[j]) / (quad if quad > 0 else TAU)
            diff = ai - aj
            ai += delta
            aj += delta
            if diff > 0:
                if aj < 0:
                    aj, ai = 0.0, diff
            elif ai < 0:
                ai, aj = 0.0, -diff
            if diff > 0:
                if ai > C:
                    ai, aj = C, C - diff
            elif aj > C:
                aj, ai = C, C + diff
        else:
            quad = Kd[ii] + Kd[jj] - 2.0 * Qij
            delta = (G[i] - G[j]) / (quad if quad > 0 else TAU)
            total = ai + aj
            ai -= delta
            aj += delta
            if total > C:
                if ai > C:
                    ai, aj = C, total - C
            elif aj < 0:
                aj, ai = 0.0, total
            if total > C:
                if aj > C:
                    aj, ai = C, total - C
            elif ai < 0:
                ai, aj = 0.0, total

        d_i, d_j = ai - alpha[i], aj - alpha[j]
        alpha[i], alpha[j] = ai, aj
        G += (z[i] * d_i) * Kz[:, ii] + (z[j] * d_j) * Kz[:, jj]
        for t in (i, j):
            up[t] = alpha[t] < C if pos[t] else alpha[t] > 0
            low[t] = alpha[t] > 0 if pos[t] else alpha[t] < C
        if trace is not None:
            trace.append(dual_objective(alpha[:n] - alpha[n:], K, y, eps))

    # bias: average over free variables, else midpoint of the feasible interval
    yG = z * G
    at_ub = alpha >= C
    at_lb = alpha <= 0
    free = ~(at_ub | at_lb)
    if free.any():
        rho = float(yG[free].mean())
    else:
        ub_mask = (at_ub & (z < 0)) | (at_lb & (z > 0))
        lb_mask = (at_ub & (z > 0)) | (at_lb & (z < 0))
        ub = yG[ub_mask].min() if ub_mask.any() else np.inf
        lb = yG[lb_mask].max() if lb_mask.any() else -np.inf
        rho = float((ub + lb) / 2)
    return alpha[:n] - alpha[n:], -rho, gap, it


def train_svr(X, y, hyper: SvrHyper = SvrHyper(), tol=KKT_TOL, max_iter=None, trace=None) -> SvrModel:
    """Fit an epsilon-SVR by SMO with maximal-violating-pair selection.

    Stops when the KKT gap drops below ``tol`` or after ``max_iter`` pair
    updates (default ``10000 * n``); in the latter case a
    :class:`ConvergenceWarning` reports the achieved gap and the model is
    still returned. If ``trace`` is a list, the dual objective after every
    update is appended to it.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] != y.size or y.size < 1:
        raise ValueError("X and y must describe the same n >= 1 samples")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite training data")
    hyper = hyper.resolved(X.shape[1])
    if max_iter is None:
        max_iter = 10 * y.size * 1000
    K = kernel_matrix(X, X, hyper)
    beta, bias, gap, it = _smo(K, y, hyper.C, hyper.epsilon, tol, max_iter, trace)
    converged = gap < tol
    if not converged:
        warnings.warn(
            f"SMO stopped after {it} updates with KKT violation {gap:.3g}",
            ConvergenceWarning,
            stacklevel=2,
        )
    sv = beta != 0
    return SvrModel(
        support_vectors=X[sv].copy(),
        beta=beta[sv],
        bias=bias,
        hyper=hyper,
        kkt_violation=gap,
        n_iter=it,
        converged=converged,
    )


def predict(model: SvrModel, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.n_features:
        raise ValueError(f"expected {model.n_features} features, got {X.shape[1]}")
    if model.beta.size == 0:
        return np.full(X.shape[0], model.bias)
    return kernel_matrix(X, model.support_vectors, model.hyper) @ model.beta + model.bias


def predict_full(model: SvrModel, X_full) -> np.ndarray:
    """Predict from a full feature matrix, applying the model's column selection."""
    X_full = np.atleast_2d(np.asarray(X_full, dtype=float))
    if model.feature_indices is None:
        return predict(model, X_full)
    if X_full.shape[1] <= int(np.max(model.feature_indices)):
        raise ValueError("feature matrix is narrower than the model's selection")
    return predict(model, X_full[:, model.feature_indices])


DEFAULT_KS = tuple(range(5, 80, 5)) + (76,)


@dataclass(frozen=True)
class SvrGrid:
    ks: tuple = DEFAULT_KS
    Cs: tuple = (0.1, 1.0, 10.0, 100.0)
    epsilons: tuple = (0.01, 0.1)
    gammas: tuple = (0.01, 0.1, None)  # None means 1/k
    kernel: str = "rbf"

    def hypers(self, k):
        gammas = self.gammas if self.kernel == "rbf" else (None,)
        for C, eps, g in itertools.product(self.Cs, self.epsilons, gammas):
            yield SvrHyper(self.kernel, C, eps, g).resolved(k)

    def __len__(self):
        n_gamma = len(self.gammas) if self.kernel == "rbf" else 1
        return len(self.Cs) * len(self.epsilons) * n_gamma


@dataclass(frozen=True)
class Selection:
    k: int
    hyper: SvrHyper
    model: SvrModel
    val_ccc: float
    log: list  # dicts: k, kernel, C, epsilon, gamma, val_ccc, kkt_violation


def model_select(X_train, y_train, X_val, y_val, ranking: FeatureRanking, grid: SvrGrid = SvrGrid()) -> Selection:
    """Grid search over feature count and SVR hyperparameters by validation CCC.

    Ties (validation CCC equal to 12 decimals) go to fewer features, then
    smaller C, then smaller epsilon, then smaller gamma.
    """
    X_train = np.asarray(X_train, dtype=float)
    X_val = np.asarray(X_val, dtype=float)
    y_train = np.asarray(y_train, dtype=float)
    y_val = np.asarray(y_val, dtype=float)
    if X_val.shape[0] == 0:
        raise ValueError("empty validation split")
    if len(grid) == 0 or len(grid.ks) == 0:
        raise ValueError("empty grid")
    d = X_train.shape[1]
    ks = sorted({min(int(k), d) for k in grid.ks if k >= 1})
    if not ks:
        raise ValueError("no positive feature count in the grid")

    log = []
    best = None
    for k in ks:
        cols = top_k(ranking, k)
        Xt, Xv = X_train[:, cols], X_val[:, cols]
        for hyper in grid.hypers(k):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ConvergenceWarning)
                model = train_svr(Xt, y_train, hyper)
            score = ccc(y_val, predict(model, Xv)) if y_val.size >= 2 else 0.0
            log.append(
                dict(
                    k=k,
                    kernel=hyper.kernel,
                    C=hyper.C,
                    epsilon=hyper.epsilon,
                    gamma=hyper.gamma if hyper.kernel == "rbf" else "",
                    val_ccc=score,
                    kkt_violation=model.kkt_violation,
                )
            )
            # scores equal up to rounding noise count as ties
            key = (-round(score, 12), k, hyper.C, hyper.epsilon, hyper.gamma or 0.0)
            if best is None or key < best[0]:
                best = (key, k, hyper, replace(model, feature_indices=cols), score)
    _, k, hyper, model, score = best
    return Selection(k, hyper, model, score, log)
