"""Slow, literal reference implementations used as test oracles.

Nothing here imports the package under test; each function follows the
textbook definition with explicit loops or dense linear algebra.
"""

import math

import numpy as np


def hamming(L):
    if L == 1:
        return np.ones(1)
    return np.array([0.54 - 0.46 * math.cos(2 * math.pi * n / (L - 1)) for n in range(L)])


def naive_dft_magnitudes(frame, n_fft=256, preemphasis=0.97):
    x = [float(v) for v in frame]
    y = [x[n] - (preemphasis * x[n - 1] if n > 0 else 0.0) for n in range(len(x))]
    w = hamming(len(y))
    y = [y[n] * w[n] for n in range(len(y))] + [0.0] * (n_fft - len(y))
    mags = []
    for k in range(n_fft // 2 + 1):
        re = sum(y[n] * math.cos(2 * math.pi * k * n / n_fft) for n in range(n_fft))
        im = -sum(y[n] * math.sin(2 * math.pi * k * n / n_fft) for n in range(n_fft))
        mags.append(math.hypot(re, im))
    return np.array(mags)


def mel_weights(sr, n_fft=256, n_filters=26):
    def mel(f):
        return 2595.0 * math.log10(1 + f / 700.0)

    def imel(m):
        return 700.0 * (10 ** (m / 2595.0) - 1)

    top = mel(sr / 2)
    edges = [imel(top * i / (n_filters + 1)) for i in range(n_filters + 2)]
    W = np.zeros((n_filters, n_fft // 2 + 1))
    for m in range(n_filters):
        lo, c, hi = edges[m], edges[m + 1], edges[m + 2]
        for k in range(n_fft // 2 + 1):
            f = k * sr / n_fft
            if lo < f <= c:
                W[m, k] = (f - lo) / (c - lo)
            elif c < f < hi:
                W[m, k] = (hi - f) / (hi - c)
    return W


def mfcc_definition(mags, sr, n_fft=256, n_coeffs=12):
    W = mel_weights(sr, n_fft)
    E = W @ (np.asarray(mags) ** 2)
    L = [math.log(max(e, 1e-10)) for e in E]
    M = len(L)
    out = []
    for i in range(1, n_coeffs + 1):
        s = sum(L[m] * math.cos(math.pi * i * (2 * m + 1) / (2 * M)) for m in range(M))
        out.append(math.sqrt(2.0 / M) * s)
    return np.array(out)


def biased_autocorr(x, max_lag):
    N = len(x)
    return np.array([sum(x[n] * x[n + k] for n in range(N - k)) / N for k in range(max_lag + 1)])


def yule_walker(r, order):
    """Dense solve of the Toeplitz normal equations R a = r[1:]."""
    R = np.array([[r[abs(i - j)] for j in range(order)] for i in range(order)])
    return np.linalg.solve(R, np.asarray(r[1 : order + 1], dtype=float))


def lpcc_straight(a, n_coeffs=11):
    a = list(a) + [0.0] * max(0, n_coeffs - len(a))
    c = [0.0] * (n_coeffs + 1)
    for n in range(1, n_coeffs + 1):
        acc = a[n - 1]
        for k in range(1, n):
            acc += (k / n) * c[k] * a[n - k - 1]
        c[n] = acc
    return np.array(c[1:])


def delta_replicated(series, width=2):
    c = np.asarray(series, dtype=float)
    T = len(c)
    den = 2 * sum(n * n for n in range(1, width + 1))
    out = np.zeros_like(c)
    for t in range(T):
        acc = 0.0
        for n in range(1, width + 1):
            acc = acc + n * (c[min(t + n, T - 1)] - c[max(t - n, 0)])
        out[t] = acc / den
    return out


def autocorr_pitch(x, sr, fmin=50, fmax=500, thr=0.3):
    x = [float(v) for v in x]
    e = sum(v * v for v in x)
    if e == 0:
        return 0.0
    best, best_lag = -np.inf, None
    for lag in range(math.ceil(sr / fmax), math.floor(sr / fmin) + 1):
        if lag >= len(x):
            break
        rho = sum(x[n] * x[n - lag] for n in range(lag, len(x))) / e
        if rho > best:
            best, best_lag = rho, lag
    if best_lag is None or best < thr:
        return 0.0
    return sr / best_lag


def eq1_ccc(y, yh):
    """CCC in the correlation form, population moments."""
    y, yh = np.asarray(y, float), np.asarray(yh, float)
    N = len(y)
    m, mh = sum(y) / N, sum(yh) / N
    s = math.sqrt(sum((v - m) ** 2 for v in y) / N)
    sh = math.sqrt(sum((v - mh) ** 2 for v in yh) / N)
    gamma = sum((a - m) * (b - mh) for a, b in zip(y, yh)) / (N * s * sh)
    return 2 * gamma * s * sh / (s * s + sh * sh + (m - mh) ** 2)


def rrelieff_literal(X, y, k=10, sigma=20.0):
    """Per-instance, per-neighbour, per-feature loops; every instance used."""
    X = np.asarray(X, float)
    y = np.asarray(y, float)
    n, d = X.shape
    rng_f = [X[:, f].max() - X[:, f].min() for f in range(d)]
    rng_y = y.max() - y.min()

    def diff_f(f, a, b):
        return 0.0 if rng_f[f] == 0 else abs(X[a, f] - X[b, f]) / rng_f[f]

    def diff_y(a, b):
        return 0.0 if rng_y == 0 else abs(y[a] - y[b]) / rng_y

    raw = [math.exp(-((j / sigma) ** 2)) for j in range(1, k + 1)]
    infl = [v / sum(raw) for v in raw]
    NdC, NdA, NdCdA = 0.0, [0.0] * d, [0.0] * d
    for i in range(n):
        dists = sorted(
            ((sum(diff_f(f, i, j) for f in range(d)), j) for j in range(n) if j != i)
        )
        for rank, (_, j) in enumerate(dists[:k]):
            NdC += diff_y(i, j) * infl[rank]
            for f in range(d):
                NdA[f] += diff_f(f, i, j) * infl[rank]
                NdCdA[f] += diff_y(i, j) * diff_f(f, i, j) * infl[rank]
    W = []
    for f in range(d):
        a = NdCdA[f] / NdC if NdC else 0.0
        b = (NdA[f] - NdCdA[f]) / (n - NdC) if n - NdC else 0.0
        W.append(a - b)
    return np.array(W)


def svr_dual(beta, K, y, eps):
    return -0.5 * beta @ K @ beta - eps * np.abs(beta).sum() + y @ beta


def svr_pairwise_cd(K, y, C, eps, sweeps=3000):
    """Cyclic pairwise coordinate ascent on the beta-form dual.

    Each step moves beta_i += t, beta_j -= t (keeping sum(beta) = 0) to the
    exact maximizer of the concave piecewise-quadratic 1-D objective, found
    by enumerating breakpoints, bounds and per-piece stationary points.
    """
    n = len(y)
    beta = np.zeros(n)
    for _ in range(sweeps):
        moved = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                lo = max(-C - beta[i], beta[j] - C)
                hi = min(C - beta[i], beta[j] + C)
                if hi <= lo:
                    continue
                g = K @ beta
                curv = K[i, i] + K[j, j] - 2 * K[i, j]
                slope = (y[i] - y[j]) - (g[i] - g[j])
                cands = {lo, hi}
                for b in (-beta[i], beta[j]):
                    if lo < b < hi:
                        cands.add(b)
                if curv > 0:
                    for si in (-1, 1):
                        for sj in (-1, 1):
                            t = (slope - eps * si + eps * sj) / curv
                            if lo < t < hi:
                                cands.add(t)

                def obj(t):
                    return (
                        slope * t
                        - 0.5 * curv * t * t
                        - eps * (abs(beta[i] + t) + abs(beta[j] - t))
                    )

                t = max(sorted(cands), key=obj)
                if obj(t) > obj(0.0) + 1e-15:
                    beta[i] += t
                    beta[j] -= t
                    moved = max(moved, abs(t))
        if moved < 1e-12:
            break
    return beta


def svr_grid_n3(K, y, C, eps, steps=801):
    """Dense grid over the 2-D feasible set of a 3-point problem."""
    best = -np.inf
    grid = np.linspace(-C, C, steps)
    for b0 in grid:
        b1 = grid
        b2 = -b0 - b1
        ok = np.abs(b2) <= C
        B = np.stack([np.full(ok.sum(), b0), b1[ok], b2[ok]], axis=1)
        vals = -0.5 * np.einsum("ij,jk,ik->i", B, K, B) - eps * np.abs(B).sum(1) + B @ y
        if vals.size:
            best = max(best, vals.max())
    return best
