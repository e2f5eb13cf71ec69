"""MFCC, delta-MFCC, LPC, LPCC and formant analysis."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.fft import dct

from .dataset import FrameSeries
from .lowlevel import N_FFT, Spectrum, analysis_frames, spectrum

N_MEL = 26
N_MFCC = 12
N_LPCC = 11
N_FORMANTS = 5
LPC_ORDER = 12
LOG_FLOOR = 1e-10
FORMANT_MAX_BW = 400.0
FORMANT_MIN_HZ = 90.0
FORMANT_EDGE_HZ = 50.0


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=float) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=float) / 2595.0) - 1.0)


@dataclass(frozen=True)
class MelFilterbank:
    weights: np.ndarray  # (n_filters, n_fft // 2 + 1)
    sample_rate: float
    n_fft: int

    @property
    def n_filters(self) -> int:
        return self.weights.shape[0]

    @property
    def centers_hz(self) -> np.ndarray:
        edges = mel_to_hz(np.linspace(0, hz_to_mel(self.sample_rate / 2), self.n_filters + 2))
        return edges[1:-1]


@lru_cache(maxsize=16)
def mel_filterbank(sample_rate, n_fft=N_FFT, n_filters=N_MEL) -> MelFilterbank:
    """Triangular filters equally spaced on the mel scale from 0 Hz to Nyquist.

    Weights are evaluated at the exact bin frequencies so narrow low filters
    still cover at least one bin.
    """
    edges = mel_to_hz(np.linspace(0.0, hz_to_mel(sample_rate / 2), n_filters + 2))
    f = np.arange(n_fft // 2 + 1) * sample_rate / n_fft
    lo, mid, hi = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    up = (f - lo) / (mid - lo)
    down = (hi - f) / (hi - mid)
    w = np.maximum(0.0, np.minimum(up, down))
    w.setflags(write=False)
    return MelFilterbank(w, float(sample_rate), n_fft)


def mfcc(spec: Spectrum, fb: MelFilterbank | None = None, n_coeffs=N_MFCC):
    """Cepstral coefficients c1..c12 (c0 dropped) of a spectrum or spectrum stack."""
    if fb is None:
        fb = mel_filterbank(spec.sample_rate, spec.n_fft)
    if fb.weights.shape[1] != spec.magnitudes.shape[-1]:
        raise ValueError("filterbank does not match spectrum length")
    energies = (spec.magnitudes**2) @ fb.weights.T
    logs = np.log(np.maximum(energies, LOG_FLOOR))
    return dct(logs, type=2, norm="ortho", axis=-1)[..., 1 : n_coeffs + 1]


def delta(series, width=2):
    """Regression delta over +-``width`` frames with edge replication."""
    c = np.asarray(series, dtype=float)
    if c.ndim == 1:
        c = c[:, None]
    T = c.shape[0]
    padded = np.concatenate([np.repeat(c[:1], width, 0), c, np.repeat(c[-1:], width, 0)])
    num = np.zeros_like(c)
    for n in range(1, width + 1):
        num += n * (padded[width + n : width + n + T] - padded[width - n : width - n + T])
    return num / (2 * sum(n * n for n in range(1, width + 1)))


@dataclass(frozen=True)
class LpcModel:
    """Predictor ``x[n] ~ sum_k coefficients[k-1] * x[n-k]``.

    Arrays carry a leading frame axis when built from a frame stack.
    """

    coefficients: np.ndarray
    gain: np.ndarray | float
    reflection: np.ndarray

    @property
    def order(self) -> int:
        return self.coefficients.shape[-1]


def autocorr_biased(frames, max_lag):
    x = np.atleast_2d(np.asarray(frames, dtype=float))
    N = x.shape[-1]
    r = np.zeros((x.shape[0], max_lag + 1))
    for k in range(min(max_lag, N - 1) + 1):
        r[:, k] = np.einsum("ij,ij->i", x[:, k:], x[:, : N - k]) / N
    return r


def levinson(r, order=None):
    """Levinson-Durbin recursion on autocorrelation rows ``r[..., 0..order]``.

    Returns ``(a, err, k)``: predictor coefficients, final prediction-error
    power and reflection coefficients. Rows with ``r0 <= 0`` give all zeros.
    """
    r = np.asarray(r, dtype=float)
    single = r.ndim == 1
    r = np.atleast_2d(r)
    p = r.shape[1] - 1 if order is None else order
    F = r.shape[0]
    a = np.zeros((F, p))
    k = np.zeros((F, p))
    err = r[:, 0].copy()
    live = err > 0
    for i in range(p):
        acc = r[:, i + 1] - np.einsum("ij,ij->i", a[:, :i], r[:, i:0:-1])
        ki = np.zeros(F)
        np.divide(acc, err, out=ki, where=live)
        prev = a[:, :i].copy()
        a[:, :i] = prev - ki[:, None] * prev[:, ::-1]
        a[:, i] = ki
        k[:, i] = ki
        err = np.where(live, (1.0 - ki * ki) * err, err)
        # a non-positive error power means the input was not positive definite
        live &= err > 0
    if single:
        return a[0], float(err[0]), k[0]
    return a, err, k


def lpc(frame, order=LPC_ORDER) -> LpcModel:
    """LPC by the autocorrelation method. The caller supplies the
    pre-emphasized, windowed frame (or a stack of them)."""
    x = np.asarray(frame, dtype=float)
    r = autocorr_biased(x, order)
    a, err, k = levinson(r, order)
    gain = np.sqrt(np.maximum(err, 0.0))
    if x.ndim == 1:
        return LpcModel(a[0], float(gain[0]), k[0])
    return LpcModel(a, gain, k)


def lpcc(model: LpcModel, n_coeffs=N_LPCC):
    """Cepstrum of the all-pole model via the standard recursion."""
    a_in = np.atleast_2d(model.coefficients)
    p = a_in.shape[1]
    a = np.zeros((a_in.shape[0], n_coeffs + 1))
    a[:, 1 : min(p, n_coeffs) + 1] = a_in[:, :n_coeffs]
    c = np.zeros_like(a)
    for n in range(1, n_coeffs + 1):
        ks = np.arange(1, n)
        c[:, n] = a[:, n] + (c[:, ks] * a[:, n - ks] * (ks / n)).sum(axis=1)
    out = c[:, 1:]
    return out[0] if np.ndim(model.coefficients) == 1 else out


def _companion(a):
    a = np.atleast_2d(a)
    F, p = a.shape
    C = np.zeros((F, p, p))
    C[:, 0, :] = a
    if p > 1:
        C[:, np.arange(1, p), np.arange(p - 1)] = 1.0
    return C


def _pick_formants(roots, sample_rate, n_formants, max_bw, fmin):
    """Filter a (frames, order) root matrix down to sorted, zero-padded formants."""
    with np.errstate(divide="ignore"):
        bw = -(sample_rate / np.pi) * np.log(np.abs(roots))
    freq = (sample_rate / (2 * np.pi)) * np.angle(roots)
    keep = (
        (roots.imag > 0)
        & (bw < max_bw)
        & (freq >= fmin)
        & (freq <= sample_rate / 2 - FORMANT_EDGE_HZ)
    )
    cand = np.sort(np.where(keep, freq, np.inf), axis=1)
    width = max(n_formants, cand.shape[1])
    cand = np.pad(cand, ((0, 0), (0, width - cand.shape[1])), constant_values=np.inf)
    cand = cand[:, :n_formants]
    return np.where(np.isfinite(cand), cand, 0.0)


def _companion_roots(a):
    C = _companion(a)
    try:
        return np.linalg.eigvals(C)
    except np.linalg.LinAlgError:
        pass
    roots = np.zeros(a.shape, dtype=complex)
    for i, Ci in enumerate(C):
        try:
            roots[i] = np.linalg.eigvals(Ci)
        except np.linalg.LinAlgError:
            roots[i] = 0.0  # |z| = 0 never passes the bandwidth test
    return roots


def formants(
    model: LpcModel,
    sample_rate,
    n_formants=N_FORMANTS,
    max_bw=FORMANT_MAX_BW,
    fmin=FORMANT_MIN_HZ,
):
    """Formant frequencies from the complex roots of ``1 - sum a_k z^-k``.

    Roots are the eigenvalues of the companion matrix. Frames whose
    eigenvalue solve fails to converge get all-zero formants.
    """
    a = np.atleast_2d(model.coefficients)
    if a.shape[1] < 2:
        raise ValueError("formant analysis needs an LPC order of at least 2")
    out = np.zeros((a.shape[0], n_formants))
    idx = np.flatnonzero(np.any(a != 0, axis=1) & np.all(np.isfinite(a), axis=1))
    if idx.size:
        roots = _companion_roots(a[idx])
        out[idx] = _pick_formants(roots, sample_rate, n_formants, max_bw, fmin)
    return out[0] if np.ndim(model.coefficients) == 1 else out


@dataclass(frozen=True)
class CepstralFrames:
    mfcc: np.ndarray  # (T, 12)
    delta_mfcc: np.ndarray  # (T, 12)
    lpcc: np.ndarray  # (T, 11)
    formants: np.ndarray  # (T, 5)

    def __len__(self):
        return self.mfcc.shape[0]


def cepstral_features(
    frames: FrameSeries,
    spec: Spectrum | None = None,
    order=LPC_ORDER,
    windowed: np.ndarray | None = None,
) -> CepstralFrames:
    """``windowed`` may pass in the frames already run through ``analysis_frames``."""
    x = frames.frames
    sr = frames.sample_rate
    if windowed is None:
        windowed = analysis_frames(x)
    if spec is None:
        spec = spectrum(x, sr)
    c = np.atleast_2d(mfcc(spec, mel_filterbank(sr, spec.n_fft)))
    model = lpc(windowed, order)
    return CepstralFrames(
        mfcc=c,
        delta_mfcc=delta(c),
        lpcc=np.atleast_2d(lpcc(model)),
        formants=np.atleast_2d(formants(model, sr)),
    )
