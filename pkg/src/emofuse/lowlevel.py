"""Frame-level time and frequency descriptors.

Every function accepts a single frame (1-D) or a stack of frames (2-D, one
frame per row); spectra likewise carry either one magnitude vector or a
matrix of them. Batch use is what keeps extraction fast, so the scalar path
is just the one-row case of the same code.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import irfft, next_fast_len, rfft

from .dataset import FrameSeries

N_FFT = 256
PREEMPHASIS = 0.97
BAND_SPLIT_HZ = 2000.0
PITCH_MIN_HZ = 50.0
PITCH_MAX_HZ = 500.0
VOICING_THRESHOLD = 0.3


@dataclass(frozen=True)
class Spectrum:
    """Magnitudes ``|X_k|`` for ``k = 0..n_fft/2``; last axis is frequency."""

    magnitudes: np.ndarray
    sample_rate: float
    n_fft: int = N_FFT

    @property
    def bin_hz(self) -> float:
        return self.sample_rate / self.n_fft

    @property
    def freqs(self) -> np.ndarray:
        return np.arange(self.n_fft // 2 + 1) * self.bin_hz

    def __len__(self):
        return self.magnitudes.shape[-1]


def preemphasize(frames, coef=PREEMPHASIS):
    """``y[n] = x[n] - coef * x[n-1]`` within each frame (``x[-1] = 0``)."""
    x = np.asarray(frames, dtype=float)
    y = x.copy()
    y[..., 1:] -= coef * x[..., :-1]
    return y


def analysis_frames(frames, coef=PREEMPHASIS):
    """Pre-emphasis followed by a Hamming window of the frame length."""
    y = preemphasize(frames, coef)
    return y * np.hamming(y.shape[-1])


def spectrum(frame, sample_rate, n_fft=N_FFT, preemphasis=PREEMPHASIS) -> Spectrum:
    """Magnitude spectrum of one frame or a stack of frames.

    The frame is pre-emphasized, Hamming-windowed and zero-padded to
    ``n_fft`` points. Pass ``preemphasis=0`` to skip the pre-emphasis stage.
    """
    return windowed_spectrum(analysis_frames(np.asarray(frame, dtype=float), preemphasis), sample_rate, n_fft)


def windowed_spectrum(windowed, sample_rate, n_fft=N_FFT) -> Spectrum:
    """Magnitude spectrum of frames that are already pre-emphasized and windowed."""
    x = np.asarray(windowed, dtype=float)
    if x.shape[-1] > n_fft:
        raise ValueError(f"frame length {x.shape[-1]} exceeds n_fft={n_fft}")
    return Spectrum(np.abs(np.fft.rfft(x, n=n_fft, axis=-1)), float(sample_rate), n_fft)


def spectral_centroid(spec: Spectrum):
    """Magnitude-weighted mean frequency, DC bin excluded; 0 for silence."""
    m = spec.magnitudes[..., 1:]
    f = spec.freqs[1:]
    total = m.sum(axis=-1)
    num = (m * f).sum(axis=-1)
    safe = np.where(total > 0, total, 1.0)
    return np.where(total > 0, num / safe, 0.0)


def band_energy_ratio(spec: Spectrum, split_hz=BAND_SPLIT_HZ):
    """Share of (non-DC) spectral energy below ``split_hz``."""
    if not 0 < split_hz < spec.sample_rate / 2:
        raise ValueError(f"split_hz must lie in (0, {spec.sample_rate / 2})")
    p = spec.magnitudes[..., 1:] ** 2
    low = spec.freqs[1:] < split_hz
    total = p.sum(axis=-1)
    safe = np.where(total > 0, total, 1.0)
    return np.where(total > 0, p[..., low].sum(axis=-1) / safe, 0.0)


def delta_spectrum_magnitude(spec: Spectrum, prev: Spectrum | None = None) -> float:
    if prev is None:
        return 0.0
    a, b = np.asarray(spec.magnitudes), np.asarray(prev.magnitudes)
    if a.shape != b.shape:
        raise ValueError("spectra differ in length")
    return float(np.abs(a - b).sum())


def delta_spectrum_series(spec: Spectrum) -> np.ndarray:
    """Frame-to-frame L1 spectral change for a stacked spectrum; first frame 0."""
    m = np.atleast_2d(spec.magnitudes)
    out = np.zeros(m.shape[0])
    out[1:] = np.abs(np.diff(m, axis=0)).sum(axis=1)
    return out


def zero_crossing_rate(frame):
    x = np.asarray(frame, dtype=float)
    if x.shape[-1] < 2:
        return np.zeros(x.shape[:-1]) if x.ndim > 1 else 0.0
    pos = x >= 0
    return (pos[..., 1:] != pos[..., :-1]).sum(axis=-1) / (x.shape[-1] - 1)


def short_time_energy(frame):
    x = np.asarray(frame, dtype=float)
    return np.mean(x * x, axis=-1)


def autocorrelation(frames, max_lag):
    """Unnormalized autocorrelation ``r[tau] = sum_n x[n] x[n - tau]`` for
    ``tau = 0..max_lag`` (lags past the frame length are zero)."""
    x = np.atleast_2d(np.asarray(frames, dtype=float))
    L = x.shape[-1]
    n = next_fast_len(2 * L - 1, real=True)  # no circular wrap-around
    X = rfft(x, n=n, axis=-1)
    r = irfft(X.real**2 + X.imag**2, n=n, axis=-1)[:, : min(max_lag, L - 1) + 1]
    if r.shape[1] < max_lag + 1:
        r = np.pad(r, ((0, 0), (0, max_lag + 1 - r.shape[1])))
    return r


def pitch(
    frame,
    sample_rate,
    fmin=PITCH_MIN_HZ,
    fmax=PITCH_MAX_HZ,
    threshold=VOICING_THRESHOLD,
):
    """Autocorrelation pitch estimate in Hz; 0 marks an unvoiced frame."""
    x = np.asarray(frame, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    L = x.shape[-1]
    lag_lo = int(np.ceil(sample_rate / fmax - 1e-9))
    lag_hi = min(int(np.floor(sample_rate / fmin + 1e-9)), L - 1)
    out = np.zeros(x.shape[0])
    if lag_hi >= lag_lo:
        r = autocorrelation(x, lag_hi)
        energy = r[:, 0]
        voiced = energy > 0
        rho = r[voiced, lag_lo : lag_hi + 1] / energy[voiced, None]
        best = np.argmax(rho, axis=1)
        peak = rho[np.arange(rho.shape[0]), best]
        f0 = sample_rate / (best + lag_lo)
        out[voiced] = np.where(peak >= threshold, f0, 0.0)
    return float(out[0]) if single else out


def frame_rms(frames):
    return np.sqrt(short_time_energy(frames))


def silence_ratio(frames: FrameSeries | np.ndarray, rel_threshold=0.5) -> float:
    """Fraction of frames whose RMS is below ``rel_threshold`` x mean frame RMS."""
    data = frames.frames if isinstance(frames, FrameSeries) else np.atleast_2d(frames)
    rms = frame_rms(data)
    mean = rms.mean()
    if mean <= 0:
        return 1.0
    return float(np.mean(rms < rel_threshold * mean))


@dataclass(frozen=True)
class LowLevelFrames:
    """Per-frame low-level descriptors, one array entry per frame."""

    spectral_centroid: np.ndarray
    band_energy_ratio: np.ndarray
    delta_spectrum_magnitude: np.ndarray
    zero_crossing_rate: np.ndarray
    short_time_energy: np.ndarray
    pitch: np.ndarray

    def __len__(self):
        return len(self.pitch)


def lowlevel_features(
    frames: FrameSeries,
    spec: Spectrum | None = None,
    split_hz=BAND_SPLIT_HZ,
    fmin=PITCH_MIN_HZ,
    fmax=PITCH_MAX_HZ,
    threshold=VOICING_THRESHOLD,
) -> LowLevelFrames:
    x = frames.frames
    sr = frames.sample_rate
    if spec is None:
        spec = spectrum(x, sr)
    return LowLevelFrames(
        spectral_centroid=np.atleast_1d(spectral_centroid(spec)),
        band_energy_ratio=np.atleast_1d(band_energy_ratio(spec, split_hz)),
        delta_spectrum_magnitude=delta_spectrum_series(spec),
        zero_crossing_rate=np.atleast_1d(zero_crossing_rate(x)),
        short_time_energy=np.atleast_1d(short_time_energy(x)),
        pitch=np.atleast_1d(pitch(x, sr, fmin, fmax, threshold)),
    )
