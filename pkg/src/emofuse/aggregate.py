"""Utterance-level 76-dimensional audio descriptor."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cepstral import CepstralFrames, cepstral_features
from .dataset import FrameConfig, FrameSeries, Signal, frame_signal
from .lowlevel import (
    BAND_SPLIT_HZ,
    PITCH_MAX_HZ,
    PITCH_MIN_HZ,
    VOICING_THRESHOLD,
    LowLevelFrames,
    lowlevel_features,
    analysis_frames,
    silence_ratio,
    windowed_spectrum,
)

N_FEATURES = 76

_LOWLEVEL = ("centroid", "ber", "delta_spectrum", "zcr", "energy", "pitch")


def _build_names():
    names = []
    for feat in _LOWLEVEL:
        names += [f"{feat}_mean", f"{feat}_var"]
    names.append("silence_ratio")
    names += [f"mfcc{i}_mean" for i in range(1, 13)]
    names += [f"mfcc{i}_var" for i in range(1, 13)]
    names += [f"dmfcc{i}_mean" for i in range(1, 13)]
    names += [f"lpcc{i}_mean" for i in range(1, 12)]
    names += [f"lpcc{i}_var" for i in range(1, 12)]
    names += [f"formant{i}_mean" for i in range(1, 6)]
    return tuple(f"f{i:02d}_{n}" for i, n in enumerate(names))


FEATURE_NAMES = _build_names()

# category -> slice into the feature vector
FEATURE_GROUPS = {
    "lowlevel": slice(0, 12),
    "silence_ratio": slice(12, 13),
    "mfcc": slice(13, 37),
    "delta_mfcc": slice(37, 49),
    "lpcc": slice(49, 71),
    "formant": slice(71, 76),
}


def _masked_stats(values, mask):
    """Population mean/variance over ``mask``; (0, 0) when nothing is selected."""
    v = values[mask]
    if v.size == 0:
        return 0.0, 0.0
    return float(v.mean()), float(v.var())


def aggregate_utterance(
    frames: FrameSeries | None,
    lowlevel: LowLevelFrames,
    cepstral: CepstralFrames,
    silence: float | None = None,
) -> np.ndarray:
    """Collapse per-frame descriptors into the fixed 76-entry vector.

    ``silence`` overrides the silence ratio; otherwise it is computed from
    ``frames``. Pitch statistics use voiced frames only and each formant
    mean skips frames where that formant was not found.
    """
    T = len(lowlevel)
    if T < 1 or len(cepstral) != T or (frames is not None and len(frames) != T):
        raise ValueError("per-frame sequences must share a non-zero length")
    if silence is None:
        if frames is None:
            raise ValueError("need frames or an explicit silence ratio")
        silence = silence_ratio(frames)

    out = np.empty(N_FEATURES)
    cols = (
        lowlevel.spectral_centroid,
        lowlevel.band_energy_ratio,
        lowlevel.delta_spectrum_magnitude,
        lowlevel.zero_crossing_rate,
        lowlevel.short_time_energy,
    )
    for i, v in enumerate(cols):
        v = np.asarray(v, dtype=float)
        out[2 * i], out[2 * i + 1] = v.mean(), v.var()
    p = np.asarray(lowlevel.pitch, dtype=float)
    out[10], out[11] = _masked_stats(p, p > 0)
    out[12] = silence
    out[13:25] = cepstral.mfcc.mean(axis=0)
    out[25:37] = cepstral.mfcc.var(axis=0)
    out[37:49] = cepstral.delta_mfcc.mean(axis=0)
    out[49:60] = cepstral.lpcc.mean(axis=0)
    out[60:71] = cepstral.lpcc.var(axis=0)
    fm = cepstral.formants
    for i in range(5):
        out[71 + i] = _masked_stats(fm[:, i], fm[:, i] > 0)[0]
    return out


@dataclass(frozen=True)
class ExtractionConfig:
    frame: FrameConfig = FrameConfig()
    band_split_hz: float = BAND_SPLIT_HZ
    pitch_min_hz: float = PITCH_MIN_HZ
    pitch_max_hz: float = PITCH_MAX_HZ
    voicing_threshold: float = VOICING_THRESHOLD


def extract_features(signal: Signal, cfg: ExtractionConfig = ExtractionConfig()) -> np.ndarray:
    """Full per-utterance pipeline: framing, frame descriptors, aggregation."""
    frames = frame_signal(signal, cfg.frame)
    windowed = analysis_frames(frames.frames)
    spec = windowed_spectrum(windowed, frames.sample_rate)
    low = lowlevel_features(
        frames,
        spec,
        split_hz=cfg.band_split_hz,
        fmin=cfg.pitch_min_hz,
        fmax=cfg.pitch_max_hz,
        threshold=cfg.voicing_threshold,
    )
    cep = cepstral_features(frames, spec, windowed=windowed)
    return aggregate_utterance(frames, low, cep)
