"""Manifest loading, WAV ingestion and framing."""

from __future__ import annotations

import csv
import math
import wave
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

CANONICAL_RATE = 16000
MANIFEST_HEADER = ["utterance_id", "wav_path", "split", "arousal", "valence"]
SPLITS = ("train", "validation", "test")


class ManifestError(ValueError):
    pass


class WavError(ValueError):
    pass


@dataclass(frozen=True)
class Utterance:
    id: str
    wav_path: Path
    split: str
    arousal: float | None = None
    valence: float | None = None

    @property
    def labeled(self) -> bool:
        return self.arousal is not None and self.valence is not None

    def label(self, target: str) -> float | None:
        if target not in ("arousal", "valence"):
            raise ValueError(f"unknown target {target!r}")
        return getattr(self, target)


@dataclass(frozen=True)
class Signal:
    samples: np.ndarray
    sample_rate: int = CANONICAL_RATE

    def __post_init__(self):
        x = np.array(self.samples, dtype=float)
        if x.ndim != 1 or x.size == 0:
            raise ValueError("signal must be a non-empty 1-D sequence")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)

    def __len__(self):
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass(frozen=True)
class FrameConfig:
    window_len: int = 200
    hop: int = 80

    def __post_init__(self):
        if not (0 < self.hop <= self.window_len):
            raise ValueError("FrameConfig requires 0 < hop <= window_len")


@dataclass(frozen=True)
class FrameSeries:
    frames: np.ndarray  # (n_frames, window_len), read-only
    sample_rate: int = CANONICAL_RATE
    hop: int = field(default=80, compare=False)

    def __len__(self):
        return self.frames.shape[0]


def _parse_label(text, name, lo, hi, lineno):
    text = text.strip()
    if text == "":
        return None
    try:
        value = float(text)
    except ValueError:
        raise ManifestError(f"line {lineno}: unparseable {name} {text!r}") from None
    if not math.isfinite(value) or not lo <= value <= hi:
        raise ManifestError(f"line {lineno}: {name} label out of range: {value}")
    return value


def load_manifest(path) -> list[Utterance]:
    """Read a manifest CSV into a list of :class:`Utterance`.

    Relative ``wav_path`` entries are resolved against the manifest's
    directory. Empty label cells are accepted for the test split only.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"manifest not found: {path}")
    base = path.parent
    out: list[Utterance] = []
    seen: set[str] = set()
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != MANIFEST_HEADER:
            raise ManifestError(f"bad manifest header: {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(MANIFEST_HEADER):
                raise ManifestError(
                    f"line {lineno}: expected {len(MANIFEST_HEADER)} columns, got {len(row)}"
                )
            uid, wav, split, a_txt, v_txt = (c.strip() for c in row)
            if not uid:
                raise ManifestError(f"line {lineno}: empty utterance_id")
            if uid in seen:
                raise ManifestError(f"line {lineno}: duplicate utterance_id {uid!r}")
            if split not in SPLITS:
                raise ManifestError(f"line {lineno}: unknown split {split!r}")
            arousal = _parse_label(a_txt, "arousal", 0.0, 1.0, lineno)
            valence = _parse_label(v_txt, "valence", -1.0, 1.0, lineno)
            if split != "test" and (arousal is None or valence is None):
                raise ManifestError(f"line {lineno}: split {split} requires both labels")
            seen.add(uid)
            wav_path = Path(wav)
            if not wav_path.is_absolute():
                wav_path = base / wav_path
            out.append(Utterance(uid, wav_path, split, arousal, valence))
    return out


def resample_linear(x, src_rate, dst_rate):
    """Linear-interpolation resampler; keeps the first sample and, when the
    duration maps onto the target grid, the last one too."""
    x = np.asarray(x, dtype=float)
    if src_rate == dst_rate or x.size < 2:
        return x.copy()
    n_out = int(math.floor((x.size - 1) * dst_rate / src_rate + 1e-9)) + 1
    pos = np.arange(n_out) * (src_rate / dst_rate)
    return np.interp(pos, np.arange(x.size), x)


def read_wav(path, target_rate=CANONICAL_RATE) -> Signal:
    """Decode a 16-bit PCM WAV file to a mono :class:`Signal` at ``target_rate``."""
    try:
        with wave.open(str(path), "rb") as wf:
            n_channels = wf.getnchannels()
            width = wf.getsampwidth()
            rate = wf.getframerate()
            n_frames = wf.getnframes()
            raw = wf.readframes(n_frames)
    except wave.Error as exc:
        raise WavError(f"{path}: {exc}") from None
    except EOFError:
        raise WavError(f"{path}: truncated container") from None
    if width != 2:
        raise WavError(f"{path}: only 16-bit PCM is supported (got {8 * width}-bit)")
    if n_channels not in (1, 2):
        raise WavError(f"{path}: unsupported channel count {n_channels}")
    if n_frames == 0:
        raise WavError(f"{path}: empty data chunk")
    block = width * n_channels
    if len(raw) < n_frames * block:
        raise WavError(f"{path}: truncated data chunk")
    pcm = np.frombuffer(raw, dtype="<i2").astype(float) / 32768.0
    pcm = pcm.reshape(-1, n_channels).mean(axis=1)
    return Signal(resample_linear(pcm, rate, target_rate), target_rate)


def write_wav(path, samples, sample_rate=CANONICAL_RATE):
    """Write mono float samples in [-1, 1] as 16-bit PCM."""
    x = np.clip(np.asarray(samples, dtype=float), -1.0, 32767 / 32768)
    pcm = np.round(x * 32768).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(int(sample_rate))
        wf.writeframes(pcm.tobytes())


def frame_signal(signal: Signal, cfg: FrameConfig = FrameConfig()) -> FrameSeries:
    x = signal.samples
    w, h = cfg.window_len, cfg.hop
    if x.size < w:
        frames = np.zeros((1, w))
        frames[0, : x.size] = x
    else:
        n = (x.size - w) // h + 1
        idx = np.arange(w)[None, :] + h * np.arange(n)[:, None]
        frames = x[idx]
    frames.setflags(write=False)
    return FrameSeries(frames, signal.sample_rate, h)
