"""Deterministic synthetic mini-dataset for tests and demos.

Each utterance is a harmonic tone with pauses. Arousal raises pitch and
loudness and shortens pauses; valence tilts the harmonic spectrum. The
written labels add annotator-like noise to the values that shaped the
audio. A few simulated "external" base models (label plus noise) are also
written in the prediction CSV format so the fusion stage has peers.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .dataset import CANONICAL_RATE, MANIFEST_HEADER, write_wav
from .formats import write_predictions

LABEL_NOISE = (0.06, 0.15)  # annotator noise on arousal, valence
PEER_NOISE = {  # model -> (arousal sd, valence sd)
    "cnn_face": (0.14, 0.32),
    "cnn_visual": (0.22, 0.40),
    "lstm_visual": (0.12, 0.30),
}


def synth_utterance(arousal, valence, rng, duration=1.0, sr=CANONICAL_RATE):
    n = int(duration * sr)
    t = np.arange(n) / sr
    f0 = 110.0 + 160.0 * arousal + 30.0 * valence
    vibrato = 1.0 + 0.02 * np.sin(2 * np.pi * rng.uniform(3, 6) * t)
    phase = 2 * np.pi * np.cumsum(f0 * vibrato) / sr
    tilt = 1.6 - 0.8 * valence
    x = np.zeros(n)
    for h in range(1, 16):
        if h * f0 >= sr / 2 - 200:
            break
        x += np.sin(h * phase + rng.uniform(0, 2 * np.pi)) / h**tilt
    x /= np.max(np.abs(x)) + 1e-12
    x *= 0.05 + 0.35 * arousal

    # pauses: fewer and shorter when aroused
    gate = np.ones(n)
    n_pauses = int(round(4 - 3 * arousal))
    for _ in range(n_pauses):
        length = int(sr * rng.uniform(0.04, 0.12) * (1.2 - arousal))
        start = rng.integers(0, max(n - length, 1))
        gate[start : start + length] = 0.0
    gate = np.convolve(gate, np.ones(64) / 64, mode="same")
    x = x * gate + 0.003 * rng.standard_normal(n)
    return np.clip(x, -1.0, 1.0)


def make_mini_dataset(root, n_train=40, n_val=20, n_test=10, seed=0, duration=1.0):
    """Write WAVs, ``manifest.csv`` and peer prediction CSVs under ``root``.

    Returns the manifest path. Output is a pure function of the arguments.
    """
    root = Path(root)
    (root / "wav").mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    rows = []
    labels = {}
    splits = ["train"] * n_train + ["validation"] * n_val + ["test"] * n_test
    for i, split in enumerate(splits):
        uid = f"utt{i:03d}"
        a_true = rng.uniform(0.05, 0.95)
        v_true = rng.uniform(-0.9, 0.9)
        x = synth_utterance(a_true, v_true, rng, duration)
        write_wav(root / "wav" / f"{uid}.wav", x)
        a = float(np.round(np.clip(a_true + LABEL_NOISE[0] * rng.standard_normal(), 0, 1), 4))
        v = float(np.round(np.clip(v_true + LABEL_NOISE[1] * rng.standard_normal(), -1, 1), 4))
        labels[uid] = (a, v)
        rows.append([uid, f"wav/{uid}.wav", split, repr(a), repr(v)])

    with (root / "manifest.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MANIFEST_HEADER)
        w.writerows(rows)

    ids = [r[0] for r in rows]
    y = np.array([labels[u] for u in ids])
    for model, sds in PEER_NOISE.items():
        for t, (target, lo, hi) in enumerate((("arousal", 0, 1), ("valence", -1, 1))):
            pred = np.clip(y[:, t] + sds[t] * rng.standard_normal(len(ids)), lo, hi)
            write_predictions(root / "peers" / target / f"{model}.csv", ids, pred)
    return root / "manifest.csv"
