"""On-disk formats: feature, scaler, ranking, prediction and report CSVs, and
the JSON model bundle.

Floats are written with ``repr`` so files round-trip exactly and reruns are
byte-identical.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .aggregate import FEATURE_NAMES
from .preprocess import ScalerParams
from .relieff import FeatureRanking
from .svr import SvrHyper, SvrModel

FEATURE_HEADER = ["utterance_id", *FEATURE_NAMES]
SCALER_HEADER = ["feature_index", "p_low", "p_high", "min", "max"]
RANKING_HEADER = ["rank", "feature_index", "feature_name", "weight"]
PREDICTION_HEADER = ["utterance_id", "prediction"]
REPORT_HEADER = ["model", "target", "ccc", "mse", "pearson", "n"]
WEIGHTS_HEADER = ["model", "weight", "accuracy_estimate"]
SELECTION_HEADER = ["k", "kernel", "C", "epsilon", "gamma", "val_ccc", "kkt_violation"]
MODEL_FORMAT = "emofuse-svr/1"


class FormatError(ValueError):
    pass


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    v = float(x)
    return "" if np.isnan(v) else repr(v)


def _write_rows(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def _read_rows(path, header):
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        got = next(reader, None)
        if got != list(header):
            raise FormatError(f"{path}: unexpected header {got!r}")
        rows = [r for r in reader if r]
    for i, r in enumerate(rows, start=2):
        if len(r) != len(header):
            raise FormatError(f"{path}:{i}: expected {len(header)} columns, got {len(r)}")
    return rows


def write_features(path, ids, X):
    X = np.asarray(X, dtype=float)
    _write_rows(path, FEATURE_HEADER, ([uid, *row] for uid, row in zip(ids, X)))


def read_features(path):
    """Return ``(ids, X)``; rejects files whose header is not the 76-feature layout."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), None)
    if header is None or header[:1] != ["utterance_id"]:
        raise FormatError(f"{path}: not a feature file")
    if header != FEATURE_HEADER:
        raise FormatError(f"{path}: expected {len(FEATURE_NAMES)} named features, got {len(header) - 1} columns")
    rows = _read_rows(path, FEATURE_HEADER)
    ids = [r[0] for r in rows]
    X = np.array([[float(v) for v in r[1:]] for r in rows]).reshape(len(rows), len(FEATURE_NAMES))
    return ids, X


def write_scaler(path, params: ScalerParams):
    rows = zip(range(params.n_features), params.p_low, params.p_high, params.min, params.max)
    _write_rows(path, SCALER_HEADER, rows)


def read_scaler(path) -> ScalerParams:
    rows = _read_rows(path, SCALER_HEADER)
    a = np.array([[float(v) for v in r[1:]] for r in rows]).reshape(-1, 4)
    return ScalerParams(a[:, 0], a[:, 1], a[:, 2], a[:, 3])


def write_ranking(path, ranking: FeatureRanking, names=FEATURE_NAMES):
    rows = (
        (rank, int(f), names[f], ranking.weights[f])
        for rank, f in enumerate(ranking.order, start=1)
    )
    _write_rows(path, RANKING_HEADER, rows)


def read_ranking(path) -> FeatureRanking:
    rows = _read_rows(path, RANKING_HEADER)
    w = np.zeros(len(rows))
    for r in rows:
        w[int(r[1])] = float(r[3])
    return FeatureRanking(w, np.array([int(r[1]) for r in rows]))


def write_predictions(path, ids, values):
    _write_rows(path, PREDICTION_HEADER, zip(ids, np.asarray(values, dtype=float)))


def read_predictions(path):
    rows = _read_rows(path, PREDICTION_HEADER)
    ids = [r[0] for r in rows]
    if len(set(ids)) != len(ids):
        raise FormatError(f"{path}: duplicate utterance ids")
    try:
        values = np.array([float(r[1]) for r in rows])
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    return ids, values


def write_selection_log(path, log):
    _write_rows(path, SELECTION_HEADER, ([row[k] for k in SELECTION_HEADER] for row in log))


def write_weights(path, names, weights, accuracies):
    _write_rows(path, WEIGHTS_HEADER, zip(names, weights, accuracies))


def write_report(path, rows):
    _write_rows(path, REPORT_HEADER, ([row[k] for k in REPORT_HEADER] for row in rows))


def read_report(path):
    rows = _read_rows(path, REPORT_HEADER)
    return [dict(zip(REPORT_HEADER, r)) for r in rows]


def save_model(path, model: SvrModel, target=None):
    """JSON bundle: hyperparameters, selected feature columns, support
    vectors with their ``beta`` coefficients, bias and solver diagnostics."""
    h = model.hyper
    doc = {
        "format": MODEL_FORMAT,
        "target": target,
        "hyper": {"kernel": h.kernel, "C": h.C, "epsilon": h.epsilon, "gamma": h.gamma},
        "feature_indices": None
        if model.feature_indices is None
        else [int(i) for i in model.feature_indices],
        "bias": float(model.bias),
        "beta": [float(b) for b in model.beta],
        "support_vectors": [[float(v) for v in row] for row in model.support_vectors],
        "n_features": int(model.n_features),
        "kkt_violation": float(model.kkt_violation),
        "n_iter": int(model.n_iter),
        "converged": bool(model.converged),
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def load_model(path) -> SvrModel:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != MODEL_FORMAT:
        raise FormatError(f"{path}: not an {MODEL_FORMAT} bundle")
    h = doc["hyper"]
    d = doc["n_features"]
    sv = np.array(doc["support_vectors"], dtype=float).reshape(-1, d)
    fi = doc["feature_indices"]
    return SvrModel(
        support_vectors=sv,
        beta=np.array(doc["beta"], dtype=float),
        bias=doc["bias"],
        hyper=SvrHyper(h["kernel"], h["C"], h["epsilon"], h["gamma"]),
        feature_indices=None if fi is None else np.array(fi, dtype=int),
        kkt_violation=doc["kkt_violation"],
        n_iter=doc["n_iter"],
        converged=doc["converged"],
    )
