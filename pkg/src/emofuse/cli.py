"""Command-line pipeline: extract -> train -> predict -> fuse -> eval.

Exit codes: 0 success, 2 some input rows were skipped, 3 contract violation
(bad or inconsistent inputs; nothing partial is written).
"""

from __future__ import annotations

import argparse
import logging
import sys
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import formats
from .aggregate import N_FEATURES, extract_features
from .config import PipelineConfig, load_config
from .dataset import WavError, load_manifest, read_wav
from .fusion import PredictionSet, smlr_fuse
from .metrics import DegenerateWarning, ccc, mse, pearson
from .preprocess import fit_scaler, transform
from .relieff import rrelieff
from .svr import model_select, predict_full

log = logging.getLogger("emofuse")

TARGETS = ("arousal", "valence")
EXIT_OK, EXIT_PARTIAL, EXIT_CONTRACT = 0, 2, 3


class ContractError(Exception):
    pass


def _targets(args):
    return (args.target,) if args.target else TARGETS


def _path(value, cfg_value, flag):
    chosen = value or cfg_value
    if not chosen:
        raise ContractError(f"missing {flag}")
    return Path(chosen)


def cmd_extract(args, cfg: PipelineConfig) -> int:
    manifest = load_manifest(_path(args.manifest, cfg.manifest, "--manifest"))
    out = _path(args.out, cfg.features, "--out")
    ids, rows, skipped = [], [], []
    for utt in manifest:
        try:
            signal = read_wav(utt.wav_path)
        except (OSError, WavError) as exc:
            log.error("skipping %s: %s", utt.id, exc)
            skipped.append(utt.id)
            continue
        ids.append(utt.id)
        rows.append(extract_features(signal, cfg.extraction))
    formats.write_features(out, ids, np.array(rows).reshape(len(rows), N_FEATURES))
    log.info("wrote %d feature rows to %s", len(ids), out)
    return EXIT_PARTIAL if skipped else EXIT_OK


def _split_matrix(ids, X, manifest, split, target):
    index = {u.id: u for u in manifest}
    keep = [i for i, uid in enumerate(ids) if uid in index and index[uid].split == split]
    y = np.array([index[ids[i]].label(target) for i in keep], dtype=float)
    return X[keep], y


def cmd_train(args, cfg: PipelineConfig) -> int:
    ids, X = formats.read_features(_path(args.features, cfg.features, "--features"))
    manifest = load_manifest(_path(args.manifest, cfg.manifest, "--manifest"))
    out = _path(args.out, cfg.models, "--out")
    index = {u.id: u for u in manifest}
    train_rows = [i for i, uid in enumerate(ids) if uid in index and index[uid].split == "train"]
    if not train_rows:
        raise ContractError("no training utterances in the feature file")
    scaler = fit_scaler(X[train_rows], cfg.clip_low, cfg.clip_high)
    Xs = transform(X, scaler)

    results = {}
    for target in _targets(args):
        Xt, yt = _split_matrix(ids, Xs, manifest, "train", target)
        Xv, yv = _split_matrix(ids, Xs, manifest, "validation", target)
        if Xv.shape[0] == 0:
            raise ContractError("no validation utterances in the feature file")
        if Xt.shape[0] <= cfg.relieff_k:
            raise ContractError(f"need more than relieff_k={cfg.relieff_k} training rows")
        ranking = rrelieff(Xt, yt, cfg.relieff)
        sel = model_select(Xt, yt, Xv, yv, ranking, cfg.grid)
        log.info(
            "%s: k=%d C=%g eps=%g gamma=%s val CCC=%.4f",
            target, sel.k, sel.hyper.C, sel.hyper.epsilon, sel.hyper.gamma, sel.val_ccc,
        )
        results[target] = (ranking, sel)

    formats.write_scaler(out / "scaler.csv", scaler)
    for target, (ranking, sel) in results.items():
        formats.write_ranking(out / f"ranking_{target}.csv", ranking)
        formats.write_selection_log(out / f"selection_{target}.csv", sel.log)
        formats.save_model(out / f"svr_{target}.json", sel.model, target)
    return EXIT_OK


def cmd_predict(args, cfg: PipelineConfig) -> int:
    models = _path(args.models, cfg.models, "--models")
    out = _path(args.out, cfg.predictions, "--out")
    try:
        ids, X = formats.read_features(_path(args.features, cfg.features, "--features"))
    except formats.FormatError as exc:
        raise ContractError(str(exc)) from None
    scaler = formats.read_scaler(models / "scaler.csv")
    if scaler.n_features != X.shape[1]:
        raise ContractError(f"scaler expects {scaler.n_features} features, file has {X.shape[1]}")
    Xs = transform(X, scaler)
    preds = {}
    for target in _targets(args):
        path = models / f"svr_{target}.json"
        if not path.exists():
            if args.target:
                raise ContractError(f"no model for {target} in {models}")
            continue
        preds[target] = predict_full(formats.load_model(path), Xs)
    if not preds:
        raise ContractError(f"no models found in {models}")
    for target, values in preds.items():
        formats.write_predictions(out / target / f"{args.name}.csv", ids, values)
    return EXIT_OK


def load_prediction_dir(directory, keep_ids=None) -> PredictionSet:
    """Read every ``<model>.csv`` in ``directory`` and align them by utterance id.

    ``keep_ids`` optionally restricts the rows to a subset of utterances.
    """
    files = sorted(Path(directory).glob("*.csv"))
    if not files:
        raise ContractError(f"no prediction files in {directory}")
    names, rows, ref = [], [], None
    for f in files:
        ids, values = formats.read_predictions(f)
        table = dict(zip(ids, values))
        if ref is None:
            ref = sorted(ids)
        elif sorted(ids) != ref:
            raise ContractError(f"{f.name}: utterance ids do not match {files[0].name}")
        names.append(f.stem)
        rows.append([table[u] for u in ref])
    if keep_ids is not None:
        cols = [c for c, u in enumerate(ref) if u in keep_ids]
        ref = [ref[c] for c in cols]
        rows = [[r[c] for c in cols] for r in rows]
    return PredictionSet(tuple(names), tuple(ref), np.array(rows))


def cmd_fuse(args, cfg: PipelineConfig) -> int:
    pred_dir = _path(args.predictions, cfg.predictions, "--predictions")
    out = _path(args.out, cfg.out, "--out")
    targets = _targets(args) if args.target else tuple(
        t for t in TARGETS if (pred_dir / t).is_dir()
    )
    if not targets:
        raise ContractError(f"no target directories under {pred_dir}")
    keep_ids = None
    if args.split:
        manifest = load_manifest(_path(args.manifest, cfg.manifest, "--manifest"))
        keep_ids = {u.id for u in manifest if u.split == args.split}
    results = {}
    for target in targets:
        preds = load_prediction_dir(pred_dir / target, keep_ids)
        exclude = list(args.exclude or ()) if args.target else []
        exclude += [e for e in cfg.exclusions(target) if e not in exclude]
        try:
            results[target] = smlr_fuse(preds, exclude)
        except ValueError as exc:
            raise ContractError(f"{target}: {exc}") from None
    for target, res in results.items():
        formats.write_predictions(out / target / f"{args.name}.csv", res.utterance_ids, res.fused)
        formats.write_weights(
            out / f"{args.name}_{target}_weights.csv",
            res.model_names,
            res.weights,
            res.accuracy_estimates,
        )
        log.info(
            "%s weights: %s",
            target,
            ", ".join(f"{n}={w:.3f}" for n, w in zip(res.model_names, res.weights)),
        )
    return EXIT_OK


def cmd_eval(args, cfg: PipelineConfig) -> int:
    manifest = load_manifest(_path(args.manifest, cfg.manifest, "--manifest"))
    index = {u.id: u for u in manifest}
    dirs = [Path(p) for p in args.predictions or ([cfg.predictions] if cfg.predictions else [])]
    if not dirs:
        raise ContractError("missing --predictions")
    rows = []
    for target in _targets(args):
        for d in dirs:
            for f in sorted((d / target).glob("*.csv")):
                ids, values = formats.read_predictions(f)
                pairs = [
                    (index[u].label(target), v)
                    for u, v in zip(ids, values)
                    if u in index and index[u].split == args.split
                ]
                if len(pairs) < 2:
                    raise ContractError(f"{f}: fewer than 2 {args.split} utterances")
                if any(y is None for y, _ in pairs):
                    raise ContractError(f"{f}: missing {target} labels in the {args.split} split")
                y, yh = np.array(pairs).T
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", DegenerateWarning)
                    r = pearson(y, yh)
                rows.append(
                    dict(model=f.stem, target=target, ccc=ccc(y, yh), mse=mse(y, yh), pearson=r, n=len(y))
                )
    if not rows:
        raise ContractError("no prediction files found")
    out = _path(args.out, cfg.out, "--out")
    formats.write_report(out, rows)
    for r in rows:
        log.info("%-14s %-8s CCC=%.4f MSE=%.4f", r["model"], r["target"], r["ccc"], r["mse"])
    return EXIT_OK


def cmd_synth(args, cfg: PipelineConfig) -> int:
    from .synthetic import make_mini_dataset

    out = _path(args.out, cfg.out, "--out")
    make_mini_dataset(out, args.n_train, args.n_val, args.n_test, seed=cfg.seed)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--seed", type=int, help="overrides the config seed")
    common.add_argument("--target", choices=TARGETS, help="restrict to one target")
    common.add_argument("--out", help="output file or directory")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="emofuse", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("extract", parents=[common], help="76 audio features per utterance")
    s.add_argument("--manifest")
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("train", parents=[common], help="scale, rank and select SVR models")
    s.add_argument("--manifest")
    s.add_argument("--features")
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("predict", parents=[common], help="write per-target prediction CSVs")
    s.add_argument("--models")
    s.add_argument("--features")
    s.add_argument("--name", default="svr_audio", help="model name used as the file stem")
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("fuse", parents=[common], help="SMLR fusion of base predictions")
    s.add_argument("--predictions", help="directory with <target>/<model>.csv files")
    s.add_argument("--exclude", action="append", metavar="MODEL", help="repeatable; needs --target")
    s.add_argument("--name", default="smlr")
    s.add_argument("--manifest", help="with --split: fuse only that split's utterances")
    s.add_argument("--split", choices=("train", "validation", "test"))
    s.set_defaults(func=cmd_fuse)

    s = sub.add_parser("eval", parents=[common], help="CCC/MSE report per model and target")
    s.add_argument("--manifest")
    s.add_argument("--predictions", action="append", help="repeatable prediction directory")
    s.add_argument("--split", default="validation", choices=("train", "validation", "test"))
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("synth", parents=[common], help="write the synthetic mini-dataset")
    s.add_argument("--n-train", type=int, default=40)
    s.add_argument("--n-val", type=int, default=20)
    s.add_argument("--n-test", type=int, default=10)
    s.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = load_config(args.config) if args.config else PipelineConfig()
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        if args.command == "fuse" and args.exclude and not args.target:
            raise ContractError("--exclude is per target; pass --target as well")
        return args.func(args, cfg)
    except (ContractError, ValueError, FileNotFoundError) as exc:
        log.error("%s", exc)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
