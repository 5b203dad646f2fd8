"""``vnsolve`` command line: gen, label, render, train, eval, report.

Each stage reads only the files written by the previous one under the
config's work directory::

    corpus.tsv                       gen
    labeled.tsv                      label
    images/<variant>/seed-<s>/<split>/<label>/<index>.png      render
    models/<variant>/seed-<s>/{model.ckpt,history.csv}         train
    eval/<variant>/seed-<s>.json, eval/<variant>/summary.csv   eval
    report.csv, report.txt                                     report
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import baseline, classifier, metrics
from .config import ConfigError, ExperimentConfig, load_config, sweep_points
from .dataset import (build_corpus, label_records, read_manifest, split,
                      write_manifest)
from .experiment import render_corpus
from .raster import Image, decode_png, encode_png

log = logging.getLogger("vnsolve")

SPLITS = ("train", "val", "test")


def workers() -> int:
    raw = os.environ.get("VNSOLVE_WORKERS")
    if raw:
        return max(1, int(raw))
    return os.cpu_count() or 1


def _require(path: Path, stage: str) -> Path:
    if not path.exists():
        raise FileNotFoundError(f"missing {path}; run `vnsolve {stage}` first")
    return path


def _write_if_changed(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.exists() and path.read_bytes() == data:
        return
    path.write_bytes(data)


def _dump_json(obj) -> bytes:
    return (json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n").encode()


# stages ------------------------------------------------------------------------

def cmd_gen(cfg: ExperimentConfig) -> Path:
    out = cfg.workdir / "corpus.tsv"
    records = build_corpus(cfg.corpus)
    cfg.workdir.mkdir(parents=True, exist_ok=True)
    write_manifest(out, records)
    log.info("wrote %d records to %s", len(records), out)
    return out


def cmd_label(cfg: ExperimentConfig) -> Path:
    src = _require(cfg.workdir / "corpus.tsv", "gen")
    out = cfg.workdir / "labeled.tsv"
    records = label_records(read_manifest(src), cfg.corpus.budget, workers())
    write_manifest(out, records)
    pos = sum(r.label for r in records)
    log.info("labelled %d graphs (%d Hamiltonian) -> %s", len(records), pos, out)
    return out


def _labeled(cfg: ExperimentConfig):
    return read_manifest(_require(cfg.workdir / "labeled.tsv", "label"))


def _image_dir(cfg: ExperimentConfig, seed: int) -> Path:
    return cfg.workdir / "images" / cfg.variant / f"seed-{seed}"


def cmd_render(cfg: ExperimentConfig) -> Path:
    records = _labeled(cfg)
    plan = {s: split(records, replace(cfg.split, seed=s)) for s in cfg.seeds}
    needed = sorted({i for parts in plan.values() for name in SPLITS for i in getattr(parts, name)})
    images = render_corpus(records, cfg.layout, cfg.render, needed, workers())
    blobs = {i: encode_png(Image(px)) for i, px in images.items()}
    for seed, parts in plan.items():
        root = _image_dir(cfg, seed)
        for name in SPLITS:
            for i in getattr(parts, name):
                _write_if_changed(root / name / str(int(records[i].label)) / f"{i}.png", blobs[i])
    log.info("rendered %d graphs for %d seed(s) under %s", len(blobs), len(plan),
             cfg.workdir / "images" / cfg.variant)
    return cfg.workdir / "images" / cfg.variant


def _load_split(root: Path, name: str, cfg: classifier.TrainConfig):
    """Tensors, labels and graph indices of one rendered split directory."""
    files = []
    for lab in ("0", "1"):
        d = root / name / lab
        if d.is_dir():
            files += [(int(p.stem), int(lab), p) for p in d.glob("*.png")]
    files.sort()
    if not files:
        return np.empty((0, 3, 1, 1)), np.empty(0, dtype=np.int64), []
    x = np.stack([classifier.preprocess(decode_png(p.read_bytes()), cfg) for _, _, p in files])
    y = np.array([lab for _, lab, _ in files], dtype=np.int64)
    return x, y, [i for i, _, _ in files]


def _model_dir(cfg: ExperimentConfig, seed: int) -> Path:
    return cfg.workdir / "models" / cfg.variant / f"seed-{seed}"


def cmd_train(cfg: ExperimentConfig) -> Path:
    for seed in cfg.seeds:
        root = _require(_image_dir(cfg, seed), "render")
        tcfg = replace(cfg.train, seed=seed)
        xt, yt, _ = _load_split(root, "train", tcfg)
        xv, yv, _ = _load_split(root, "val", tcfg)
        if len(yt) == 0 or len(yv) == 0:
            raise ValueError(f"{root}: train and val splits must be nonempty to train")
        result = classifier.train(classifier.init_model(seed), (xt, yt), (xv, yv), tcfg)
        out = _model_dir(cfg, seed)
        out.mkdir(parents=True, exist_ok=True)
        classifier.save_checkpoint(out / "model.ckpt", result.model, tcfg,
                                   best_epoch=result.best_epoch, best_val_f1=result.best_val_f1,
                                   variant=cfg.variant)
        classifier.write_history(out / "history.csv", result.history)
        log.info("seed %d: best val F1 %.4f at epoch %d of %d", seed, result.best_val_f1,
                 result.best_epoch, len(result.history))
    return cfg.workdir / "models" / cfg.variant


def _eval_dir(cfg: ExperimentConfig) -> Path:
    return cfg.workdir / "eval" / cfg.variant


def cmd_eval(cfg: ExperimentConfig) -> metrics.EvalReport:
    reports, base_reports = [], []
    for seed in cfg.seeds:
        root = _require(_image_dir(cfg, seed), "render")
        model, _ = classifier.load_checkpoint(_require(_model_dir(cfg, seed) / "model.ckpt", "train"))
        tcfg = replace(cfg.train, seed=seed)
        xs, ys, idx = _load_split(root, "test", tcfg)
        if len(ys) == 0:
            raise ValueError(f"{root}: empty test split")
        labels, scores = classifier.predict(model, xs)
        rep = metrics.evaluate(ys, labels, scores)

        _, yt, _ = _load_split(root, "train", tcfg)
        _, yv, _ = _load_split(root, "val", tcfg)
        prior = baseline.fit_prior(np.concatenate([yt, yv]), seed)
        blabels, bscores = baseline.predict(prior, len(ys))
        brep = metrics.evaluate(ys, blabels, bscores)
        reports.append(rep)
        base_reports.append(brep)

        out = _eval_dir(cfg)
        doc = {"seed": seed, "config": cfg.describe(), "model": rep, "baseline": brep,
               "prior": prior.p_positive}
        _write_if_changed(out / f"seed-{seed}.json", _dump_json(doc))
        rows = ["graph_index,label,pred,score"] + [
            f"{i},{y},{p},{s!r}" for i, y, p, s in zip(idx, ys, labels, scores.tolist())]
        _write_if_changed(out / f"predictions-seed-{seed}.csv", ("\n".join(rows) + "\n").encode())

    agg = metrics.aggregate(reports)
    bagg = metrics.aggregate(base_reports)
    lines = ["# mean and population std over seeds " + " ".join(map(str, cfg.seeds)),
             "method,auc_mean,auc_std,accuracy_mean,accuracy_std,f1_mean,f1_std"]
    for name, r in (("vn-solver", agg), ("naive-bayesian", bagg)):
        cells = [f"{r.mean[m]!r},{r.std[m]!r}" for m in metrics.EvalReport.METRICS]
        lines.append(name + "," + ",".join(cells))
    _write_if_changed(_eval_dir(cfg) / "summary.csv", ("\n".join(lines) + "\n").encode())
    log.info("%s: AUC %s  acc %s  F1 %s", cfg.variant, agg.cell("auc"), agg.cell("accuracy"), agg.cell("f1"))
    return agg


def cmd_sweep(cfg: ExperimentConfig, name: str) -> Path:
    """Render, train and evaluate every point of ``[sweep.<name>]``."""
    rows = []
    keys = list(cfg.sweeps.get(name, {}))
    for assignment, point in sweep_points(cfg, name):
        log.info("sweep %s: %s", name, assignment)
        cmd_render(point)
        cmd_train(point)
        rep = cmd_eval(point)
        rows.append([assignment[k] for k in keys] + [point.variant] + [
            f"{rep.mean[m]!r},{rep.std[m]!r}" for m in metrics.EvalReport.METRICS])
    header = keys + ["variant", "auc_mean,auc_std,accuracy_mean,accuracy_std,f1_mean,f1_std"]
    text = ",".join(header) + "\n" + "".join(",".join(r) + "\n" for r in rows)
    out = cfg.workdir / "eval" / f"sweep-{name}.csv"
    _write_if_changed(out, text.encode())
    log.info("wrote %s", out)
    return out


def _fmt(vals) -> str:
    vals = [v for v in vals if not (isinstance(v, float) and math.isnan(v))]
    if not vals:
        return "n/a"
    a = np.asarray(vals, dtype=np.float64)
    return f"{a.mean():.2f} ± {a.std():.2f}"


def cmd_report(cfg: ExperimentConfig) -> Path:
    """Table-1 shaped grid over every evaluated variant in the work directory."""
    root = _require(cfg.workdir / "eval", "eval")
    groups: dict = {}
    for path in sorted(root.glob("*/seed-*.json")):
        doc = json.loads(path.read_text())
        c = doc["config"]
        lay = c["layout"]["kind"]
        row = (lay, c["render"]["scheme"])
        size = c["split"]["train_total"]
        groups.setdefault((row, size), []).append(doc["model"])
        groups.setdefault((("naive-bayesian", ""), size), []).append(doc["baseline"])
    if not groups:
        raise FileNotFoundError(f"no evaluation files under {root}; run `vnsolve eval` first")
    sizes = sorted({size for _, size in groups})
    rows = sorted({row for row, _ in groups}, key=lambda r: (r[0] == "naive-bayesian", r[1], r[0]))

    csv_lines = []
    header = ["method", "scheme", "layout"] + [f"{s}:{m}" for s in sizes for m in metrics.EvalReport.METRICS]
    csv_lines.append(header)
    table = []
    for lay, scheme in rows:
        cells = []
        for s in sizes:
            reps = groups.get(((lay, scheme), s), [])
            for m in metrics.EvalReport.METRICS:
                cells.append(_fmt([r[m] for r in reps]) if reps else "")
        method = "Naive-Bayesian" if lay == "naive-bayesian" else "VN-Solver"
        layout = "" if lay == "naive-bayesian" else lay
        csv_lines.append([method, scheme, layout] + cells)
        table.append([method, scheme, layout] + cells)

    out_csv = cfg.workdir / "report.csv"
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(csv_lines)
    _write_if_changed(out_csv, buf.getvalue().encode())

    widths = [max(len(str(r[k])) for r in [header] + table) for k in range(len(header))]
    text = ["mean ± population std over seeds; columns are training size : metric",
            "  ".join(h.ljust(w) for h, w in zip(header, widths))]
    text += ["  ".join(str(c).ljust(w) for c, w in zip(r, widths)) for r in table]
    _write_if_changed(cfg.workdir / "report.txt", ("\n".join(text) + "\n").encode())
    print("\n".join(text))
    return out_csv


# entry point ---------------------------------------------------------------------

COMMANDS = ("gen", "label", "render", "train", "eval", "report")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vnsolve", description="Vision-based Hamiltonian-cycle classifier pipeline")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="experiment config file")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override one config key, e.g. render.scheme=uniform")
    p.add_argument("--sweep", metavar="NAME", help="with eval: run the [sweep.NAME] grid end to end")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    if not args.verbose:
        logging.getLogger("vnsolver.classifier").setLevel(logging.WARNING)
    try:
        cfg = load_config(args.config, args.set)
        if args.sweep and args.command != "eval":
            raise ConfigError("--sweep only applies to the eval command")
        if args.command == "gen":
            cmd_gen(cfg)
        elif args.command == "label":
            cmd_label(cfg)
        elif args.command == "render":
            cmd_render(cfg)
        elif args.command == "train":
            cmd_train(cfg)
        elif args.command == "eval":
            if args.sweep:
                cmd_sweep(cfg, args.sweep)
            else:
                cmd_eval(cfg)
        else:
            cmd_report(cfg)
    except ConfigError as exc:
        print(f"vnsolve: config error: {exc}", file=sys.stderr)
        return 2
    except (FileNotFoundError, ValueError, RuntimeError) as exc:
        print(f"vnsolve: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
