"""In-memory experiment runs: render a corpus, train per seed, evaluate."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from . import baseline, classifier, metrics
from .dataset import SplitSpec, split
from .layout import LayoutSpec, make_layout
from .raster import RenderSpec, render

log = logging.getLogger(__name__)


@dataclass
class SeedOutcome:
    seed: int
    report: dict
    baseline_report: dict
    train: classifier.TrainResult


def render_record(args) -> np.ndarray:
    """Pixels for one ``(index, graph, layout_spec, render_spec)`` job."""
    index, g, lspec, rspec = args
    return render(g, make_layout(g.n, lspec, index), rspec, index).pixels


def render_corpus(records, lspec: LayoutSpec, rspec: RenderSpec, indices=None, workers: int = 1) -> dict:
    """Render selected corpus records; returns ``{index: pixels}``."""
    indices = range(len(records)) if indices is None else sorted(set(indices))
    jobs = [(i, records[i].graph, lspec, rspec) for i in indices]
    if workers > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as pool:
            images = list(pool.map(render_record, jobs, chunksize=16))
    else:
        images = [render_record(j) for j in jobs]
    return {j[0]: img for j, img in zip(jobs, images)}


def tensors(images: dict, records, indices, cfg: classifier.TrainConfig):
    x = np.stack([classifier.preprocess(images[i], cfg) for i in indices])
    y = np.array([int(records[i].label) for i in indices], dtype=np.int64)
    return x, y


def run_seed(records, images: dict, split_spec: SplitSpec, train_cfg: classifier.TrainConfig,
             seed: int) -> SeedOutcome:
    """Split with ``seed``, train a fresh model with ``seed`` and evaluate it on the test split."""
    parts = split(records, replace(split_spec, seed=seed))
    cfg = replace(train_cfg, seed=seed)
    xt, yt = tensors(images, records, parts.train, cfg)
    xv, yv = tensors(images, records, parts.val, cfg)
    xs, ys = tensors(images, records, parts.test, cfg)
    model = classifier.init_model(seed)
    result = classifier.train(model, (xt, yt), (xv, yv), cfg)
    labels, scores = classifier.predict(result.model, xs)
    report = metrics.evaluate(ys, labels, scores)

    prior = baseline.fit_prior(np.concatenate([yt, yv]), seed)
    blabels, bscores = baseline.predict(prior, len(ys))
    breport = metrics.evaluate(ys, blabels, bscores)
    log.info("seed %d: f1 %.3f (baseline %.3f), best epoch %d/%d",
             seed, report["f1"], breport["f1"], result.best_epoch, len(result.history))
    return SeedOutcome(seed, report, breport, result)


def run_experiment(records, lspec: LayoutSpec, rspec: RenderSpec, split_spec: SplitSpec,
                   train_cfg: classifier.TrainConfig, seeds, workers: int = 1):
    """Full protocol over ``seeds``; returns (model report, baseline report, outcomes)."""
    images = render_corpus(records, lspec, rspec, workers=workers)
    outcomes = [run_seed(records, images, split_spec, train_cfg, s) for s in seeds]
    return (
        metrics.aggregate([o.report for o in outcomes]),
        metrics.aggregate([o.baseline_report for o in outcomes]),
        outcomes,
    )
