"""Binary classification metrics and seed aggregation.

The positive class (label 1) is "Hamiltonian".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def _pair(labels, preds):
    y = np.asarray(labels).astype(bool).ravel()
    p = np.asarray(preds).astype(bool).ravel()
    if len(y) != len(p):
        raise ValueError(f"length mismatch: {len(y)} labels vs {len(p)} predictions")
    if len(y) == 0:
        raise ValueError("metrics need at least one sample")
    return y, p


def confusion(labels, preds) -> dict[str, int]:
    y, p = _pair(labels, preds)
    return {
        "tp": int(np.sum(y & p)),
        "fp": int(np.sum(~y & p)),
        "fn": int(np.sum(y & ~p)),
        "tn": int(np.sum(~y & ~p)),
    }


def accuracy(labels, preds) -> float:
    y, p = _pair(labels, preds)
    return float(np.mean(y == p))


def f1(labels, preds) -> float:
    """F1 of the positive class; 0 when precision or recall is undefined."""
    c = confusion(labels, preds)
    tp, fp, fn = c["tp"], c["fp"], c["fn"]
    if tp == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2 * precision * recall / (precision + recall)


def auc(labels, scores) -> float:
    """ROC AUC in Mann-Whitney form: P(pos > neg) + P(tie) / 2."""
    y = np.asarray(labels).astype(bool).ravel()
    s = np.asarray(scores, dtype=np.float64).ravel()
    if len(y) != len(s):
        raise ValueError(f"length mismatch: {len(y)} labels vs {len(s)} scores")
    npos = int(y.sum())
    nneg = len(y) - npos
    if npos == 0 or nneg == 0:
        raise ValueError("AUC is undefined unless both classes are present")
    # midranks handle ties
    order = np.argsort(s, kind="mergesort")
    sorted_s = s[order]
    ranks = np.empty(len(s))
    i = 0
    while i < len(s):
        j = i
        while j + 1 < len(s) and sorted_s[j + 1] == sorted_s[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    u = ranks[y].sum() - npos * (npos + 1) / 2.0
    return float(u / (npos * nneg))


def evaluate(labels, preds, scores) -> dict:
    """Per-seed report: metrics plus confusion counts. AUC is NaN for a
    single-class test set."""
    try:
        a = auc(labels, scores)
    except ValueError:
        a = math.nan
    return {
        "auc": a,
        "accuracy": accuracy(labels, preds),
        "f1": f1(labels, preds),
        "confusion": confusion(labels, preds),
    }


@dataclass
class EvalReport:
    """Mean and population standard deviation of each metric over seeds."""

    mean: dict
    std: dict
    per_seed: list = field(default_factory=list)

    METRICS = ("auc", "accuracy", "f1")

    def cell(self, metric: str, digits: int = 2) -> str:
        return f"{self.mean[metric]:.{digits}f} ± {self.std[metric]:.{digits}f}"


def aggregate(per_seed) -> EvalReport:
    """Combine per-seed reports (dicts with auc/accuracy/f1, or bare floats)."""
    per_seed = list(per_seed)
    if not per_seed:
        raise ValueError("need at least one per-seed report")
    if not isinstance(per_seed[0], dict):
        vals = np.asarray(per_seed, dtype=np.float64)
        return EvalReport({"value": float(vals.mean())}, {"value": float(vals.std())}, per_seed)
    mean, std = {}, {}
    for m in EvalReport.METRICS:
        vals = np.asarray([r[m] for r in per_seed], dtype=np.float64)
        mean[m] = float(vals.mean())
        std[m] = float(vals.std())
    return EvalReport(mean, std, per_seed)
