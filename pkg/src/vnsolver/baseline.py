"""Feature-oblivious prior classifier ("Naive-Bayesian" baseline)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng


@dataclass(frozen=True)
class Prior:
    p_positive: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p_positive <= 1.0:
            raise ValueError("p_positive must lie in [0, 1]")


def fit_prior(labels, seed: int = 0) -> Prior:
    labels = np.asarray(labels).astype(bool).ravel()
    if len(labels) == 0:
        raise ValueError("cannot estimate a prior from zero labels")
    return Prior(float(labels.sum()) / len(labels), seed)


def predict(prior: Prior, count: int, seed: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``count`` independent labels, each positive with probability
    ``p_positive``. Every score equals ``p_positive``, so the AUC is 0.5."""
    seed = prior.seed if seed is None else seed
    draws = rng.generator(seed, rng.STREAM_BASELINE).random(count)
    labels = (draws < prior.p_positive).astype(np.int64)
    return labels, np.full(count, prior.p_positive)
