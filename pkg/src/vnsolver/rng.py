"""Seeded generators.

Every random draw in the package goes through :func:`generator`, which wraps
numpy's Philox4x64 counter-based bit generator. Philox output is fixed by its
published algorithm, so equal seeds give equal streams on every platform.
Independent sub-streams are addressed by extra integer keys instead of by
reseeding.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


def generator(seed: int, *stream: int) -> np.random.Generator:
    """Generator for ``seed`` and an optional stream path (e.g. purpose, index)."""
    keys = [int(seed) & MASK64] + [int(s) & MASK64 for s in stream]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(keys)))


# stream identifiers, kept distinct so purposes never share draws
STREAM_LAYOUT = 1
STREAM_COLOR = 2
STREAM_GRAPH = 3
STREAM_CORPUS = 4
STREAM_SPLIT = 5
STREAM_INIT = 6
STREAM_SHUFFLE = 7
STREAM_BASELINE = 8
