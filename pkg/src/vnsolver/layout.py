"""Planar node embeddings: circular, spiral and uniformly random."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng

KINDS = ("circular", "spiral", "random")


@dataclass(frozen=True)
class LayoutSpec:
    kind: str = "circular"
    a: float = 1.0
    b: float = 1.0
    r: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown layout kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "circular" and (self.a <= 0 or self.b <= 0):
            raise ValueError("circular layout needs a > 0 and b > 0")
        if not math.isfinite(self.r):
            raise ValueError("spiral offset must be finite")


def circular_layout(n: int, a: float = 1.0, b: float = 1.0) -> np.ndarray:
    """Nodes at equal angles on the ellipse ``x**2/a + y**2/b = 1``.

    Node ``i`` sits at angle ``2*pi*i/n``, counterclockwise from the +x axis.
    Returns an ``(n, 2)`` array.
    """
    if a <= 0 or b <= 0:
        raise ValueError(f"ellipse parameters must be positive, got a={a}, b={b}")
    if n < 0:
        raise ValueError("n must be non-negative")
    theta = 2.0 * np.pi * np.arange(n) / max(n, 1)
    return np.column_stack((math.sqrt(a) * np.cos(theta), math.sqrt(b) * np.sin(theta)))


def spiral_layout(n: int, r: float = 0.3) -> np.ndarray:
    """Archimedean spiral: the ``i``-th node (1-based) at ``(i cos ir, i sin ir)``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    i = np.arange(1, n + 1, dtype=np.float64)
    return np.column_stack((i * np.cos(i * r), i * np.sin(i * r)))


def random_layout(n: int, seed: int, index: int = 0) -> np.ndarray:
    """I.i.d. uniform points in ``[0, 1)**2`` from a seeded Philox stream.

    ``index`` selects an independent stream, so corpus graphs sharing one
    seed still get unrelated layouts.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    return rng.generator(seed, rng.STREAM_LAYOUT, index).random((n, 2))


def make_layout(n: int, spec: LayoutSpec, index: int = 0) -> np.ndarray:
    """Layout for an ``n``-node graph; ``index`` only matters for random layouts."""
    if spec.kind == "circular":
        return circular_layout(n, spec.a, spec.b)
    if spec.kind == "spiral":
        return spiral_layout(n, spec.r)
    return random_layout(n, spec.seed, index)


def fit_to_canvas(coords, width: int, height: int, margin_frac: float = 0.05) -> np.ndarray:
    """Map layout coordinates to pixel coordinates.

    Uses one uniform scale so aspect is preserved, centres the bounding box on
    the canvas and leaves ``margin_frac`` of each side empty. The y axis is
    flipped so that layout "up" is image "up". A bounding box with no extent
    maps to the canvas centre.
    """
    if width < 2 or height < 2:
        raise ValueError("canvas must be at least 2x2")
    if not 0 <= margin_frac < 0.5:
        raise ValueError("margin_frac must lie in [0, 0.5)")
    pts = np.asarray(coords, dtype=np.float64).reshape(-1, 2)
    cx, cy = width / 2.0, height / 2.0
    if len(pts) == 0:
        return pts.copy()
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    mid = (lo + hi) / 2.0
    ext = hi - lo
    avail = np.array([width, height], dtype=np.float64) * (1.0 - 2.0 * margin_frac)
    scales = [avail[k] / ext[k] for k in (0, 1) if ext[k] > 0]
    scale = min(scales) if scales else 0.0
    out = np.empty_like(pts)
    out[:, 0] = cx + scale * (pts[:, 0] - mid[0])
    out[:, 1] = cy - scale * (pts[:, 1] - mid[1])
    return out
