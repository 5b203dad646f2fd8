"""Software rasterizer turning an embedded graph into an RGB image.

Discs and capsule-shaped segments are filled with hard edges: a pixel is
painted when its centre ``(x + 0.5, y + 0.5)`` lies within the shape,
boundary included. Edges are drawn first, in sorted ``(u, v)`` order, then
nodes in index order on top.
"""

from __future__ import annotations

import colorsys
import math
from dataclasses import dataclass, field

import numpy as np

from . import png, rng
from .graph import Graph
from .layout import fit_to_canvas

SCHEMES = ("gray", "uniform", "random")

WHITE = (255, 255, 255)
GRAY = (80, 80, 80)
NODE_BLUE = (31, 119, 180)
EDGE_ORANGE = (255, 127, 14)

# fitted pixel coordinates are snapped to this grid so last-ulp libm
# differences in layout trig cannot flip boundary pixels
_SNAP = 256.0


@dataclass(frozen=True)
class RenderSpec:
    width: int = 224
    height: int = 224
    node_scale: float = 1.0
    edge_scale: float = 1.0
    scheme: str = "gray"
    color_seed: int = 0
    background: tuple = WHITE
    margin_frac: float = 0.05

    def __post_init__(self):
        if self.width < 16 or self.height < 16:
            raise ValueError("canvas must be at least 16x16")
        if self.node_scale <= 0 or self.edge_scale <= 0:
            raise ValueError("node_scale and edge_scale must be positive")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown colour scheme {self.scheme!r}; expected one of {SCHEMES}")
        if len(self.background) != 3 or not all(0 <= c <= 255 for c in self.background):
            raise ValueError("background must be an RGB triple of 0..255 values")

    @property
    def node_radius(self) -> float:
        return self.node_scale

    @property
    def edge_thickness(self) -> float:
        return 2.0 * self.edge_scale


@dataclass
class Image:
    """RGB image; ``pixels`` has shape ``(height, width, 3)`` and dtype uint8."""

    pixels: np.ndarray

    @classmethod
    def blank(cls, width: int, height: int, color=WHITE) -> "Image":
        px = np.empty((height, width, 3), dtype=np.uint8)
        px[:] = color
        return cls(px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def tobytes(self) -> bytes:
        return self.pixels.tobytes()

    def __eq__(self, other):
        if not isinstance(other, Image):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and np.array_equal(self.pixels, other.pixels)


@dataclass(frozen=True)
class Colors:
    nodes: tuple
    edges: dict = field(default_factory=dict)


def _random_color(gen: np.random.Generator) -> tuple[int, int, int]:
    hue = float(gen.random())
    r, g, b = colorsys.hsv_to_rgb(hue, 1.0, 1.0)
    return (int(round(255 * r)), int(round(255 * g)), int(round(255 * b)))


def assign_colors(g: Graph, scheme: str, color_seed: int = 0, index: int = 0) -> Colors:
    """Colour every node and edge according to ``scheme``.

    The random scheme draws nodes first (by index) and then edges (sorted)
    from one Philox stream keyed by ``(color_seed, index)``.
    """
    edges = list(g.edges())
    if scheme == "gray":
        return Colors((GRAY,) * g.n, {e: GRAY for e in edges})
    if scheme == "uniform":
        return Colors((NODE_BLUE,) * g.n, {e: EDGE_ORANGE for e in edges})
    if scheme == "random":
        gen = rng.generator(color_seed, rng.STREAM_COLOR, index)
        nodes = tuple(_random_color(gen) for _ in range(g.n))
        return Colors(nodes, {e: _random_color(gen) for e in edges})
    raise ValueError(f"unknown colour scheme {scheme!r}")


def _window(lo: float, hi: float, size: int) -> tuple[int, int]:
    """Pixel index range whose centres may fall in ``[lo, hi]``, clipped."""
    a = max(0, int(math.floor(lo - 0.5)))
    b = min(size, int(math.ceil(hi + 0.5)) + 1)
    return a, b


def draw_disc(img: Image, center, radius: float, color) -> int:
    """Fill all pixels within ``radius`` of ``center``; returns the count painted."""
    cx, cy = float(center[0]), float(center[1])
    if not (math.isfinite(cx) and math.isfinite(cy)) or radius <= 0:
        raise ValueError("disc needs a finite centre and positive radius")
    x0, x1 = _window(cx - radius, cx + radius, img.width)
    y0, y1 = _window(cy - radius, cy + radius, img.height)
    if x0 >= x1 or y0 >= y1:
        return 0
    dx = np.arange(x0, x1) + 0.5 - cx
    dy = np.arange(y0, y1) + 0.5 - cy
    mask = dy[:, None] ** 2 + dx[None, :] ** 2 <= radius * radius
    img.pixels[y0:y1, x0:x1][mask] = color
    return int(mask.sum())


def draw_segment(img: Image, p0, p1, thickness: float, color) -> int:
    """Fill the capsule of all pixels within ``thickness / 2`` of segment p0-p1."""
    ax, ay = float(p0[0]), float(p0[1])
    bx, by = float(p1[0]), float(p1[1])
    if not all(math.isfinite(v) for v in (ax, ay, bx, by)) or thickness <= 0:
        raise ValueError("segment needs finite endpoints and positive thickness")
    half = thickness / 2.0
    x0, x1 = _window(min(ax, bx) - half, max(ax, bx) + half, img.width)
    y0, y1 = _window(min(ay, by) - half, max(ay, by) + half, img.height)
    if x0 >= x1 or y0 >= y1:
        return 0
    px = (np.arange(x0, x1) + 0.5)[None, :]
    py = (np.arange(y0, y1) + 0.5)[:, None]
    ux, uy = bx - ax, by - ay
    len2 = ux * ux + uy * uy
    if len2 == 0.0:
        t = 0.0
    else:
        t = np.clip(((px - ax) * ux + (py - ay) * uy) / len2, 0.0, 1.0)
    ex = px - (ax + t * ux)
    ey = py - (ay + t * uy)
    mask = ex * ex + ey * ey <= half * half
    img.pixels[y0:y1, x0:x1][mask] = color
    return int(mask.sum())


def render(g: Graph, coords, spec: RenderSpec, index: int = 0) -> Image:
    """Draw ``g`` with node positions ``coords`` (layout units) on a fresh canvas."""
    coords = np.asarray(coords, dtype=np.float64).reshape(-1, 2)
    if len(coords) != g.n:
        raise ValueError(f"layout has {len(coords)} points for a graph with {g.n} nodes")
    img = Image.blank(spec.width, spec.height, spec.background)
    if g.n == 0:
        return img
    pts = fit_to_canvas(coords, spec.width, spec.height, spec.margin_frac)
    pts = np.round(pts * _SNAP) / _SNAP
    colors = assign_colors(g, spec.scheme, spec.color_seed, index)
    for (u, v), col in sorted(colors.edges.items()):
        draw_segment(img, pts[u], pts[v], spec.edge_thickness, col)
    for v in range(g.n):
        draw_disc(img, pts[v], spec.node_radius, colors.nodes[v])
    return img


def encode_png(img: Image) -> bytes:
    return png.encode(img.pixels)


def decode_png(blob: bytes) -> Image:
    return Image(png.decode(blob))
