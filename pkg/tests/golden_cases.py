"""The fixed render cases behind the golden PNG files."""

from conftest import GOLDEN_GRAPHS
from vnsolver.graph import parse_graph6
from vnsolver.layout import LayoutSpec, make_layout
from vnsolver.raster import RenderSpec, encode_png, render

LAYOUTS = {
    "circular": LayoutSpec("circular"),
    "spiral": LayoutSpec("spiral", r=0.3),
    "random": LayoutSpec("random", seed=11),
}
SCHEMES = ("gray", "uniform", "random")


def cases():
    for gname, code in GOLDEN_GRAPHS.items():
        for lname, lspec in LAYOUTS.items():
            for scheme in SCHEMES:
                yield f"{gname}-{lname}-{scheme}", code, lspec, scheme


def render_case(code, lspec, scheme) -> bytes:
    g = parse_graph6(code)
    spec = RenderSpec(scheme=scheme, node_scale=3, edge_scale=1, color_seed=7)
    return encode_png(render(g, make_layout(g.n, lspec), spec))
