"""Vision-based Hamiltonian-cycle classification.

Graphs are embedded in the plane (:mod:`vnsolver.layout`), rasterized to RGB
images (:mod:`vnsolver.raster`) and classified by a small CNN trained from
scratch (:mod:`vnsolver.classifier`). Ground-truth labels come from an exact
backtracking oracle (:mod:`vnsolver.oracle`).
"""

from .graph import Graph, encode_graph6, from_edge_list, parse_graph6
from .layout import LayoutSpec, circular_layout, random_layout, spiral_layout
from .oracle import OracleResult, brute_force_hamiltonian, is_hamiltonian
from .raster import Image, RenderSpec, render

__version__ = "0.1.0"

__all__ = [
    "Graph", "encode_graph6", "from_edge_list", "parse_graph6",
    "LayoutSpec", "circular_layout", "random_layout", "spiral_layout",
    "OracleResult", "brute_force_hamiltonian", "is_hamiltonian",
    "Image", "RenderSpec", "render",
]
