"""Deterministic quantum spatial search on Laplacian integral graphs.

The reflection about the uniform superposition is built from phase
estimation on a controlled continuous-time quantum walk, and combined with a
phase-matched Grover iteration so that a marked vertex is found with
probability one.
"""

__version__ = "0.1.0"

from .graphs import Graph, GraphSpec, build_graph, laplacian, parse_graph_spec  # noqa: E402
from .search import MarkedSet, long_params, run_search, select_marked  # noqa: E402
from .spectral import analytic_spectrum, certify_integral, depth, eigendecompose  # noqa: E402

__all__ = [
    "Graph",
    "GraphSpec",
    "MarkedSet",
    "analytic_spectrum",
    "build_graph",
    "certify_integral",
    "depth",
    "eigendecompose",
    "laplacian",
    "long_params",
    "parse_graph_spec",
    "run_search",
    "select_marked",
]
