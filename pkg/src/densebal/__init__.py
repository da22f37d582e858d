"""Balanced load allocations and densest subgraphs on finite graphs.

The toolkit computes the unique balanced load vector of a finite graph (the
per-vertex local density), exact maximum subgraph densities and density
decompositions, solves the associated distributional fixed-point equation on
Galton-Watson trees by population dynamics, and provides generators and
first-moment bounds for random graphs with prescribed degrees.
"""

__version__ = "0.1.0"

from densebal.graph import Graph, load_edge_list  # noqa: F401
