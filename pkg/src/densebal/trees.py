"""Exact balanced loads on finite trees via response-function recursions.

For a rooted subtree, the response function maps an extra load injected at the
root to the root's resulting total load.  Response functions of disjoint
subtrees combine through a one-level recursion on their right-continuous
inverses, which stays inside the piecewise-linear class, so the whole
computation is exact when run on rational coordinates.

The same local recursion, iterated as plain message passing with marks in
[0, 1], is exposed by `cavity_messages`; on a tree it reaches its unique fixed
point in at most diameter-many synchronous sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from densebal.graph import Graph
from densebal.piecewise import PiecewiseLinear as PL


class NotATreeError(ValueError):
    pass


def _require_tree(g: Graph):
    if not g.is_tree():
        raise NotATreeError(f"graph with n={g.n}, m={g.m} is not a tree")


def complete_regular_tree(degree: int, height: int) -> Graph:
    """Rooted tree, leaves at the given depth, every internal vertex (root
    included) of the given degree.  Vertex 0 is the root."""
    if degree < 1:
        raise ValueError("degree must be positive")
    if height == 0:
        return Graph(1, [])
    edges = []
    next_id = 1
    frontier = [(0, degree)]
    for level in range(height):
        grow = level < height - 1
        new_frontier = []
        for v, k in frontier:
            for _ in range(k):
                edges.append((v, next_id))
                if grow:
                    new_frontier.append((next_id, degree - 1))
                next_id += 1
        frontier = new_frontier
    return Graph(next_id, edges)


def _orient(g: Graph, root: int):
    """Preorder and parent array of the tree rooted at `root`."""
    parent = [-1] * g.n
    seen = [False] * g.n
    seen[root] = True
    order = []
    stack = [root]
    while stack:
        v = stack.pop()
        order.append(v)
        for u, _ in g.neighbors(v):
            if not seen[u]:
                seen[u] = True
                parent[u] = v
                stack.append(u)
    return order, parent


def _term(r: PL, eps, ident: PL) -> PL:
    """One child's clamped contribution, from the child's inverse response r.

    Limit form (eps None): clamp01(1 - r).  Relaxed form: clamp01(1 - w) with
    w the inverse of (r^{-1} + eps(2 Id - 1)), computed as r o s^{-1} where
    s = Id + 2 eps r - eps, avoiding an explicit inversion of r.
    """
    if eps is None:
        w = r
    else:
        s = r.affine(2 * eps, -eps).add(ident)
        w = r.compose(s.inverse())
    return w.affine(-1, 1).clamp(0, 1)


def _upward(g: Graph, root: int, eps, ident: PL):
    """Bottom-up inverse responses for every child-to-parent oriented edge.

    Returns (order, parent, r_up, term_up, child_sum) where r_up[v] is the
    inverse response of the subtree hanging at v away from parent[v],
    term_up[v] its clamped contribution, and child_sum[v] the sum of v's
    children's contributions (None for leaves).
    """
    order, parent = _orient(g, root)
    r_up: list = [None] * g.n
    term_up: list = [None] * g.n
    child_sum: list = [None] * g.n
    for v in reversed(order):
        acc = None
        for u, _ in g.neighbors(v):
            if parent[u] == v:
                acc = term_up[u] if acc is None else acc.add(term_up[u])
        child_sum[v] = acc
        r = ident if acc is None else ident.add(acc.affine(-1, 0))
        r_up[v] = r
        if v != root:
            term_up[v] = _term(r, eps, ident)
    return order, parent, r_up, term_up, child_sum


def _ident_for(eps) -> PL:
    if eps is None or isinstance(eps, (int, Fraction)):
        return PL.identity()
    return PL.identity().to_float()


def _check_eps(eps):
    if eps is not None and eps <= 0:
        raise ValueError("eps must be positive")


def response_inverse_eps(tree: Graph, root_edge, eps) -> PL:
    """Inverse response function of the subtree hanging at i away from j,
    for root_edge = (i, j), under the eps-relaxed balance condition.

    Pass eps as a Fraction (or int) for exact rational output.
    """
    _require_tree(tree)
    _check_eps(eps)
    i, j = root_edge
    if (min(i, j), max(i, j)) not in tree.edge_set():
        raise ValueError(f"({i}, {j}) is not an edge of the tree")
    _, _, r_up, _, _ = _upward(tree, j, eps, _ident_for(eps))
    return r_up[i]


def response_inverse_limit(tree: Graph, root_edge) -> PL:
    """Right-continuous inverse of the limiting (eps -> 0) response function
    of the subtree hanging at i away from j, for root_edge = (i, j)."""
    _require_tree(tree)
    i, j = root_edge
    if (min(i, j), max(i, j)) not in tree.edge_set():
        raise ValueError(f"({i}, {j}) is not an edge of the tree")
    _, _, r_up, _, _ = _upward(tree, j, None, PL.identity())
    return r_up[i]


def vertex_response_inverse_eps(tree: Graph, o: int, eps) -> PL:
    """Inverse response function of the whole tree rooted at vertex o."""
    _require_tree(tree)
    _check_eps(eps)
    _, _, r_up, _, _ = _upward(tree, o, eps, _ident_for(eps))
    return r_up[o]


def vertex_response_inverse_limit(tree: Graph, o: int) -> PL:
    _require_tree(tree)
    _, _, r_up, _, _ = _upward(tree, o, None, PL.identity())
    return r_up[o]


def exact_tree_loads(tree: Graph, as_fractions: bool = False):
    """The balanced load of every vertex, exactly.

    For each vertex o the load is the unique crossing point of
    t = sum over neighbors i of clamp01(1 - r_{i->o}(t)), where r_{i->o} is the
    inverse response of the subtree hanging at i away from o.  A two-pass
    sweep (up to a fixed root, then back down) supplies all oriented inverse
    responses.

    Returns a float array by default, the exact Fractions with
    as_fractions=True.
    """
    _require_tree(tree)
    ident = PL.identity()
    if tree.n == 1:
        return [Fraction(0)] if as_fractions else np.zeros(1)
    root = 0
    order, parent, r_up, term_up, child_sum = _upward(tree, root, None, ident)

    term_down: list = [None] * tree.n
    for v in order:
        if v == root:
            continue
        p = parent[v]
        acc = child_sum[p]
        if acc is not None:
            acc = acc.add(term_up[v].affine(-1, 0))  # drop v's own branch
        if term_down[p] is not None:
            acc = term_down[p] if acc is None else acc.add(term_down[p])
        r_down = ident if acc is None else ident.add(acc.affine(-1, 0))
        term_down[v] = _term(r_down, None, ident)

    loads = []
    for v in range(tree.n):
        total = child_sum[v]
        if term_down[v] is not None:
            total = term_down[v] if total is None else total.add(term_down[v])
        if total is None:
            total = PL.constant(0)
        # unique t with total(t) = t; total is non-increasing
        loads.append(total.add(ident.affine(-1, 0)).root())
    if as_fractions:
        return [Fraction(x) for x in loads]
    return np.array([float(x) for x in loads])


@dataclass
class CavityMarks:
    """Oriented-edge marks from the clamped local recursion at threshold t."""

    xi: np.ndarray
    t: float
    converged: bool
    sweeps: int

    def incoming_sums(self, g: Graph) -> np.ndarray:
        """Per-vertex sum of incoming marks."""
        return np.bincount(g.odst, weights=self.xi, minlength=g.n)


def cavity_messages(g: Graph, t: float, max_sweeps: int | None = None,
                    tol: float = 1e-12) -> CavityMarks:
    """Iterate xi(i,j) <- clamp01(1 - t + sum_{k ~ i, k != j} xi(k,i)).

    Exact on trees within diameter-many synchronous sweeps; on graphs with
    cycles it runs to max_sweeps and reports convergence status instead of
    raising.
    """
    if max_sweeps is None:
        max_sweeps = 2 * g.n + 50
    xi = np.zeros(2 * g.m)
    if g.m == 0:
        return CavityMarks(xi, float(t), True, 0)
    rev = np.arange(2 * g.m) ^ 1
    converged = False
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        s = np.bincount(g.odst, weights=xi, minlength=g.n)
        new = np.clip(1.0 - t + s[g.osrc] - xi[rev], 0.0, 1.0)
        delta = float(np.abs(new - xi).max())
        xi = new
        if delta <= tol:
            converged = True
            break
    return CavityMarks(xi, float(t), converged, sweeps)
