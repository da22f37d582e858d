"""Exact maximum subgraph density, density decomposition, and k-orientability.

Densities are exact rationals.  The scalable path tests "some subset has
density above p/q" with a min cut (capacities scaled by the denominator) and
walks the achievable densities upward Dinkelbach-style, which terminates
because each step lands on an achieved density and these strictly increase.
The maximal min-cut source side yields the largest maximizer (density
maximizers are closed under union).

Peeling the largest densest set and crediting its cut edges to the surviving
endpoints yields the density decomposition; the block density of a vertex is
its exact balanced load.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from densebal import kernels
from densebal.graph import Graph


@dataclass
class DensityResult:
    rho: Fraction
    subset: list  # largest vertex set achieving rho

    def as_json_dict(self) -> dict:
        return {"rho_num": int(self.rho.numerator), "rho_den": int(self.rho.denominator),
                "H": [int(v) for v in self.subset]}


@dataclass
class DensityDecomposition:
    blocks: list  # (Fraction density, sorted vertex list), densities strictly decreasing
    block_of: np.ndarray

    @property
    def rho(self) -> Fraction:
        return self.blocks[0][0] if self.blocks else Fraction(0)

    def loads_exact(self):
        out = [None] * len(self.block_of)
        for dens, verts in self.blocks:
            for v in verts:
                out[v] = dens
        return out

    def loads(self) -> np.ndarray:
        return np.array([float(x) for x in self.loads_exact()])

    def as_json_dict(self) -> dict:
        return {
            "rho_num": int(self.rho.numerator), "rho_den": int(self.rho.denominator),
            "H": [int(v) for v in self.blocks[0][1]],
            "blocks": [{"density_num": int(d.numerator), "density_den": int(d.denominator),
                        "vertices": [int(v) for v in vs]} for d, vs in self.blocks],
        }


def rho_bruteforce(g: Graph, max_n: int = 22) -> DensityResult:
    """Exact density by subset enumeration; the subset is the union of all
    maximizers (maximizers are union-closed)."""
    n = g.n
    if n > max_n:
        raise ValueError(f"n={n} too large for enumeration (limit {max_n})")
    if n == 0:
        return DensityResult(Fraction(0), [])
    adj_mask = [0] * n
    for a, b in g.edges.tolist():
        adj_mask[a] |= 1 << b
        adj_mask[b] |= 1 << a
    size = 1 << n
    edge_cnt = [0] * size
    best_num, best_den = 0, 1  # density 0 is always achieved
    for s in range(1, size):
        low = s & (-s)
        rest = s ^ low
        v = low.bit_length() - 1
        ec = edge_cnt[rest] + (adj_mask[v] & rest).bit_count()
        edge_cnt[s] = ec
        k = s.bit_count()
        if ec * best_den > best_num * k:
            best_num, best_den = ec, k
    union = 0
    for s in range(1, size):
        if edge_cnt[s] * best_den == best_num * s.bit_count():
            union |= s
    if best_num == 0:
        union = size - 1  # every set has density 0; take all of V
    subset = [v for v in range(n) if union >> v & 1]
    return DensityResult(Fraction(best_num, best_den), subset)


def _max_gain_subset(n, edges, credit, p, q):
    """Largest S maximizing q*(|E(S)| + credit(S)) - p*|S|, via a min cut."""
    deg = np.zeros(n, dtype=np.int64)
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    s, t = n, n + 1
    tails, heads, caps = [], [], []

    def arc_pair(x, y, cxy, cyx=0):
        tails.extend((x, y))
        heads.extend((y, x))
        caps.extend((cxy, cyx))

    for v in range(n):
        arc_pair(s, v, int(q * (deg[v] + 2 * credit[v])))
        arc_pair(v, t, int(2 * p))
    for a, b in edges:
        arc_pair(a, b, int(q), int(q))

    _, residual = kernels.max_flow(n + 2, np.array(tails, dtype=np.int64),
                                   np.array(heads, dtype=np.int64),
                                   np.array(caps, dtype=np.int64), s, t)
    # largest min-cut source side = complement of { nodes reaching t in the
    # residual network }
    heads_arr = np.array(heads, dtype=np.int64)
    tails_arr = np.array(tails, dtype=np.int64)
    open_arc = residual > 0
    by_head = [[] for _ in range(n + 2)]
    for a_id in np.nonzero(open_arc)[0]:
        by_head[heads_arr[a_id]].append(int(tails_arr[a_id]))
    reach_t = np.zeros(n + 2, dtype=bool)
    reach_t[t] = True
    stack = [t]
    while stack:
        y = stack.pop()
        for x in by_head[y]:
            if not reach_t[x]:
                reach_t[x] = True
                stack.append(x)
    return [v for v in range(n) if not reach_t[v]]


def _gain(edges, credit, subset, p, q) -> int:
    sset = set(subset)
    inner = sum(1 for a, b in edges if a in sset and b in sset)
    cr = sum(credit[v] for v in subset)
    return q * (inner + cr) - p * len(subset)


def _densest_subset(n, edges, credit):
    """(density, largest maximizer) of (|E(S)| + credit(S)) / |S| over nonempty S,
    with the empty-edge convention density 0 on all of V."""
    if n == 0:
        return Fraction(0), []
    total = len(edges) + int(sum(credit))
    if total == 0:
        return Fraction(0), list(range(n))
    rho = Fraction(total, n)  # achieved by S = V
    while True:
        subset = _max_gain_subset(n, edges, credit, rho.numerator, rho.denominator)
        gain = _gain(edges, credit, subset, rho.numerator, rho.denominator)
        if gain > 0:
            sset = set(subset)
            inner = sum(1 for a, b in edges if a in sset and b in sset)
            cr = int(sum(credit[v] for v in subset))
            rho = Fraction(inner + cr, len(subset))
        else:
            return rho, sorted(subset)


def rho_maxflow(g: Graph) -> DensityResult:
    """Same contract as rho_bruteforce, scalable: exact rational density and
    the largest maximizer."""
    rho, subset = _densest_subset(g.n, g.edges.tolist(), np.zeros(g.n, dtype=np.int64))
    return DensityResult(rho, subset)


def density_decomposition(g: Graph) -> DensityDecomposition:
    """Iterated peeling of the largest densest set.

    Edges cut by a peel are credited to their surviving endpoint (the balance
    condition sends cross-block mass to the lower-load side), so each later
    block maximizes (|E(S)| + credit(S)) / |S| within the remainder.  Block
    densities strictly decrease and equal the balanced loads of their vertices.
    """
    n = g.n
    block_of = np.full(n, -1, dtype=np.int64)
    blocks = []
    remaining = list(range(n))
    credit = np.zeros(n, dtype=np.int64)
    edges = g.edges.tolist()
    while remaining:
        pos = {v: i for i, v in enumerate(remaining)}
        sub_edges = [(pos[a], pos[b]) for a, b in edges if a in pos and b in pos]
        sub_credit = np.array([credit[v] for v in remaining], dtype=np.int64)
        rho, sub_set = _densest_subset(len(remaining), sub_edges, sub_credit)
        peel = sorted(remaining[i] for i in sub_set)
        for v in peel:
            block_of[v] = len(blocks)
        blocks.append((rho, peel))
        peeled = set(peel)
        for a, b in edges:
            if a in pos and b in pos:
                if (a in peeled) != (b in peeled):
                    credit[b if a in peeled else a] += 1
        remaining = [v for v in remaining if v not in peeled]
    return DensityDecomposition(blocks, block_of)


def mean_excess_curve(loads, t_grid) -> np.ndarray:
    """Average excess load above each threshold: (1/n) sum (load - t)^+."""
    loads = np.asarray(loads, dtype=np.float64)
    t_grid = np.asarray(t_grid, dtype=np.float64)
    return np.clip(loads[None, :] - t_grid[:, None], 0.0, None).mean(axis=1)


@dataclass
class OrientabilityResult:
    orientable: bool
    orientation: list | None  # per edge (tail, head): head receives the edge
    violating_set: list | None

    def __bool__(self):
        return self.orientable


def k_orientable(g: Graph, k: int) -> OrientabilityResult:
    """Orientation with all in-degrees <= k, or a set H with |E(H)| > k |H|.

    Exists if and only if the maximum subgraph density is at most k (boundary
    convention: density exactly k is orientable).
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    m = g.m
    if m == 0:
        return OrientabilityResult(True, [], None)
    # nodes: 0 = source, 1 = sink, 2..2+m-1 edge nodes, then vertex nodes
    s, t = 0, 1
    enode = lambda e: 2 + e
    vnode = lambda v: 2 + m + v
    tails, heads, caps = [], [], []

    def arc_pair(x, y, c):
        tails.extend((x, y))
        heads.extend((y, x))
        caps.extend((c, 0))

    for e in range(m):
        arc_pair(s, enode(e), 1)
    edge_arc_base = len(tails)
    for e, (a, b) in enumerate(g.edges.tolist()):
        arc_pair(enode(e), vnode(a), 1)
        arc_pair(enode(e), vnode(b), 1)
    for v in range(g.n):
        arc_pair(vnode(v), t, k)

    tails = np.array(tails, dtype=np.int64)
    heads = np.array(heads, dtype=np.int64)
    caps_arr = np.array(caps, dtype=np.int64)
    flow, residual = kernels.max_flow(2 + m + g.n, tails, heads, caps_arr, s, t)

    if flow == m:
        orientation = []
        for e, (a, b) in enumerate(g.edges.tolist()):
            arc_a = edge_arc_base + 4 * e      # e -> a
            arc_b = edge_arc_base + 4 * e + 2  # e -> b
            if residual[arc_a] == 0:
                orientation.append((b, a))
            else:
                assert residual[arc_b] == 0
                orientation.append((a, b))
        return OrientabilityResult(True, orientation, None)

    # source-reachable side of the min cut refutes orientability
    open_arc = residual > 0
    by_tail = [[] for _ in range(2 + m + g.n)]
    for a_id in np.nonzero(open_arc)[0]:
        by_tail[tails[a_id]].append(int(heads[a_id]))
    seen = np.zeros(2 + m + g.n, dtype=bool)
    seen[s] = True
    stack = [s]
    while stack:
        x = stack.pop()
        for y in by_tail[x]:
            if not seen[y]:
                seen[y] = True
                stack.append(y)
    violating = [v for v in range(g.n) if seen[vnode(v)]]
    return OrientabilityResult(False, None, violating)
