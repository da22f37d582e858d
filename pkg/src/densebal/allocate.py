"""Load allocations: the clamped-affine relaxation, its epsilon -> 0 limit, and
load-distribution utilities.

An allocation splits each edge's unit of load between its two endpoints.  The
share of edge e = (a, b) credited to b is stored once per undirected edge
(theta_half[e]); the reverse share is its complement, so the pairing constraint
holds exactly by construction.  The per-vertex load is the sum of incoming
shares.

The relaxed balance condition with parameter eps > 0 sets every share to
clamp(1/2 + (F(a) - F(b)) / (2 eps)) where F = baseload + load.  It has a
unique fixed point on bounded-degree graphs and is solved here by synchronous
(Jacobi) sweeps; the balanced loads are recovered by driving eps to zero.
"""

from __future__ import annotations

import json
import math

import numpy as np

from densebal import kernels
from densebal.graph import Graph


class NonConvergenceError(RuntimeError):
    """Iteration failed to reach the requested tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class Allocation:
    """Per-edge load split for a fixed graph.

    theta_half[e] is the share of edge e = (a, b) credited to b; the share
    credited to a is 1 - theta_half[e].
    """

    def __init__(self, graph: Graph, theta_half: np.ndarray):
        theta_half = np.asarray(theta_half, dtype=np.float64)
        if theta_half.shape != (graph.m,):
            raise ValueError("theta size mismatch with graph edges")
        if theta_half.size and (theta_half.min() < -1e-12 or theta_half.max() > 1 + 1e-12):
            raise ValueError("theta values must lie in [0, 1]")
        self.graph = graph
        self.theta_half = np.clip(theta_half, 0.0, 1.0)

    def oriented(self, q: int) -> float:
        """Value on oriented slot q (share credited to the destination)."""
        e, back = divmod(q, 2)
        th = self.theta_half[e]
        return float(1.0 - th) if back else float(th)

    def value(self, i: int, j: int) -> float:
        """Share of edge {i, j} credited to j."""
        g = self.graph
        for u, q in g.neighbors(j):
            if u == i:
                return self.oriented(q)
        raise KeyError(f"no edge {{{i},{j}}}")

    def loads(self) -> np.ndarray:
        return load_of(self.graph, self)

    @classmethod
    def constant(cls, graph: Graph, value: float = 0.5) -> "Allocation":
        return cls(graph, np.full(graph.m, value))


def load_of(g: Graph, alloc: Allocation) -> np.ndarray:
    """Per-vertex load: sum of incoming shares.  Total mass equals |E|."""
    if alloc.graph.m != g.m or alloc.graph.n != g.n:
        raise ValueError("allocation does not match graph")
    th = alloc.theta_half
    if g.m == 0:
        return np.zeros(g.n)
    return (np.bincount(g.edges[:, 1], weights=th, minlength=g.n)
            + np.bincount(g.edges[:, 0], weights=1.0 - th, minlength=g.n))


def is_balanced(g: Graph, alloc: Allocation, tol: float):
    """Check the no-mass-toward-larger-load condition at tolerance tol.

    Returns (ok, violations); a violation is an oriented pair (i, j) whose
    share exceeds tol although load(i) < load(j) - tol.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    loads = load_of(g, alloc)
    th = alloc.theta_half
    a = g.edges[:, 0]
    b = g.edges[:, 1]
    viol = []
    bad_ab = (loads[a] < loads[b] - tol) & (th > tol)
    bad_ba = (loads[b] < loads[a] - tol) & ((1.0 - th) > tol)
    for e in np.nonzero(bad_ab)[0]:
        viol.append((int(a[e]), int(b[e])))
    for e in np.nonzero(bad_ba)[0]:
        viol.append((int(b[e]), int(a[e])))
    return len(viol) == 0, viol


def _auto_sweeps(max_degree: int, eps: float, stop_tol: float) -> int:
    if max_degree == 0:
        return 1
    rate = 2.0 * eps / (max_degree + 2.0 * eps)  # per-sweep contraction exponent
    need = math.log(max(max_degree, 1.0) / max(stop_tol, 1e-300)) / rate
    # cold-start allowance; warm-started levels exit on the residual much
    # earlier, and a stalled iteration should fail loudly rather than spin
    return int(min(5e6, 1.5 * need + 100))


def _eps_fixed_point(g: Graph, eps: float, base, tol, max_sweeps, theta0=None):
    """Solve the eps-relaxed fixed point to load accuracy tol (sup norm)."""
    m = g.m
    if m == 0:
        return np.zeros(0), np.zeros(g.n), 0, 0.0
    delta = g.max_degree
    # residual r guarantees distance <= (delta / 2 eps) * r to the fixed point
    stop_tol = tol * 2.0 * eps / (delta + 2.0 * eps)
    if max_sweeps is None:
        max_sweeps = _auto_sweeps(delta, eps, stop_tol)
    theta = np.full(m, 0.5) if theta0 is None else np.asarray(theta0, dtype=np.float64).copy()
    base = np.zeros(g.n) if base is None else np.asarray(base, dtype=np.float64)
    ea = np.ascontiguousarray(g.edges[:, 0])
    eb = np.ascontiguousarray(g.edges[:, 1])
    omega = 2.0 * eps / (delta + 2.0 * eps)
    sweeps, res, loads = kernels.jacobi_epsilon_sweeps(
        ea, eb, theta, np.ascontiguousarray(base), g.n, eps, omega, stop_tol, max_sweeps)
    if res >= stop_tol:
        raise NonConvergenceError(
            f"eps-balancing did not converge in {max_sweeps} sweeps "
            f"(load residual {res:.3g}, target {stop_tol:.3g})", residual=res)
    return theta, loads, sweeps, res


def epsilon_balance(g: Graph, eps: float, delta: int | None = None,
                    tol: float = 1e-10, max_sweeps: int | None = None) -> Allocation:
    """The unique eps-relaxed allocation, to load accuracy tol in sup norm.

    With delta given, the iteration runs on g.truncate(delta); removed edges
    carry no mass (the returned allocation lives on the truncated graph).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if tol <= 0:
        raise ValueError("tol must be positive")
    gt = g.truncate(delta) if delta is not None else g
    theta, _, _, _ = _eps_fixed_point(gt, eps, None, tol, max_sweeps)
    return Allocation(gt, theta)


def epsilon_balance_baseload(g: Graph, baseload, eps: float,
                             tol: float = 1e-10, max_sweeps: int | None = None) -> Allocation:
    """eps-relaxed allocation with per-vertex load offsets."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if tol <= 0:
        raise ValueError("tol must be positive")
    baseload = np.asarray(baseload, dtype=np.float64)
    if baseload.shape != (g.n,):
        raise ValueError("baseload size mismatch")
    if not np.all(np.isfinite(baseload)):
        raise ValueError("baseload entries must be finite")
    theta, _, _, _ = _eps_fixed_point(g, eps, baseload, tol, max_sweeps)
    return Allocation(g, theta)


def _neville_at_zero(xs, arrays):
    """Polynomial extrapolation of vector samples (xs[i], arrays[i]) to x = 0."""
    P = [np.asarray(a, dtype=np.float64).copy() for a in arrays]
    k = len(xs)
    for d in range(1, k):
        for i in range(k - 1, d - 1, -1):
            x_hi = xs[i]
            x_lo = xs[i - d]
            P[i] = (x_hi * P[i - 1] - x_lo * P[i]) / (x_hi - x_lo)
    return P[-1]


def exact_loads(g: Graph, tol: float = 1e-8, method: str = "extrapolate",
                eps0: float = 1.0, max_levels: int = 60):
    """Balanced load vector within tol (sup norm), plus a witnessing allocation.

    Runs the relaxation on the halving schedule eps0, eps0/2, ...  With
    method="extrapolate" (default) the returned loads are the polynomial
    extrapolation of the level loads to eps = 0, stopping once consecutive
    extrapolants agree within tol/2 twice in a row; loads are analytic in eps
    once the clamp pattern freezes, so this converges far shallower in eps
    than the raw schedule.  method="schedule" stops when consecutive level
    loads agree within tol/2 and returns the last level.

    The witnessing allocation is the last relaxed iterate; its balance
    violations are at the scale of the final eps, not of tol.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if method not in ("extrapolate", "schedule"):
        raise ValueError(f"unknown method {method!r}")
    if g.m == 0:
        return np.zeros(g.n), Allocation(g, np.zeros(0))

    def _finish(loads, theta, eps):
        alloc = Allocation(g, theta)
        alloc.eps_final = eps
        return loads, alloc

    level_tol = tol / 64.0
    window = 5
    eps_list: list[float] = []
    load_list: list[np.ndarray] = []
    theta = None
    prev_ext = None
    agreements = 0
    for k in range(max_levels):
        eps = eps0 * 2.0 ** (-k)
        theta, loads, _, _ = _eps_fixed_point(g, eps, None, level_tol, None, theta)
        eps_list.append(eps)
        load_list.append(loads)
        if method == "schedule":
            if k >= 1 and np.abs(loads - load_list[-2]).max() < tol / 2:
                return _finish(loads, theta, eps)
            continue
        ext = _neville_at_zero(eps_list[-window:], load_list[-window:])
        if prev_ext is not None and np.abs(ext - prev_ext).max() < tol / 2:
            agreements += 1
            if agreements >= 2:
                return _finish(ext, theta, eps)
        else:
            agreements = 0
        prev_ext = ext
    raise NonConvergenceError(
        f"load schedule did not stabilize within {max_levels} levels")


class LoadSample:
    """Sorted empirical distribution of per-vertex loads."""

    def __init__(self, values):
        self.values = np.sort(np.asarray(values, dtype=np.float64))
        if self.values.size == 0:
            raise ValueError("empty sample")

    @property
    def n(self) -> int:
        return self.values.size

    def cdf(self, t):
        return np.searchsorted(self.values, t, side="right") / self.n

    def kolmogorov(self, other: "LoadSample") -> float:
        pts = np.union1d(self.values, other.values)
        return float(np.abs(self.cdf(pts) - other.cdf(pts)).max())

    def kolmogorov_to_curve(self, ts, cdf_values) -> float:
        """Sup distance to a CDF curve sampled on a grid."""
        ts = np.asarray(ts, dtype=np.float64)
        cdf_values = np.asarray(cdf_values, dtype=np.float64)
        return float(np.abs(self.cdf(ts) - cdf_values).max())

    def wasserstein1(self, other: "LoadSample") -> float:
        xs = np.union1d(self.values, other.values)
        if xs.size < 2:
            return 0.0
        f = self.cdf(xs[:-1])
        h = other.cdf(xs[:-1])
        return float(np.sum(np.abs(f - h) * np.diff(xs)))


def empirical_load_distribution(loads) -> LoadSample:
    """Uniform mixture of point masses at the per-vertex loads."""
    return LoadSample(loads)


def allocation_to_json(alloc: Allocation) -> str:
    """JSON with per-vertex loads and one oriented (u, v, share-to-v) row per edge."""
    loads = load_of(alloc.graph, alloc)
    theta_rows = [[int(a), int(b), float(t)]
                  for (a, b), t in zip(alloc.graph.edges.tolist(), alloc.theta_half)]
    return json.dumps({"loads": [float(x) for x in loads], "theta": theta_rows})


def loads_to_csv(loads, stream) -> None:
    stream.write("vertex,load\n")
    for v, x in enumerate(np.asarray(loads, dtype=np.float64)):
        stream.write(f"{v},{x:.17g}\n")
