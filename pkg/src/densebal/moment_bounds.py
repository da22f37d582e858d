"""First-moment bounds for dense subsets of degree-prescribed pairings.

Everything here is a closed-form function of the degree sequence: the binomial
domination of within-set edge counts, the expected count of k-vertex
subgraphs with at least r edges, and the geometric-series certificate that
subsets up to a delta fraction of the vertices with edge density at least
t > 1 are absent in expectation.  Bounds are evaluated in log space so large
exponential moments never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from densebal.degmodels import log_exp_moment
from densebal.graph import Graph


@dataclass
class MomentParams:
    """Summary of a degree sequence entering the bounds."""
    theta: float
    alpha: float      # mean degree
    log_lam: float    # log of the exponential moment

    @classmethod
    def from_sequence(cls, d, theta: float) -> "MomentParams":
        if theta <= 0:
            raise ValueError("theta must be positive")
        d = np.asarray(d, dtype=np.float64)
        alpha = float(d.mean())
        if alpha <= 0:
            raise ValueError("mean degree must be positive")
        return cls(theta, alpha, log_exp_moment(d, theta))

    @property
    def lam(self) -> float:
        return math.exp(self.log_lam)


@dataclass
class BinomialBound:
    s: int        # total degree of the subset
    mean: float   # s^2 / m, the stated dominating mean
    trials: int   # the dominating Binomial is (s, s / 2m)
    p: float


def binomial_bound(d, subset) -> BinomialBound:
    """Parameters dominating the number of within-subset edges of a pairing."""
    d = np.asarray(d, dtype=np.int64)
    two_m = int(d.sum())
    if two_m == 0:
        raise ValueError("degree sequence has no half-edges")
    m = two_m / 2.0
    s = int(sum(int(d[v]) for v in subset))
    return BinomialBound(s, s * s / m, s, s / two_m)


def binomial_tail(n: int, p: float, r: int) -> float:
    """P(Binomial(n, p) >= r), exact summation."""
    if r <= 0:
        return 1.0
    q = 1.0 - p
    return float(sum(math.comb(n, j) * p ** j * q ** (n - j) for j in range(r, n + 1)))


@dataclass
class DenseCountBound:
    k: int
    r: int
    theta: float
    log_bound: float

    @property
    def bound(self) -> float:
        return math.exp(self.log_bound) if self.log_bound < 700 else math.inf


def expected_dense_count_bound(d, k: int, r: int, theta: float,
                               minimize_theta: bool = False) -> DenseCountBound:
    """Upper bound on the expected number of k-vertex induced subgraphs with
    at least r edges: (2r / (theta^2 m))^r * ((e/k) sum_i e^{theta d_i})^k.

    The bound is not monotone in theta; with minimize_theta=True it is
    minimized over a log-spaced grid around the given value.
    """
    if k < 1 or r < 1:
        raise ValueError("k and r must be positive")
    d = np.asarray(d, dtype=np.int64)
    two_m = int(d.sum())
    if two_m == 0:
        raise ValueError("degree sequence has no half-edges")
    m = two_m / 2.0
    n = d.size

    def log_bound(th):
        log_sum = math.log(n) + log_exp_moment(d, th)
        return (r * (math.log(2 * r) - 2 * math.log(th) - math.log(m))
                + k * (1.0 + log_sum - math.log(k)))

    thetas = [theta]
    if minimize_theta:
        thetas = list(theta * np.exp(np.linspace(np.log(0.25), np.log(4.0), 17)))
    best = min(thetas, key=log_bound)
    return DenseCountBound(k, r, float(best), float(log_bound(best)))


@dataclass
class ZDeltaBound:
    t: float
    theta: float
    alpha: float
    log_lam: float
    delta: float       # largest dyadic delta with f(delta) < 1
    f_delta: float
    split_m: int       # geometric-series split index, about c log n
    bound: float       # numeric bound on E[#dense subsets of size <= delta n]
    kappa: float       # bound / (log n / n)^(t-1)
    exact_sum: float   # sharper direct sum over subset sizes


def _log_f(delta: float, t: float, params: MomentParams) -> float:
    base = max(1.0, 2.0 * (1.0 + t) / (params.alpha * params.theta ** 2))
    return ((t + 1.0) * math.log(base) + 1.0 + params.log_lam
            + (t - 1.0) * math.log(delta))


def z_delta_t_bound(d, t: float, theta: float, max_j: int = 60) -> ZDeltaBound:
    """Certificate that small subsets with at least t edges per vertex are
    absent in expectation.

    Finds the largest delta = 2^-j with f(delta) < 1, where
    f(delta) = (1 v 2(1+t)/(alpha theta^2))^(t+1) * e * lam * delta^(t-1),
    then evaluates the geometric-series bound split at about c log n together
    with the sharper direct sum over subset sizes.
    """
    if t <= 1:
        raise ValueError("t must exceed 1")
    d = np.asarray(d, dtype=np.int64)
    n = d.size
    params = MomentParams.from_sequence(d, theta)

    delta = None
    for j in range(1, max_j + 1):
        cand = 2.0 ** (-j)
        if _log_f(cand, t, params) < 0:
            delta = cand
            break
    if delta is None:
        raise ValueError("f(delta) >= 1 on the whole dyadic grid; "
                         "theta too small for this sequence")
    f_delta = math.exp(_log_f(delta, t, params))

    # split index m ~ c log n with c large enough that the geometric tail
    # f(delta)^m is negligible against (log n / n)^(t-1)
    c = (t - 1.0) / (-math.log(f_delta)) + 1.0
    split_m = max(1, math.ceil(c * math.log(max(n, 2))))

    def f(x):
        lf = _log_f(x, t, params)
        return math.exp(lf) if lf < 700 else math.inf

    cap = int(delta * n)
    if split_m <= cap:
        f_mid = f(split_m / n)
        bound = f_mid / (1.0 - f_mid) + f_delta ** split_m / (1.0 - f_delta)
    else:
        # degenerate split at this n; the direct sum below is the bound
        bound = math.inf

    exact_sum = 0.0
    for k in range(1, cap + 1):
        lterm = k * _log_f(k / n, t, params)
        exact_sum += math.exp(lterm) if lterm < 700 else math.inf
    if not math.isfinite(bound):
        bound = exact_sum

    rate = (math.log(n) / n) ** (t - 1.0) if n > 1 else 1.0
    return ZDeltaBound(t, theta, params.alpha, params.log_lam, delta, f_delta,
                       split_m, bound, bound / rate, exact_sum)


def search_dense_small(g: Graph, max_size: int, t: float):
    """All nonempty subsets with at most max_size vertices and at least
    t * |S| induced edges; exhaustive, for certificate validation."""
    if max_size >= 20:
        raise ValueError("enumeration limited to max_size < 20")
    found = []
    adj = [set() for _ in range(g.n)]
    for a, b in g.edges.tolist():
        adj[a].add(b)
        adj[b].add(a)
    for size in range(1, max_size + 1):
        if math.comb(g.n, size) > 5_000_000:
            raise ValueError("subset enumeration too large")
        for sub in combinations(range(g.n), size):
            ss = set(sub)
            inner = sum(len(adj[v] & ss) for v in sub) // 2
            if inner >= t * size:
                found.append(list(sub))
    return found


def bounds_csv_rows(d, grid, mc_means=None, mc_stderrs=None):
    """Rows (k, r, bound, mc_mean, mc_stderr) for a (k, r) grid."""
    rows = []
    for i, (k, r, theta) in enumerate(grid):
        b = expected_dense_count_bound(d, k, r, theta)
        mean = mc_means[i] if mc_means is not None else ""
        se = mc_stderrs[i] if mc_stderrs is not None else ""
        rows.append((k, r, b.bound, mean, se))
    return rows
