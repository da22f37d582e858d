"""Degree distributions and random-graph generators.

Distributions live on a finite support 0..K (Poisson is truncated where the
tail drops below 1e-12 and renormalized).  Graph samplers are deterministic
per seed; replicate streams should be derived with `spawn_seeds`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from densebal.graph import Graph


def as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def spawn_seeds(seed, k: int):
    """k independent child seed sequences for parallel replicates."""
    return np.random.SeedSequence(int(seed)).spawn(k)


@dataclass
class DegreeDistribution:
    pmf: np.ndarray
    name: str = ""

    def __post_init__(self):
        pmf = np.asarray(self.pmf, dtype=np.float64)
        if pmf.ndim != 1 or pmf.size == 0:
            raise ValueError("pmf must be a non-empty vector")
        if pmf.min() < 0:
            raise ValueError("pmf entries must be non-negative")
        s = pmf.sum()
        if abs(s - 1.0) > 1e-12:
            raise ValueError(f"pmf sums to {s}, not 1")
        self.pmf = pmf / s

    @property
    def mean(self) -> float:
        return float(np.arange(self.pmf.size) @ self.pmf)

    @property
    def mass_at_most_one(self) -> float:
        """pi_0 + pi_1; below 1 forces unbounded trees and density >= 1."""
        return float(self.pmf[:2].sum())

    @classmethod
    def regular(cls, d: int) -> "DegreeDistribution":
        pmf = np.zeros(d + 1)
        pmf[d] = 1.0
        return cls(pmf, name=f"regular:{d}")

    @classmethod
    def poisson(cls, lam: float, tail: float = 1e-12) -> "DegreeDistribution":
        if lam < 0:
            raise ValueError("rate must be non-negative")
        if lam == 0:
            return cls(np.array([1.0]), name="poisson:0")
        probs = [math.exp(-lam)]
        cum = probs[0]
        k = 0
        while 1.0 - cum > tail:
            k += 1
            probs.append(probs[-1] * lam / k)
            cum += probs[-1]
        return cls(np.array(probs) / sum(probs), name=f"poisson:{lam:g}")

    @classmethod
    def explicit(cls, probs) -> "DegreeDistribution":
        return cls(np.asarray(probs, dtype=np.float64),
                   name="explicit:" + ",".join(f"{p:g}" for p in probs))

    @classmethod
    def from_spec(cls, spec: str) -> "DegreeDistribution":
        """Grammar: "poisson:<rate>", "regular:<d>", "explicit:<p0,p1,...>"."""
        kind, _, arg = spec.partition(":")
        try:
            if kind == "poisson":
                return cls.poisson(float(arg))
            if kind == "regular":
                return cls.regular(int(arg))
            if kind == "explicit":
                return cls.explicit([float(x) for x in arg.split(",")])
        except (ValueError, TypeError) as exc:
            raise ValueError(f"bad distribution spec {spec!r}: {exc}") from None
        raise ValueError(f"unknown distribution kind in {spec!r}")

    def size_bias(self) -> "DegreeDistribution":
        """The companion law pi_hat[k] = (k+1) pi[k+1] / mean."""
        mu = self.mean
        if mu <= 0:
            raise ValueError("size bias requires positive mean")
        k = np.arange(1, self.pmf.size)
        pmf = k * self.pmf[1:] / mu
        return DegreeDistribution(pmf / pmf.sum(), name=f"size_bias({self.name})")

    def sample(self, size: int, rng) -> np.ndarray:
        cum = np.cumsum(self.pmf)
        return np.searchsorted(cum, as_generator(rng).random(size), side="right").astype(np.int64)


def sample_degree_sequence(dist: DegreeDistribution, n: int, seed) -> np.ndarray:
    """n iid draws; if the sum is odd the last entry is incremented, an O(1/n)
    perturbation of the empirical law."""
    if n < 1:
        raise ValueError("n must be positive")
    d = dist.sample(n, seed)
    if d.sum() % 2 == 1:
        d[-1] += 1
    return d


def pairing_model(d, seed, keep_one: bool = False) -> Graph:
    """Uniform pairing of half-edges, then simplification.

    Default removes loops and every copy of a multiple edge; keep_one=True
    keeps a single copy of each multiple edge instead.
    """
    d = np.asarray(d, dtype=np.int64)
    if d.min(initial=0) < 0:
        raise ValueError("degrees must be non-negative")
    total = int(d.sum())
    if total % 2:
        raise ValueError("degree sum must be even")
    n = d.size
    if total == 0:
        return Graph(n, [])
    owners = np.repeat(np.arange(n, dtype=np.int64), d)
    perm = as_generator(seed).permutation(total)
    pairs = owners[perm].reshape(-1, 2)
    a = np.minimum(pairs[:, 0], pairs[:, 1])
    b = np.maximum(pairs[:, 0], pairs[:, 1])
    keep = a != b  # drop loops
    a, b = a[keep], b[keep]
    key = a * n + b
    uniq, counts = np.unique(key, return_counts=True)
    chosen = uniq if keep_one else uniq[counts == 1]
    return Graph(n, np.stack([chosen // n, chosen % n], axis=1))


def sample_regular_simple(d: int, n: int, seed, max_tries: int = 100_000) -> Graph:
    """Uniform simple d-regular graph: redo the pairing until no loop or
    multiple edge occurred."""
    if (d * n) % 2:
        raise ValueError("d*n must be even")
    rng = as_generator(seed)
    m_target = d * n // 2
    for _ in range(max_tries):
        g = pairing_model(np.full(n, d, dtype=np.int64), rng)
        if g.m == m_target:
            return g
    raise RuntimeError(f"no simple pairing found in {max_tries} tries")


def erdos_renyi_nm(n: int, m: int, seed) -> Graph:
    """Uniform simple graph with exactly m edges (Floyd's sampling)."""
    total = n * (n - 1) // 2
    if m > total:
        raise ValueError(f"m={m} exceeds {total} possible edges")
    rng = as_generator(seed)
    chosen = set()
    for j in range(total - m, total):
        r = int(rng.integers(0, j + 1))
        chosen.add(r if r not in chosen else j)

    edges = np.empty((m, 2), dtype=np.int64)
    for i, k in enumerate(sorted(chosen)):
        # invert k = C(a) + (b - a - 1) with C(a) = a*n - a*(a+1)/2
        a = int((2 * n - 1 - math.isqrt((2 * n - 1) ** 2 - 8 * k)) // 2)
        while a * n - a * (a + 1) // 2 > k:
            a -= 1
        while (a + 1) * n - (a + 1) * (a + 2) // 2 <= k:
            a += 1
        b = a + 1 + (k - (a * n - a * (a + 1) // 2))
        edges[i] = (a, b)
    return Graph(n, edges)


def exp_moment(d, theta: float) -> float:
    """(1/n) sum exp(theta * d_i); the summability certificate for a sequence."""
    d = np.asarray(d, dtype=np.float64)
    return float(np.exp(theta * d).mean())


def log_exp_moment(d, theta: float) -> float:
    """log of exp_moment, overflow-safe."""
    d = np.asarray(d, dtype=np.float64)
    z = theta * d
    mx = z.max()
    return float(mx + np.log(np.exp(z - mx).mean()))
