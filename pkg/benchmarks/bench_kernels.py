#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallbacks.

Covers the two hot loops: damped balancing sweeps and push-relabel max flow
(run here through the exact-density routine on uniform G(n, n) graphs).

Usage: python benchmarks/bench_kernels.py [--n 2000] [--repeat 3]
"""

import argparse
import time

import numpy as np

from densebal import degmodels
from densebal.kernels import pyfallback

try:
    from densebal.kernels import _speedups
except ImportError:
    _speedups = None


def bench_jacobi(impl, g, eps, sweeps):
    ea = np.ascontiguousarray(g.edges[:, 0])
    eb = np.ascontiguousarray(g.edges[:, 1])
    theta = np.full(g.m, 0.5)
    base = np.zeros(g.n)
    omega = 2 * eps / (g.max_degree + 2 * eps)
    t0 = time.perf_counter()
    impl.jacobi_epsilon_sweeps(ea, eb, theta, base, g.n, eps, omega, 0.0, sweeps)
    return time.perf_counter() - t0


def density_network(g):
    # decision network for density 1 (p = q = 1): representative arc mix
    n = g.n
    s, t = n, n + 1
    tails, heads, caps = [], [], []
    deg = g.degrees
    for v in range(n):
        tails += [s, v]
        heads += [v, s]
        caps += [int(deg[v]), 0]
        tails += [v, t]
        heads += [t, v]
        caps += [2, 0]
    for a, b in g.edges.tolist():
        tails += [a, b]
        heads += [b, a]
        caps += [1, 1]
    return (n + 2, np.array(tails, dtype=np.int64), np.array(heads, dtype=np.int64),
            np.array(caps, dtype=np.int64), s, t)


def bench_flow(impl, net):
    n, tails, heads, caps, s, t = net
    t0 = time.perf_counter()
    value, _ = impl.max_flow(n, tails, heads, caps, s, t)
    return time.perf_counter() - t0, value


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--sweeps", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    g = degmodels.erdos_renyi_nm(args.n, args.n, 1)
    print(f"graph: n={g.n} m={g.m};  {args.sweeps} balancing sweeps, eps=0.01")
    rows = []
    for name, impl in [("python", pyfallback)] + ([("compiled", _speedups)] if _speedups else []):
        dt = min(bench_jacobi(impl, g, 0.01, args.sweeps) for _ in range(args.repeat))
        rows.append((f"jacobi/{name}", dt))
    net = density_network(g)
    flows = {}
    for name, impl in [("python", pyfallback)] + ([("compiled", _speedups)] if _speedups else []):
        dt, value = min((bench_flow(impl, net) for _ in range(args.repeat)),
                        key=lambda p: p[0])
        flows[name] = value
        rows.append((f"maxflow/{name}", dt))
    if len(flows) == 2 and flows["python"] != flows["compiled"]:
        raise SystemExit("kernel disagreement!")

    width = max(len(r[0]) for r in rows)
    for name, dt in rows:
        print(f"  {name:<{width}}  {dt * 1e3:10.2f} ms")
    pairs = {n.split("/")[0]: {} for n, _ in rows}
    for name, dt in rows:
        kind, impl = name.split("/")
        pairs[kind][impl] = dt
    for kind, d in pairs.items():
        if {"python", "compiled"} <= d.keys():
            print(f"  {kind}: compiled is {d['python'] / d['compiled']:.1f}x faster")


if __name__ == "__main__":
    main()
