"""Pure-Python / numpy kernels.

Same contracts as the compiled module `densebal.kernels._speedups`; used when
the extension is unavailable or DENSEBAL_PURE_PYTHON=1.
"""

from __future__ import annotations

import numpy as np


def jacobi_epsilon_sweeps(ea, eb, theta, base, n, eps, omega, stop_tol, max_sweeps):
    """Damped synchronous clamped-affine balancing sweeps.

    theta[e] is the share of edge e assigned to endpoint eb[e] and is updated
    in place.  Each sweep recomputes all shares from the previous sweep's
    loads, relaxed by the step factor omega in (0, 1]; undamped sweeps are
    only marginally stable (the update is anti-monotone in a vertex's own
    load), while omega = 2 eps / (max_degree + 2 eps) makes the linearized
    sweep contract at factor max_degree / (max_degree + 2 eps).

    Stops when the sup-norm load change drops below stop_tol.
    Returns (sweeps_done, final_load_residual, loads).
    """
    m = len(theta)
    if m == 0:
        return 0, 0.0, np.zeros(n)
    inv = 1.0 / (2.0 * eps)
    loads = (np.bincount(eb, weights=theta, minlength=n)
             + np.bincount(ea, weights=1.0 - theta, minlength=n))
    res = np.inf
    sweeps = 0
    for sweeps in range(1, int(max_sweeps) + 1):
        f = base + loads
        target = np.clip(0.5 + (f[ea] - f[eb]) * inv, 0.0, 1.0)
        step = omega * (target - theta)
        theta += step
        new_loads = (np.bincount(eb, weights=theta, minlength=n)
                     + np.bincount(ea, weights=1.0 - theta, minlength=n))
        # the share vector has load-null directions, so watch both residuals
        res = max(float(np.abs(new_loads - loads).max()),
                  float(np.abs(step).max()))
        loads = new_loads
        if res < stop_tol:
            break
    return sweeps, res, loads


def max_flow(n_nodes, tail, head, cap, s, t):
    """Highest-label push-relabel with the gap heuristic.

    Arcs come in reverse pairs: the reverse of arc q is q ^ 1.  `cap` is the
    integer residual-capacity array; it is consumed and returned (the caller
    reads flows as original_cap - residual).

    Returns (flow_value, residual_cap).
    """
    tail = np.asarray(tail, dtype=np.int64)
    head = np.asarray(head, dtype=np.int64)
    cap = np.asarray(cap, dtype=np.int64).copy()
    M = len(tail)
    if M == 0 or s == t:
        return 0, cap

    order = np.argsort(tail, kind="stable")
    first = np.zeros(n_nodes + 1, dtype=np.int64)
    np.cumsum(np.bincount(tail, minlength=n_nodes), out=first[1:])
    arcs = order  # arc ids grouped by tail

    N = n_nodes
    height = [0] * N
    excess = [0] * N
    cur = [int(first[v]) for v in range(N)]
    count = [0] * (2 * N + 2)
    count[0] = N - 1
    height[s] = N
    count[N] += 1

    buckets = [[] for _ in range(2 * N + 1)]
    hd = head.tolist()
    cp = cap.tolist()
    ar = arcs.tolist()
    fs = first.tolist()

    def activate(v):
        if v != s and v != t:
            buckets[height[v]].append(v)

    for idx in range(fs[s], fs[s + 1]):
        a = ar[idx]
        d = cp[a]
        if d > 0:
            v = hd[a]
            cp[a] = 0
            cp[a ^ 1] += d
            was = excess[v]
            excess[v] += d
            excess[s] -= d
            if was == 0 and v != t:
                activate(v)

    hi = N - 1
    while hi >= 0:
        if not buckets[hi]:
            hi -= 1
            continue
        u = buckets[hi].pop()
        if excess[u] <= 0 or height[u] != hi:
            continue
        while excess[u] > 0:
            if cur[u] == fs[u + 1]:
                old = height[u]
                newh = 2 * N
                for idx in range(fs[u], fs[u + 1]):
                    a = ar[idx]
                    if cp[a] > 0 and height[hd[a]] + 1 < newh:
                        newh = height[hd[a]] + 1
                cur[u] = fs[u]
                count[old] -= 1
                if count[old] == 0 and 0 < old < N:
                    # gap: nothing at height `old`, so heights in (old, N)
                    # cannot reach t; lift them past N (re-bucket the ones
                    # still carrying excess so they drain back toward s)
                    for v in range(N):
                        if old < height[v] < N and v != s:
                            count[height[v]] -= 1
                            height[v] = N + 1
                            count[N + 1] += 1
                            if excess[v] > 0 and v != t:
                                buckets[N + 1].append(v)
                    if newh < N + 1:
                        newh = N + 1
                if newh >= 2 * N:
                    height[u] = 2 * N
                    break
                height[u] = newh
                count[newh] += 1
                if newh > hi:
                    hi = newh
            else:
                a = ar[cur[u]]
                v = hd[a]
                if cp[a] > 0 and height[u] == height[v] + 1:
                    d = excess[u] if excess[u] < cp[a] else cp[a]
                    cp[a] -= d
                    cp[a ^ 1] += d
                    excess[u] -= d
                    was = excess[v]
                    excess[v] += d
                    if was == 0 and v != s and v != t:
                        buckets[height[v]].append(v)
                else:
                    cur[u] += 1

    return int(excess[t]), np.array(cp, dtype=np.int64)
