# Compiled kernels: synchronous balancing sweeps and push-relabel max flow.
# Contracts match densebal.kernels.pyfallback exactly.

import numpy as np

cimport numpy as cnp

cnp.import_array()


def jacobi_epsilon_sweeps(const cnp.int64_t[::1] ea, const cnp.int64_t[::1] eb,
                          cnp.float64_t[::1] theta, const cnp.float64_t[::1] base,
                          Py_ssize_t n, double eps, double omega,
                          double stop_tol, long max_sweeps):
    """Damped synchronous clamped-affine balancing sweeps; see pyfallback twin."""
    cdef Py_ssize_t m = theta.shape[0]
    if m == 0:
        return 0, 0.0, np.zeros(n)

    loads_np = np.zeros(n, dtype=np.float64)
    new_np = np.zeros(n, dtype=np.float64)
    cdef cnp.float64_t[::1] loads = loads_np
    cdef cnp.float64_t[::1] new = new_np
    cdef double inv = 1.0 / (2.0 * eps)
    cdef double res = 0.0, x, diff, step
    cdef Py_ssize_t e, v, sweeps = 0
    cdef long sw

    for e in range(m):
        loads[eb[e]] += theta[e]
        loads[ea[e]] += 1.0 - theta[e]

    for sw in range(1, max_sweeps + 1):
        sweeps = sw
        res = 0.0
        for e in range(m):
            x = 0.5 + (base[ea[e]] + loads[ea[e]] - base[eb[e]] - loads[eb[e]]) * inv
            if x < 0.0:
                x = 0.0
            elif x > 1.0:
                x = 1.0
            step = omega * (x - theta[e])
            theta[e] = theta[e] + step
            if step < 0.0:
                step = -step
            # the share vector has load-null directions, so watch both residuals
            if step > res:
                res = step
        for v in range(n):
            new[v] = 0.0
        for e in range(m):
            new[eb[e]] += theta[e]
            new[ea[e]] += 1.0 - theta[e]
        for v in range(n):
            diff = new[v] - loads[v]
            if diff < 0.0:
                diff = -diff
            if diff > res:
                res = diff
            loads[v] = new[v]
        if res < stop_tol:
            break
    return sweeps, res, loads_np


def max_flow(Py_ssize_t n_nodes, tail_in, head_in, cap_in, Py_ssize_t s, Py_ssize_t t):
    """Highest-label push-relabel with gap heuristic; see pyfallback twin."""
    tail_np = np.ascontiguousarray(tail_in, dtype=np.int64)
    head_np = np.ascontiguousarray(head_in, dtype=np.int64)
    cap_np = np.array(cap_in, dtype=np.int64)
    cdef Py_ssize_t M = tail_np.shape[0]
    if M == 0 or s == t:
        return 0, cap_np

    order_np = np.argsort(tail_np, kind="stable").astype(np.int64)
    first_np = np.zeros(n_nodes + 1, dtype=np.int64)
    first_np[1:] = np.cumsum(np.bincount(tail_np, minlength=n_nodes))

    cdef cnp.int64_t[::1] head = head_np
    cdef cnp.int64_t[::1] cap = cap_np
    cdef cnp.int64_t[::1] arcs = order_np
    cdef cnp.int64_t[::1] first = first_np

    cdef Py_ssize_t N = n_nodes
    height_np = np.zeros(N, dtype=np.int64)
    excess_np = np.zeros(N, dtype=np.int64)
    cur_np = first_np[:N].copy()
    count_np = np.zeros(2 * N + 2, dtype=np.int64)
    # one bucket stack per height, intrusive singly-linked list
    bhead_np = np.full(2 * N + 1, -1, dtype=np.int64)
    bnext_np = np.full(N, -1, dtype=np.int64)

    cdef cnp.int64_t[::1] height = height_np
    cdef cnp.int64_t[::1] excess = excess_np
    cdef cnp.int64_t[::1] cur = cur_np
    cdef cnp.int64_t[::1] count = count_np
    cdef cnp.int64_t[::1] bhead = bhead_np
    cdef cnp.int64_t[::1] bnext = bnext_np

    count[0] = N - 1
    height[s] = N
    count[N] += 1

    cdef Py_ssize_t idx, a, u, v, hi, old, newh
    cdef cnp.int64_t d, was

    for idx in range(first[s], first[s + 1]):
        a = arcs[idx]
        d = cap[a]
        if d > 0:
            v = head[a]
            cap[a] = 0
            cap[a ^ 1] += d
            was = excess[v]
            excess[v] += d
            excess[s] -= d
            if was == 0 and v != t and v != s:
                bnext[v] = bhead[height[v]]
                bhead[height[v]] = v

    hi = N - 1
    while hi >= 0:
        u = bhead[hi]
        if u < 0:
            hi -= 1
            continue
        bhead[hi] = bnext[u]
        if excess[u] <= 0 or height[u] != hi:
            continue
        while excess[u] > 0:
            if cur[u] == first[u + 1]:
                old = height[u]
                newh = 2 * N
                for idx in range(first[u], first[u + 1]):
                    a = arcs[idx]
                    if cap[a] > 0 and height[head[a]] + 1 < newh:
                        newh = height[head[a]] + 1
                cur[u] = first[u]
                count[old] -= 1
                if count[old] == 0 and 0 < old < N:
                    for v in range(N):
                        if old < height[v] < N and v != s:
                            count[height[v]] -= 1
                            height[v] = N + 1
                            count[N + 1] += 1
                            if excess[v] > 0 and v != t:
                                bnext[v] = bhead[N + 1]
                                bhead[N + 1] = v
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
                a = arcs[cur[u]]
                v = head[a]
                if cap[a] > 0 and height[u] == height[v] + 1:
                    d = excess[u]
                    if cap[a] < d:
                        d = cap[a]
                    cap[a] -= d
                    cap[a ^ 1] += d
                    excess[u] -= d
                    was = excess[v]
                    excess[v] += d
                    if was == 0 and v != s and v != t:
                        bnext[v] = bhead[height[v]]
                        bhead[height[v]] = v
                else:
                    cur[u] += 1

    return int(excess[t]), cap_np
