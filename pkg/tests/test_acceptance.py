"""Acceptance gate: one test per criterion, one printed PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines.  Criteria 7 and 8 share one heavy fixture (about 3-6 minutes with the
compiled kernels).
"""

import math
import time
from fractions import Fraction as F
from itertools import combinations

import numpy as np
import pytest

from densebal import allocate as al
from densebal import degmodels as dm
from densebal import density as D
from densebal import moment_bounds as mb
from densebal import rde
from densebal import trees as tr
from densebal.graph import Graph

GRID_OFFSET = 1 / 277  # keeps thresholds off small-denominator rationals


def _report(num, ok, detail=""):
    print(f"\nACCEPTANCE {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, f"criterion {num} failed: {detail}"


# -- shared batches -----------------------------------------------------------


@pytest.fixture(scope="module")
def small_graphs():
    """200 mixed uniform-edge-count and pairing graphs with n <= 12, with
    enumeration densities and balanced loads precomputed."""
    out = []
    root = np.random.SeedSequence(20250808)
    kids = root.spawn(200)
    for i, kid in enumerate(kids):
        rng = np.random.default_rng(kid)
        n = int(rng.integers(4, 13))
        if i % 2 == 0:
            total = n * (n - 1) // 2
            m = int(rng.integers(0, min(total, 2 * n) + 1))
            g = dm.erdos_renyi_nm(n, m, rng)
        else:
            pi = (dm.DegreeDistribution.poisson(1.7) if i % 4 == 1
                  else dm.DegreeDistribution.regular(3))
            d = dm.sample_degree_sequence(pi, n, rng)
            g = dm.pairing_model(d, rng)
        brute = D.rho_bruteforce(g)
        loads, _ = al.exact_loads(g, tol=1e-8)
        out.append({"graph": g, "brute": brute, "loads": loads})
    return out


@pytest.fixture(scope="module")
def poisson_experiment():
    """Shared heavy computation for criteria 7 and 8: the predicted limit law
    for Poisson(2) and uniform-G(n, n) replicates across the n grid."""
    t0 = time.time()
    pi = dm.DegreeDistribution.poisson(2.0)
    grid = np.arange(-0.1, 3.2, 0.05) + GRID_OFFSET
    rho_mu = rde.rho_of_mu(pi, pool_size=100_000, tol_t=0.01, seed=809)
    curve = rde.predicted_load_cdf(pi, grid, pool_size=100_000, seed=808,
                                   rho_hint=rho_mu)
    per_n = {}
    for n in (500, 2000, 5000):
        ks, rhos = [], []
        for rep in range(10):
            g = dm.erdos_renyi_nm(n, n, np.random.SeedSequence((811, n, rep)))
            dec = D.density_decomposition(g)
            sample = al.empirical_load_distribution(dec.loads())
            ks.append(sample.kolmogorov_to_curve(grid, curve.cdf()))
            rhos.append(float(dec.rho))
        per_n[n] = {"k_median": float(np.median(ks)), "k_max": float(max(ks)),
                    "rho_median": float(np.median(rhos))}
    return {"rho_mu": rho_mu, "per_n": per_n, "elapsed": time.time() - t0}


# -- criteria ------------------------------------------------------------------


def test_criterion_01_regular_graph_loads_and_density():
    t0 = time.time()
    ok = True
    detail = ""
    for kid in np.random.SeedSequence(101).spawn(20):
        g = dm.sample_regular_simple(3, 100, kid)
        loads, _ = al.exact_loads(g, tol=1e-8)
        dev = np.abs(loads - 1.5).max()
        rho = D.rho_maxflow(g).rho
        if dev > 1e-6 or rho != F(3, 2):
            ok = False
            detail = f"load dev {dev:.2e}, rho {rho}"
            break
    elapsed = time.time() - t0
    if elapsed >= 5.0:
        ok, detail = False, f"runtime {elapsed:.1f}s"
    _report(1, ok, detail or f"20 graphs, max|load-1.5| fine, {elapsed:.2f}s")


def test_criterion_02_regular_tree_root_load():
    t0 = time.time()
    tree = tr.complete_regular_tree(3, 4)
    exact = tr.exact_tree_loads(tree, as_fractions=True)
    loads, _ = al.exact_loads(tree, tol=1e-7)
    agree = float(np.abs(loads - float(exact[0])).max())
    elapsed = time.time() - t0
    ok = (exact[0] == F(23, 24)) and agree <= 1e-6 and elapsed < 1.0
    _report(2, ok,
            f"tree n={tree.n}: root load {exact[0]}, stated expectation 23/24; "
            f"engines agree within {agree:.1e}; {elapsed:.2f}s")


def test_criterion_03_bruteforce_equivalence(small_graphs):
    t0 = time.time()
    ok = True
    detail = ""
    for rec in small_graphs:
        g, brute, loads = rec["graph"], rec["brute"], rec["loads"]
        flow = D.rho_maxflow(g)
        if flow.rho != brute.rho or flow.subset != brute.subset:
            ok, detail = False, f"flow {flow.rho} vs brute {brute.rho}"
            break
        if abs(loads.max(initial=0.0) - float(brute.rho)) > 1e-6:
            ok, detail = False, "max load differs from density"
            break
        if g.m:
            argmax = sorted(np.nonzero(loads >= loads.max() - 1 / 300)[0].tolist())
            if argmax != brute.subset:
                ok, detail = False, "argmax set differs from maximizer"
                break
    elapsed = time.time() - t0
    if elapsed >= 60.0:
        ok, detail = False, f"runtime {elapsed:.1f}s"
    _report(3, ok, detail or f"200 graphs exact, {elapsed:.1f}s")


def test_criterion_04_mean_excess_duality(small_graphs):
    rng = np.random.default_rng(404)
    ok = True
    detail = ""
    for rec in small_graphs:
        g, loads = rec["graph"], rec["loads"]
        if g.n == 0:
            continue
        edges = g.edges.tolist()
        tgrid = np.linspace(0.0, loads.max(initial=0.0) + 0.3, 20) + GRID_OFFSET
        subsets = [set(rng.choice(g.n, size=int(rng.integers(1, g.n + 1)),
                                  replace=False).tolist()) for _ in range(50)]
        for t in tgrid:
            lhs = np.clip(loads - t, 0.0, None).sum() / g.n
            for sub in subsets:
                inner = sum(1 for a, b in edges if a in sub and b in sub)
                if lhs < (inner - t * len(sub)) / g.n - 1e-9:
                    ok, detail = False, f"duality violated at t={t:.3f}"
                    break
            level = set(np.nonzero(loads > t)[0].tolist())
            inner = sum(1 for a, b in edges if a in level and b in level)
            if abs(lhs - (inner - t * len(level)) / g.n) > 1e-6:
                ok, detail = False, f"equality fails at level set, t={t:.3f}"
                break
        if not ok:
            break
    _report(4, ok, detail or "duality holds on 200 graphs x 50 subsets x 20 thresholds")


def test_criterion_05_convex_ordering():
    rng = np.random.default_rng(505)
    ok = True
    detail = ""
    for _ in range(50):
        n = int(rng.integers(5, 17))
        edges = [(i, j) for i in range(n) for j in range(i + 1, n)
                 if rng.random() < 0.35]
        g = Graph(n, edges)
        if g.m == 0:
            continue
        l0, _ = al.exact_loads(g, tol=1e-9)
        base = (l0 ** 2).sum()
        for _ in range(20):
            l1 = al.load_of(g, al.Allocation(g, rng.random(g.m)))
            if base > (l1 ** 2).sum() + 1e-6:
                ok, detail = False, f"ordering violated on n={n}"
                break
        if not ok:
            break
    _report(5, ok, detail or "50 graphs x 20 allocations")


def test_criterion_06_rde_closed_forms():
    t0 = time.time()
    reg3 = dm.DegreeDistribution.regular(3)
    e1 = rde.phi_of_t(reg3, 1.0, pool_size=100_000, seed=606)
    e2 = rde.phi_of_t(reg3, 1.6, pool_size=100_000, seed=607)
    rho = rde.rho_of_mu(reg3, pool_size=100_000, tol_t=0.01, seed=608)
    elapsed = time.time() - t0
    ok = (abs(e1.phi - 0.5) <= 0.01 and abs(e2.phi) <= 0.005
          and abs(rho - 1.5) <= 0.02 and elapsed < 30.0)
    _report(6, ok, f"phi(1)={e1.phi:.4f}, phi(1.6)={e2.phi:.4f}, "
                   f"rho={rho:.4f}, {elapsed:.1f}s")


def test_criterion_07_density_convergence(poisson_experiment):
    exp = poisson_experiment
    gap = abs(exp["per_n"][5000]["rho_median"] - exp["rho_mu"])
    ok = gap <= 0.05 and exp["elapsed"] < 600.0
    _report(7, ok, f"median rho(G_5000)={exp['per_n'][5000]['rho_median']:.4f}, "
                   f"rho_mu={exp['rho_mu']:.4f}, gap={gap:.4f}, "
                   f"{exp['elapsed']:.0f}s shared")


def test_criterion_08_load_distribution_convergence(poisson_experiment):
    exp = poisson_experiment
    meds = [exp["per_n"][n]["k_median"] for n in (500, 2000, 5000)]
    ok = (exp["per_n"][5000]["k_max"] <= 0.05
          and all(a >= b - 1e-12 for a, b in zip(meds, meds[1:])))
    _report(8, ok, f"K medians {[f'{x:.4f}' for x in meds]}, "
                   f"max at 5000 = {exp['per_n'][5000]['k_max']:.4f}")


def test_criterion_09_first_moment_bounds():
    # binomial domination and the dense-count bound at 3 sigma over 1e4
    # pairing samples, n=20 regular:3
    d = np.full(20, 3)
    subset = list(range(5))
    bb = mb.binomial_bound(d, subset)
    n_samples = 10_000
    counts = np.empty(n_samples, dtype=np.int64)
    triples = np.empty(n_samples, dtype=np.int64)
    sset = set(subset)
    for i in range(n_samples):
        g = dm.pairing_model(d, np.random.SeedSequence((909, i)))
        edges = g.edges.tolist()
        counts[i] = sum(1 for a, b in edges if a in sset and b in sset)
        # 3-subsets spanning >= 2 edges: paths plus closed triples
        adj = [set() for _ in range(g.n)]
        for a, b in edges:
            adj[a].add(b)
            adj[b].add(a)
        paths = int(sum(dd * (dd - 1) // 2 for dd in g.degrees))
        tri = sum(1 for a, b in edges for c in (adj[a] & adj[b]) if c > b)
        triples[i] = paths - 2 * tri
    ok = True
    detail = ""
    for r in range(1, 6):
        emp = float((counts >= r).mean())
        se = math.sqrt(max(emp * (1 - emp), 1e-12) / n_samples)
        if emp > mb.binomial_tail(bb.trials, bb.p, r) + 3 * se:
            ok, detail = False, f"domination fails at r={r}"
            break
    if ok:
        bound = mb.expected_dense_count_bound(d, 3, 2, 1.0).bound
        se = float(triples.std(ddof=1) / math.sqrt(n_samples))
        if triples.mean() > bound + 3 * se:
            ok, detail = False, "dense-count bound fails"
    # the certified delta at n=200, t=2 has delta*n < 1: the restricted search
    # must find nothing in 100 samples
    if ok:
        d200 = np.full(200, 3)
        z = mb.z_delta_t_bound(d200, 2.0, 1.0)
        cap = int(z.delta * 200)
        for i in range(100):
            g = dm.pairing_model(d200, np.random.SeedSequence((910, i)))
            if mb.search_dense_small(g, cap, 2.0):
                ok, detail = False, "certified-empty size range not empty"
                break
    _report(9, ok, detail or "binomial domination and dense-count bound at "
                             "3 sigma; certificate empty")


def test_criterion_10_density_lower_bound():
    ok = True
    detail = ""
    dists = [dm.DegreeDistribution.poisson(2.0), dm.DegreeDistribution.poisson(4.0),
             dm.DegreeDistribution.regular(2), dm.DegreeDistribution.regular(3),
             dm.DegreeDistribution.explicit([0, 0.3, 0.7])]
    for i, pi in enumerate(dists):
        assert pi.mass_at_most_one < 1.0
        r = rde.rho_of_mu(pi, pool_size=30_000, tol_t=0.02, seed=1000 + i,
                          n_tuples=200_000)
        if r < 1 - 0.02:
            ok, detail = False, f"{pi.name}: rho={r:.4f}"
            break
    _report(10, ok, detail or "all five laws give density >= 0.98")


def _orientation_search(g, k):
    """Literal exhaustive orientation search with in-degree pruning."""
    edges = g.edges.tolist()
    indeg = np.zeros(g.n, dtype=np.int64)

    def place(i):
        if i == len(edges):
            return True
        a, b = edges[i]
        for head in (a, b):
            if indeg[head] < k:
                indeg[head] += 1
                if place(i + 1):
                    indeg[head] -= 1
                    return True
                indeg[head] -= 1
        return False

    return place(0)


def _hakimi_enumeration(g, k):
    adj = [set() for _ in range(g.n)]
    for a, b in g.edges.tolist():
        adj[a].add(b)
        adj[b].add(a)
    for size in range(1, g.n + 1):
        for sub in combinations(range(g.n), size):
            ss = set(sub)
            if sum(len(adj[v] & ss) for v in sub) // 2 > k * size:
                return False
    return True


def test_criterion_11_orientability(small_graphs):
    ok = True
    detail = ""
    for rec in small_graphs:
        g = rec["graph"]
        for k in (1, 2, 3):
            res = D.k_orientable(g, k)
            expected = (_orientation_search(g, k) if g.m <= 18
                        else _hakimi_enumeration(g, k))
            if res.orientable != expected:
                ok, detail = False, f"disagrees on n={g.n}, m={g.m}, k={k}"
                break
            if res.orientable:
                indeg = np.zeros(g.n, dtype=np.int64)
                for _, head in res.orientation:
                    indeg[head] += 1
                if indeg.max(initial=0) > k:
                    ok, detail = False, "orientation witness exceeds k"
                    break
            else:
                hs = set(res.violating_set)
                inner = sum(1 for a, b in g.edges.tolist() if a in hs and b in hs)
                if inner <= k * len(hs):
                    ok, detail = False, "violating-set witness not violating"
                    break
        if not ok:
            break
    _report(11, ok, detail or "200 graphs x k in {1,2,3}, witnesses verified")
