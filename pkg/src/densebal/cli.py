"""Command-line front end and experiment harness.

Subcommands: gen, balance, density, predict, compare, bound.  Every command is
deterministic given --seed (and --workers 1), outputs are batch JSON/CSV for
external plotting, and each output embeds the full config plus a version
string.  Exit codes: 0 success, 1 internal error, 2 usage/config error,
3 non-convergence.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

import densebal
from densebal import allocate, degmodels, density, moment_bounds, rde
from densebal.allocate import NonConvergenceError
from densebal.graph import EdgeListError, load_edge_list

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_NONCONV = 0, 1, 2, 3

_VERSION_CACHE = None

# grid offset keeping thresholds away from small-denominator rationals, where
# the load laws carry atoms
GRID_OFFSET = 1.0 / 277.0


def version_string() -> str:
    global _VERSION_CACHE
    if _VERSION_CACHE is None:
        try:
            out = subprocess.run(["git", "describe", "--always", "--dirty"],
                                 capture_output=True, text=True, timeout=5)
            desc = out.stdout.strip()
        except OSError:
            desc = ""
        _VERSION_CACHE = f"densebal {densebal.__version__}" + (f" ({desc})" if desc else "")
    return _VERSION_CACHE


def _workers(args) -> int:
    if getattr(args, "workers", None):
        return args.workers
    env = os.environ.get("BALANCED_LOADS_WORKERS")
    return int(env) if env else 1


def _config_dict(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit_json(payload: dict, args, path=None) -> None:
    payload = dict(payload)
    payload["config"] = _config_dict(args)
    payload["version"] = version_string()
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _write_csv(path, header, rows, args) -> None:
    def fmt(x):
        if isinstance(x, float):
            return f"{x:.17g}"
        return str(x)

    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {version_string()}\n")
        for k, v in sorted(_config_dict(args).items()):
            fh.write(f"# {k}={v}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(x) for x in row) + "\n")


def _parse_t_grid(spec: str) -> np.ndarray:
    """"start:stop:count" or a comma list."""
    if ":" in spec:
        a, b, c = spec.split(":")
        return np.linspace(float(a), float(b), int(c))
    return np.array([float(x) for x in spec.split(",")])


# -- gen ------------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.model == "er":
        if args.m is None:
            raise ValueError("er model needs --m")
        g = degmodels.erdos_renyi_nm(args.n, args.m, args.seed)
    else:
        dist = degmodels.DegreeDistribution.from_spec(args.model)
        d = degmodels.sample_degree_sequence(dist, args.n, args.seed)
        g = degmodels.pairing_model(d, np.random.SeedSequence((args.seed, 1)),
                                    keep_one=args.keep_one)
    g.write_edge_list(args.out)
    print(f"wrote {args.out}: n={g.n} m={g.m}")
    return EXIT_OK


# -- balance ----------------------------------------------------------------


def cmd_balance(args) -> int:
    g = load_edge_list(args.graph)
    if args.mode == "eps":
        if args.eps is None:
            raise ValueError("--eps is required in eps mode")
        alloc = allocate.epsilon_balance(g, args.eps, tol=args.tol)
        loads = allocate.load_of(g, alloc)
    else:
        loads, alloc = allocate.exact_loads(g, tol=args.tol)
    payload = json.loads(allocate.allocation_to_json(alloc))
    payload["loads"] = [float(x) for x in loads]
    payload["mode"] = args.mode
    _emit_json(payload, args, args.out_json)
    if args.out_csv:
        _write_csv(args.out_csv, ["vertex", "load"],
                   [(v, float(x)) for v, x in enumerate(loads)], args)
    return EXIT_OK


# -- density ----------------------------------------------------------------


def cmd_density(args) -> int:
    g = load_edge_list(args.graph)
    if args.brute:
        res = density.rho_bruteforce(g)
    else:
        res = density.rho_maxflow(g)
    payload = res.as_json_dict()
    if args.decompose:
        payload = density.density_decomposition(g).as_json_dict()
    _emit_json(payload, args, args.out_json)
    return EXIT_OK


# -- predict ----------------------------------------------------------------


def cmd_predict(args) -> int:
    pi = degmodels.DegreeDistribution.from_spec(args.pi)
    grid = _parse_t_grid(args.t_grid)
    rho = rde.rho_of_mu(pi, pool_size=args.pool_size, tol_t=args.tol_t, seed=args.seed)
    curve = rde.predicted_load_cdf(pi, grid, pool_size=args.pool_size, seed=args.seed,
                                   rho_hint=rho)
    if args.out_csv:
        rows = [(float(t), float(p), float(s), float(q), float(qs), br)
                for t, p, s, q, qs, br in zip(curve.t, curve.phi, curve.stderr,
                                              curve.tail, curve.tail_stderr, curve.branch)]
        _write_csv(args.out_csv, ["t", "phi", "stderr", "tail", "tail_stderr", "branch"],
                   rows, args)
    nonmono = float(np.max(np.diff(curve.phi), initial=-np.inf))
    _emit_json({"rho": rho, "phi_max_increase": nonmono,
                "grid": [float(t) for t in curve.t]}, args, args.out_json)
    return EXIT_OK


# -- compare ----------------------------------------------------------------


def _compare_replicate(job) -> dict:
    (n, rep, pi_spec, ensemble, seed_entropy, grid, pred_cdf) = job
    pi = degmodels.DegreeDistribution.from_spec(pi_spec)
    ss = np.random.SeedSequence(seed_entropy)
    if ensemble == "er":
        m = int(round(pi.mean / 2.0 * n))
        g = degmodels.erdos_renyi_nm(n, m, ss)
    else:
        d = degmodels.sample_degree_sequence(pi, n, ss)
        g = degmodels.pairing_model(d, np.random.SeedSequence(seed_entropy + (7,)))
    dec = density.density_decomposition(g)
    loads = dec.loads()
    sample = allocate.empirical_load_distribution(loads)
    grid = np.asarray(grid)
    pred_cdf = np.asarray(pred_cdf)
    kol = sample.kolmogorov_to_curve(grid, pred_cdf)
    w1 = float(np.sum(np.abs(sample.cdf(grid[:-1]) - pred_cdf[:-1]) * np.diff(grid)))
    return {"n": n, "replicate": rep, "kolmogorov": kol, "wasserstein1": w1,
            "rho": float(dec.rho), "rho_num": dec.rho.numerator,
            "rho_den": dec.rho.denominator}


def cmd_compare(args) -> int:
    pi = degmodels.DegreeDistribution.from_spec(args.pi)
    n_grid = [int(x) for x in args.n_grid.split(",")]
    t_hi = max(2.0, pi.mean) + 1.0
    grid = np.arange(-0.25, t_hi, args.t_step) + GRID_OFFSET
    rho_mu = rde.rho_of_mu(pi, pool_size=args.pool_size, tol_t=args.tol_t,
                           seed=args.seed)
    curve = rde.predicted_load_cdf(pi, grid, pool_size=args.pool_size,
                                   seed=args.seed, rho_hint=rho_mu)
    pred_cdf = curve.cdf()

    jobs = []
    for n in n_grid:
        for rep in range(args.replicates):
            jobs.append((n, rep, args.pi, args.ensemble,
                         (args.seed, n, rep), tuple(grid), tuple(pred_cdf)))
    workers = _workers(args)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_compare_replicate, jobs))
    else:
        results = [_compare_replicate(j) for j in jobs]
    results.sort(key=lambda r: (r["n"], r["replicate"]))

    if args.out_csv:
        _write_csv(args.out_csv,
                   ["n", "replicate", "kolmogorov", "wasserstein1", "rho"],
                   [(r["n"], r["replicate"], r["kolmogorov"], r["wasserstein1"],
                     r["rho"]) for r in results], args)

    summary = {"rho_mu": rho_mu, "per_n": {}}
    medians = []
    for n in n_grid:
        sel = [r for r in results if r["n"] == n]
        ks = sorted(r["kolmogorov"] for r in sel)
        ws = sorted(r["wasserstein1"] for r in sel)
        rhos = sorted(r["rho"] for r in sel)
        med = lambda xs: float(np.median(xs))
        summary["per_n"][str(n)] = {
            "kolmogorov_median": med(ks), "kolmogorov_q90": float(np.quantile(ks, 0.9)),
            "wasserstein1_median": med(ws),
            "rho_median": med(rhos), "rho_min": rhos[0], "rho_max": rhos[-1],
            "abs_rho_gap_median": abs(med(rhos) - rho_mu),
        }
        medians.append(med(ks))
    if any(a < b - 1e-12 for a, b in zip(medians, medians[1:])):
        print("warning: median distance to the predicted law is not "
              "non-increasing across the n grid", file=sys.stderr)
    _emit_json(summary, args, args.out_json)
    return EXIT_OK


# -- bound ------------------------------------------------------------------


def cmd_bound(args) -> int:
    if args.degree_file:
        with open(args.degree_file, "r", encoding="utf-8") as fh:
            d = np.array([int(line.strip()) for line in fh if line.strip()],
                         dtype=np.int64)
    elif args.model:
        dist = degmodels.DegreeDistribution.from_spec(args.model)
        d = degmodels.sample_degree_sequence(dist, args.n, args.seed)
    else:
        raise ValueError("need --degree-file or --model")
    z = moment_bounds.z_delta_t_bound(d, args.t, args.theta)
    payload = {"n": int(d.size), "t": z.t, "theta": z.theta, "alpha": z.alpha,
               "log_lam": z.log_lam, "delta": z.delta, "f_delta": z.f_delta,
               "split_m": z.split_m, "bound": z.bound, "kappa": z.kappa,
               "exact_sum": z.exact_sum}
    if args.out_csv:
        kr = [(k, max(1, int(np.ceil(k * args.t))), args.theta) for k in (2, 3, 4, 5)]
        rows = moment_bounds.bounds_csv_rows(d, kr)
        _write_csv(args.out_csv, ["k", "r", "bound", "mc_mean", "mc_stderr"],
                   rows, args)
    _emit_json(payload, args, args.out_json)
    return EXIT_OK


# -- wiring -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="densebal",
                                 description="balanced loads and densest subgraphs")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="sample a random graph to an edge-list file")
    p.add_argument("--model", required=True,
                   help="er | regular:<d> | poisson:<rate> | explicit:<p0,p1,...>")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=None, help="edge count for the er model")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--keep-one", action="store_true",
                   help="keep one copy of multiple edges instead of removing all")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("balance", help="balanced or relaxed loads of a graph file")
    p.add_argument("--graph", required=True)
    p.add_argument("--mode", choices=["eps", "exact"], default="exact")
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out-json", default=None)
    p.add_argument("--out-csv", default=None)
    p.set_defaults(func=cmd_balance)

    p = sub.add_parser("density", help="maximum subgraph density (exact rational)")
    p.add_argument("--graph", required=True)
    p.add_argument("--brute", action="store_true", help="subset enumeration (n <= 22)")
    p.add_argument("--decompose", action="store_true", help="full density decomposition")
    p.add_argument("--out-json", default=None)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("predict", help="limit predictions from a degree law")
    p.add_argument("--pi", required=True)
    p.add_argument("--t-grid", default="0:3:31")
    p.add_argument("--pool-size", type=int, default=100_000)
    p.add_argument("--tol-t", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-csv", default=None)
    p.add_argument("--out-json", default=None)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("compare", help="finite graphs against the limit prediction")
    p.add_argument("--pi", required=True)
    p.add_argument("--n-grid", required=True, help="comma list, e.g. 500,2000,5000")
    p.add_argument("--replicates", type=int, default=10)
    p.add_argument("--ensemble", choices=["pairing", "er"], default="pairing")
    p.add_argument("--t-step", type=float, default=0.05)
    p.add_argument("--pool-size", type=int, default=50_000)
    p.add_argument("--tol-t", type=float, default=0.02)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out-csv", default=None)
    p.add_argument("--out-json", default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bound", help="first-moment dense-subset bounds")
    p.add_argument("--degree-file", default=None)
    p.add_argument("--model", default=None)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-csv", default=None)
    p.add_argument("--out-json", default=None)
    p.set_defaults(func=cmd_bound)

    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONV
    except (ValueError, EdgeListError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # pragma: no cover - internal failure path
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
