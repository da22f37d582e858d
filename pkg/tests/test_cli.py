import json

import numpy as np
import pytest

from densebal.cli import main
from densebal.graph import load_edge_list


def run(args):
    return main(args)


def test_gen_regular_degrees_bounded(tmp_path):
    out = tmp_path / "g.edges"
    assert run(["gen", "--model", "regular:3", "--n", "10", "--seed", "1",
                "--out", str(out)]) == 0
    g = load_edge_list(str(out))
    assert g.n == 10 and g.degrees.max() <= 3


def test_gen_er_exact_edges(tmp_path):
    out = tmp_path / "er.edges"
    assert run(["gen", "--model", "er", "--n", "100", "--m", "200", "--seed", "7",
                "--out", str(out)]) == 0
    g = load_edge_list(str(out))
    assert g.m == 200


def test_gen_poisson_round_trip(tmp_path):
    out = tmp_path / "p.edges"
    assert run(["gen", "--model", "poisson:2", "--n", "1000", "--seed", "3",
                "--out", str(out)]) == 0
    assert load_edge_list(str(out)).n == 1000


def test_gen_bad_spec_exit_code(tmp_path):
    assert run(["gen", "--model", "bogus:2", "--n", "10", "--seed", "1",
                "--out", str(tmp_path / "x")]) == 2
    assert run(["gen", "--model", "er", "--n", "10", "--seed", "1",
                "--out", str(tmp_path / "y")]) == 2  # er without --m


def test_balance_exact_path3(tmp_path):
    graph = tmp_path / "p3.edges"
    graph.write_text("0 1\n1 2\n")
    out = tmp_path / "b.json"
    assert run(["balance", "--graph", str(graph), "--mode", "exact",
                "--out-json", str(out)]) == 0
    payload = json.loads(out.read_text())
    np.testing.assert_allclose(payload["loads"], 2 / 3, atol=1e-6)
    assert "config" in payload and "version" in payload


def test_balance_eps_k2(tmp_path):
    graph = tmp_path / "k2.edges"
    graph.write_text("0 1\n")
    out = tmp_path / "b.json"
    assert run(["balance", "--graph", str(graph), "--mode", "eps", "--eps", "0.5",
                "--out-json", str(out)]) == 0
    payload = json.loads(out.read_text())
    np.testing.assert_allclose(payload["loads"], [0.5, 0.5], atol=1e-8)


def test_balance_eps_requires_eps(tmp_path):
    graph = tmp_path / "k2.edges"
    graph.write_text("0 1\n")
    assert run(["balance", "--graph", str(graph), "--mode", "eps"]) == 2


def test_balance_missing_file():
    assert run(["balance", "--graph", "/nonexistent/xyz.edges"]) == 2


def test_density_star_and_brute_agree(tmp_path, capsys):
    graph = tmp_path / "star.edges"
    graph.write_text("0 1\n0 2\n0 3\n")
    assert run(["density", "--graph", str(graph)]) == 0
    flow = json.loads(capsys.readouterr().out)
    assert (flow["rho_num"], flow["rho_den"]) == (3, 4)
    assert run(["density", "--graph", str(graph), "--brute"]) == 0
    brute = json.loads(capsys.readouterr().out)
    assert (brute["rho_num"], brute["rho_den"], brute["H"]) == (3, 4, [0, 1, 2, 3])


def test_predict_regular3(tmp_path, capsys):
    out_csv = tmp_path / "phi.csv"
    assert run(["predict", "--pi", "regular:3", "--t-grid", "0.5,1.0,1.4,1.6",
                "--pool-size", "2000", "--seed", "5", "--out-csv", str(out_csv)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert abs(summary["rho"] - 1.5) < 0.02
    assert summary["phi_max_increase"] <= 1e-9
    lines = out_csv.read_text().splitlines()
    header = next(l for l in lines if not l.startswith("#"))
    assert header.split(",")[:2] == ["t", "phi"]


def test_compare_small_run(tmp_path, capsys):
    out_csv = tmp_path / "cmp.csv"
    code = run(["compare", "--pi", "regular:3", "--n-grid", "20,40",
                "--replicates", "2", "--pool-size", "2000", "--seed", "0",
                "--t-step", "0.25", "--out-csv", str(out_csv)])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert abs(summary["rho_mu"] - 1.5) < 0.05
    # 3-regular samples have density exactly 3/2 when connected-regular
    rows = [l for l in out_csv.read_text().splitlines() if not l.startswith("#")]
    assert rows[0].split(",") == ["n", "replicate", "kolmogorov", "wasserstein1", "rho"]
    assert len(rows) == 1 + 4


def test_bound_report(tmp_path, capsys):
    out_csv = tmp_path / "bound.csv"
    assert run(["bound", "--model", "regular:3", "--n", "200", "--t", "2",
                "--theta", "1", "--out-csv", str(out_csv)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["alpha"] == 3.0 and payload["delta"] <= 0.5
    assert out_csv.exists()


def test_bound_needs_source():
    assert run(["bound", "--t", "2"]) == 2


def test_deterministic_outputs(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    for name in ("a", "b"):
        sub = tmp_path / name
        sub.mkdir()
        monkeypatch.chdir(sub)
        assert run(["gen", "--model", "poisson:2", "--n", "200", "--seed", "9",
                    "--out", "g.edges"]) == 0
        assert run(["predict", "--pi", "regular:3", "--t-grid", "1.0,1.6",
                    "--pool-size", "2000", "--seed", "4", "--out-csv", "p.csv",
                    "--out-json", "p.json"]) == 0
    capsys.readouterr()
    assert (tmp_path / "a" / "g.edges").read_text() == (tmp_path / "b" / "g.edges").read_text()
    assert (tmp_path / "a" / "p.csv").read_text() == (tmp_path / "b" / "p.csv").read_text()
    assert (tmp_path / "a" / "p.json").read_text() == (tmp_path / "b" / "p.json").read_text()


def test_compare_workers_agree_with_serial(tmp_path, capsys):
    outs = {}
    for workers, name in ((1, "serial"), (2, "pool")):
        out_csv = tmp_path / f"{name}.csv"
        assert run(["compare", "--pi", "regular:3", "--n-grid", "20",
                    "--replicates", "4", "--pool-size", "2000", "--seed", "2",
                    "--t-step", "0.25", "--workers", str(workers),
                    "--out-csv", str(out_csv)]) == 0
        capsys.readouterr()
        outs[name] = [l for l in out_csv.read_text().splitlines()
                      if not l.startswith("#") and "workers" not in l]
    assert outs["serial"] == outs["pool"]


def test_usage_error_exit_code():
    assert run(["balance"]) == 2  # missing required --graph
    assert run([]) == 2
