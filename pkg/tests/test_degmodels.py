import numpy as np
import pytest
from scipy.stats import chi2

from densebal import degmodels as dm
from densebal.degmodels import DegreeDistribution
from densebal.graph import Graph


# -- distributions -------------------------------------------------------------


def test_regular_distribution():
    d = DegreeDistribution.regular(3)
    assert d.mean == 3.0
    assert d.mass_at_most_one == 0.0


def test_poisson_truncation_and_mean():
    d = DegreeDistribution.poisson(2.0)
    assert abs(d.pmf.sum() - 1.0) < 1e-12
    assert abs(d.mean - 2.0) < 1e-9


def test_pmf_validation():
    with pytest.raises(ValueError):
        DegreeDistribution(np.array([0.5, 0.4]))
    with pytest.raises(ValueError):
        DegreeDistribution(np.array([1.2, -0.2]))


def test_spec_grammar():
    assert DegreeDistribution.from_spec("regular:3").pmf[3] == 1.0
    assert abs(DegreeDistribution.from_spec("poisson:2").mean - 2) < 1e-9
    e = DegreeDistribution.from_spec("explicit:0,0.3,0.7")
    np.testing.assert_allclose(e.pmf, [0, 0.3, 0.7])
    for bad in ("nope:1", "poisson:x", "explicit:a,b", "poisson"):
        with pytest.raises(ValueError):
            DegreeDistribution.from_spec(bad)


def test_size_bias_regular_shifts_down():
    sb = DegreeDistribution.regular(4).size_bias()
    assert sb.pmf[3] == 1.0 and sb.pmf.size == 4


def test_size_bias_poisson_identity():
    d = DegreeDistribution.poisson(2.0, tail=1e-15)
    sb = d.size_bias()
    k = min(sb.pmf.size, d.pmf.size)
    assert np.abs(sb.pmf[:k] - d.pmf[:k]).max() < 1e-12
    # at the default truncation the identity holds at the truncation scale
    d0 = DegreeDistribution.poisson(2.0)
    sb0 = d0.size_bias()
    k0 = min(sb0.pmf.size, d0.pmf.size)
    assert np.abs(sb0.pmf[:k0] - d0.pmf[:k0]).max() < 5e-12


def test_size_bias_explicit_example():
    sb = DegreeDistribution.explicit([0, 0.5, 0.5]).size_bias()
    np.testing.assert_allclose(sb.pmf, [1 / 3, 2 / 3])


def test_size_bias_zero_mean_rejected():
    with pytest.raises(ValueError):
        DegreeDistribution(np.array([1.0])).size_bias()


# -- degree sequences -----------------------------------------------------------


def test_sample_regular_sequence_deterministic():
    d = dm.sample_degree_sequence(DegreeDistribution.regular(3), 4, 0)
    assert d.tolist() == [3, 3, 3, 3]


def test_parity_fix():
    d = dm.sample_degree_sequence(DegreeDistribution.regular(1), 3, 0)
    assert d.sum() % 2 == 0
    assert sorted(d.tolist()) == [1, 1, 2]


def test_empirical_mean_poisson():
    d = dm.sample_degree_sequence(DegreeDistribution.poisson(2.0), 100_000, 1)
    # CLT: 3 sigma / sqrt(n) with sigma^2 = 2
    assert abs(d.mean() - 2.0) < 3 * np.sqrt(2) / np.sqrt(100_000) + 1e-6


# -- pairing model ----------------------------------------------------------------


def test_pairing_single_edge_certain():
    for seed in range(5):
        g = dm.pairing_model(np.array([1, 1]), seed)
        assert g.edge_set() == {(0, 1)}


def test_pairing_two_double_vertices():
    # all three pairings give either two loops or a double edge, so under
    # remove-all simplification the result is always empty
    for seed in range(40):
        g = dm.pairing_model(np.array([2, 2]), seed)
        assert g.m == 0
    # keep-one retains the double edge in two of three pairings
    hits = sum(dm.pairing_model(np.array([2, 2]), seed, keep_one=True).m
               for seed in range(3000))
    p = hits / 3000
    assert abs(p - 2 / 3) < 3 * np.sqrt((2 / 9) / 3000)


def test_pairing_is_simple_and_degree_bounded():
    rng = np.random.default_rng(2)
    for _ in range(10):
        n = int(rng.integers(4, 60))
        d = dm.sample_degree_sequence(DegreeDistribution.poisson(2.5), n, rng)
        g = dm.pairing_model(d, rng)
        assert (g.degrees <= d).all()
        assert g.degrees.sum() <= d.sum()


def test_pairing_odd_sum_rejected():
    with pytest.raises(ValueError):
        dm.pairing_model(np.array([1, 1, 1]), 0)


def test_pairing_exchangeability_spot_check():
    # relabeling the degree sequence permutes the law: P(edge {0,1}) under
    # d = (1,1,2,2) equals P(edge {2,3}) under the reversed sequence
    n_samples = 10_000
    ss = np.random.SeedSequence
    a = sum((0, 1) in dm.pairing_model(np.array([1, 1, 2, 2]), ss((5, s))).edge_set()
            for s in range(n_samples)) / n_samples
    b = sum((2, 3) in dm.pairing_model(np.array([2, 2, 1, 1]), ss((9, s))).edge_set()
            for s in range(n_samples)) / n_samples
    se = np.sqrt(0.25 / n_samples)
    assert abs(a - b) < 4 * se


def test_sample_regular_simple():
    g = dm.sample_regular_simple(3, 50, 3)
    assert (g.degrees == 3).all() and g.m == 75


# -- uniform G(n, m) ---------------------------------------------------------------


def test_er_exact_edge_count():
    g = dm.erdos_renyi_nm(100, 200, 7)
    assert g.n == 100 and g.m == 200


def test_er_forced_complete():
    assert dm.erdos_renyi_nm(3, 3, 0).edge_set() == {(0, 1), (0, 2), (1, 2)}
    assert dm.erdos_renyi_nm(2, 1, 0).edge_set() == {(0, 1)}


def test_er_m_too_large():
    with pytest.raises(ValueError):
        dm.erdos_renyi_nm(4, 7, 0)


def test_er_pair_decoding_uniformity():
    # every unordered pair appears; small-case exhaustive decode check
    g = dm.erdos_renyi_nm(5, 10, 1)
    assert g.edge_set() == {(i, j) for i in range(5) for j in range(i + 1, 5)}


def test_er_degrees_near_poisson_chi2():
    # G(n, m = n): degree histogram within the chi-square acceptance region of
    # Poisson(2) at significance 1e-3
    n = 10_000
    g = dm.erdos_renyi_nm(n, n, 3)
    pois = DegreeDistribution.poisson(2.0)
    kmax = 8
    probs = np.concatenate([pois.pmf[:kmax], [pois.pmf[kmax:].sum()]])
    counts = np.bincount(np.minimum(g.degrees, kmax), minlength=kmax + 1)
    expected = probs * n
    stat = ((counts - expected) ** 2 / expected).sum()
    assert stat < chi2.ppf(1 - 1e-3, df=kmax)


# -- exponential moments ------------------------------------------------------------


def test_exp_moment_values():
    d = np.array([3, 3, 3])
    assert abs(dm.exp_moment(d, 1.0) - np.exp(3)) < 1e-9
    assert abs(dm.log_exp_moment(d, 1.0) - 3.0) < 1e-12
    big = np.full(10, 500)
    assert np.isfinite(dm.log_exp_moment(big, 2.0))


def test_spawn_seeds_independent_streams():
    kids = dm.spawn_seeds(5, 3)
    assert len(kids) == 3
    draws = [dm.as_generator(k).random(4).tolist() for k in kids]
    assert draws[0] != draws[1] != draws[2]
    again = [dm.as_generator(k).random(4).tolist() for k in dm.spawn_seeds(5, 3)]
    assert draws == again


def test_seed_determinism():
    g1 = dm.pairing_model(np.array([3] * 20), 11)
    g2 = dm.pairing_model(np.array([3] * 20), 11)
    assert g1.edge_set() == g2.edge_set()
    e1 = dm.erdos_renyi_nm(50, 60, 4).edge_set()
    e2 = dm.erdos_renyi_nm(50, 60, 4).edge_set()
    assert e1 == e2
