import numpy as np
import pytest

from d2dcache.coverage import (CoverageTable, coverage_probability,
                               coverage_table, coverage_upper_bound)
from d2dcache.geometry import NetworkConfig
from d2dcache.montecarlo import simulate_coverage

BETA_DB_GRID = (-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0)


def _betas():
    return [10.0 ** (b / 10.0) for b in BETA_DB_GRID]


@pytest.fixture(scope="module")
def cfg():
    return NetworkConfig(n_total=5, n_active=5, radius=1.0, alpha=4.0)


def test_no_interference_is_certain_coverage():
    lone = NetworkConfig(n_total=5, n_active=1)
    for k in (1, 3, 5):
        for beta in (0.1, 1.0, 100.0):
            assert coverage_probability(k, beta, lone) == 1.0
            assert coverage_upper_bound(k, beta, lone) == 1.0


def test_two_device_closed_form():
    # at the top rank the bound is exact: 1 - arctan(1) base to the first power
    cfg2 = NetworkConfig(n_total=2, n_active=2, alpha=4.0)
    expected = 1.0 - np.pi / 4
    assert coverage_probability(2, 1.0, cfg2) == pytest.approx(expected, abs=1e-7)
    assert coverage_upper_bound(2, 1.0, cfg2) == pytest.approx(expected, abs=1e-9)


def test_bound_rank_one_is_one(cfg):
    for beta in _betas():
        assert coverage_upper_bound(1, beta, cfg) == 1.0


def test_bound_power_law_examples():
    base = 1.0 - np.pi / 4
    cfg3 = NetworkConfig(n_total=3, n_active=3, alpha=4.0)
    assert coverage_upper_bound(3, 1.0, cfg3) == pytest.approx(base ** 2, abs=1e-9)


def test_matches_simulation(cfg):
    rep = simulate_coverage(1, 1.0, cfg, trials=200_000, seed=4242)
    ana = coverage_probability(1, 1.0, cfg, "exact")
    assert abs(ana - rep.estimate) <= 3.0 * rep.stderr


def test_bound_dominates_both_modes():
    for alpha in (3.0, 4.0):
        cfg_a = NetworkConfig(n_total=5, n_active=5, alpha=alpha)
        for k in range(1, 6):
            for beta in _betas():
                bound = coverage_upper_bound(k, beta, cfg_a)
                for mode in ("paper", "exact"):
                    assert bound >= coverage_probability(k, beta, cfg_a, mode) - 1e-7


def test_bound_exact_at_top_rank(cfg):
    for beta in _betas():
        gap = abs(coverage_upper_bound(5, beta, cfg)
                  - coverage_probability(5, beta, cfg))
        assert gap <= 1e-6


def test_gap_behavior_on_grid(cfg):
    """The bound's absolute slack shrinks with the serving rank (beyond the
    trivial rank-1 bound) and its multiplicative looseness grows with the
    threshold."""
    gaps = np.array([[coverage_upper_bound(k, beta, cfg)
                      - coverage_probability(k, beta, cfg, "paper")
                      for beta in _betas()] for k in range(1, 6)])
    ratios = np.array([[coverage_upper_bound(k, beta, cfg)
                        / coverage_probability(k, beta, cfg, "paper")
                        for beta in _betas()] for k in range(1, 6)])
    assert np.all(np.diff(gaps[1:, :], axis=0) <= 1e-9)
    assert np.all(np.diff(ratios, axis=1) >= -1e-9)


def test_scale_invariance():
    for rd in (10.0,):
        small = NetworkConfig(n_total=5, n_active=5, radius=1.0, alpha=4.0)
        large = NetworkConfig(n_total=5, n_active=5, radius=rd, alpha=4.0)
        for k in (1, 2, 5):
            for beta in _betas():
                a = coverage_probability(k, beta, small)
                b = coverage_probability(k, beta, large)
                assert abs(a - b) <= 1e-7


def test_monotone_in_beta_and_rank(cfg):
    for mode in ("paper", "exact"):
        values = np.array([[coverage_probability(k, beta, cfg, mode)
                            for beta in _betas()] for k in range(1, 6)])
        assert np.all(np.diff(values, axis=1) <= 1e-9)   # harsher threshold
        assert np.all(np.diff(values, axis=0) <= 1e-9)   # farther server


def test_domain_errors(cfg):
    with pytest.raises(ValueError):
        coverage_probability(0, 1.0, cfg)
    with pytest.raises(ValueError):
        coverage_probability(2, 0.0, cfg)
    with pytest.raises(ValueError):
        coverage_upper_bound(2, -1.0, cfg)


def test_table_construction(cfg):
    table = coverage_table(1.0, cfg, "exact")
    assert len(table.values) == 5
    assert np.all(table.values >= 0.0) and np.all(table.values <= 1.0)
    assert np.all(np.diff(table.values) <= 1e-7)
    assert table.weight_mode == "exact"


def test_table_invariant_enforced(cfg):
    with pytest.raises(ValueError):
        CoverageTable(beta=1.0, values=np.array([0.2, 0.5, 0.1, 0.05, 0.01]),
                      cfg=cfg)
    with pytest.raises(ValueError):
        CoverageTable(beta=1.0, values=np.array([1.2, 0.5, 0.1, 0.05, 0.01]),
                      cfg=cfg)
    with pytest.raises(ValueError):
        CoverageTable(beta=0.0, values=np.full(5, 0.5), cfg=cfg)
