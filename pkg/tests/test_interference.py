import numpy as np
import pytest
from scipy import stats

from d2dcache.geometry import NetworkConfig
from d2dcache.interference import (laplace_interference, laplace_mc_oracle,
                                   mixture_weights, mixture_weights_exact)
from d2dcache.specfun import hyp2f1_caching


@pytest.fixture
def cfg():
    return NetworkConfig(n_total=5, n_active=5, radius=1.0, alpha=4.0)


def test_weights_rank_one_is_point_mass(cfg):
    for fn in (mixture_weights, mixture_weights_exact):
        mix = fn(1, cfg)
        assert mix.n_cap == 0
        np.testing.assert_allclose(mix.weights, [1.0])


def test_weights_small_case():
    cfg = NetworkConfig(n_total=3, n_active=2)
    for fn in (mixture_weights, mixture_weights_exact):
        mix = fn(2, cfg)
        assert mix.p == pytest.approx(0.5)
        np.testing.assert_allclose(mix.weights, [0.5, 0.5], atol=1e-14)


def test_weights_truncated_binomial_case(cfg):
    mix = mixture_weights(3, cfg)
    assert mix.p == pytest.approx(0.5)
    assert mix.n_cap == 2
    np.testing.assert_allclose(mix.weights, np.array([1, 4, 6]) / 11, atol=1e-12)


def test_weights_exact_all_active_is_deterministic(cfg):
    mix = mixture_weights_exact(3, cfg)
    np.testing.assert_allclose(mix.weights, [0.0, 0.0, 1.0], atol=1e-14)


def test_weights_exact_matches_hypergeom_pmf():
    # independent oracle: scipy's hypergeometric pmf
    for n_t, n_a, k in [(7, 4, 3), (9, 5, 6), (6, 6, 4), (8, 2, 5)]:
        cfg = NetworkConfig(n_total=n_t, n_active=n_a)
        mix = mixture_weights_exact(k, cfg)
        ref = stats.hypergeom.pmf(np.arange(mix.n_cap + 1),
                                  n_t - 1, k - 1, n_a - 1)
        np.testing.assert_allclose(mix.weights, ref, atol=1e-12)


def test_weights_sum_and_bounds_grid():
    for n_t in (2, 5, 12):
        for n_a in range(1, n_t + 1):
            cfg = NetworkConfig(n_total=n_t, n_active=n_a)
            for k in range(1, n_t + 1):
                for fn in (mixture_weights, mixture_weights_exact):
                    mix = fn(k, cfg)
                    assert len(mix.weights) == mix.n_cap + 1
                    assert abs(mix.weights.sum() - 1.0) <= 1e-12
                    assert np.all(mix.weights >= 0.0)
                    assert np.all(mix.weights <= 1.0)


def test_weights_single_device():
    cfg = NetworkConfig(n_total=1, n_active=1)
    for fn in (mixture_weights, mixture_weights_exact):
        np.testing.assert_allclose(fn(1, cfg).weights, [1.0])


def test_weights_rank_out_of_range(cfg):
    for fn in (mixture_weights, mixture_weights_exact):
        with pytest.raises(ValueError):
            fn(6, cfg)


def test_laplace_trivial_values(cfg):
    assert laplace_interference(0.0, 0.5, 2, cfg) == 1.0
    lone = NetworkConfig(n_total=5, n_active=1)
    assert laplace_interference(3.0, 0.5, 2, lone) == 1.0


def test_laplace_domain_errors(cfg):
    with pytest.raises(ValueError):
        laplace_interference(-1.0, 0.5, 2, cfg)
    with pytest.raises(ValueError):
        laplace_interference(1.0, 0.0, 2, cfg)
    with pytest.raises(ValueError):
        laplace_interference(1.0, 1.1, 2, cfg)
    with pytest.raises(ValueError):
        laplace_interference(1.0, 1.0, 2, cfg)  # r = radius needs k = n_total
    with pytest.raises(ValueError):
        laplace_interference(1.0, 0.5, 2, cfg, weight_mode="bogus")
    laplace_interference(1.0, 1.0, 5, cfg)  # allowed at the top rank


def test_laplace_monotone_in_s_and_bounded(cfg):
    svals = np.geomspace(0.01, 30.0, 12)
    for k in (1, 2, 3, 5):
        for r in (0.2, 0.5, 0.8):
            for mode in ("paper", "exact"):
                vals = [laplace_interference(s, r, k, cfg, mode) for s in svals]
                assert all(0.0 < v <= 1.0 for v in vals)
                assert all(a > b for a, b in zip(vals, vals[1:]))


def test_laplace_top_rank_closed_form(cfg):
    # with the outer set empty and all devices active, the transform is the
    # inner factor to the power of the interferer count
    r, beta = 0.7, 2.0
    s = beta * r ** cfg.alpha
    inner = 1.0 - hyp2f1_caching(cfg.alpha, -1.0 / beta)
    expected = inner ** (cfg.n_active - 1)
    assert laplace_interference(s, r, 5, cfg, "exact") == pytest.approx(
        expected, rel=1e-10)
    assert laplace_interference(s, r, 5, cfg, "paper") == pytest.approx(
        expected, rel=1e-10)


def test_laplace_thin_annulus_path_continuous(cfg):
    # values straddling the stabilized-outer-factor switchover must agree
    lhs = laplace_interference(1.0, 0.9899, 5, cfg, "exact")
    rhs = laplace_interference(1.0, 0.9901, 5, cfg, "exact")
    assert lhs == pytest.approx(rhs, abs=2e-4)


def test_mc_oracle_trivials(cfg):
    est, se = laplace_mc_oracle(0.0, 0.5, 2, cfg, trials=1000, seed=1)
    assert (est, se) == (1.0, 0.0)
    lone = NetworkConfig(n_total=5, n_active=1)
    assert laplace_mc_oracle(2.0, 0.5, 2, lone, trials=1000, seed=1) == (1.0, 0.0)


def test_mc_oracle_deterministic(cfg):
    a = laplace_mc_oracle(1.0, 0.5, 3, cfg, trials=50_000, seed=9)
    b = laplace_mc_oracle(1.0, 0.5, 3, cfg, trials=50_000, seed=9)
    assert a == b


def test_laplace_exact_mode_matches_mc_grid():
    """Analytic transform with without-replacement weights against the
    brute-force conditional simulation, on a 3x3x3 grid; the closed-form
    weighting's deviation is recorded, not asserted."""
    cfg = NetworkConfig(n_total=6, n_active=4, radius=1.0, alpha=4.0)
    worst_exact = 0.0
    paper_report = []
    for k in (2, 4, 6):
        for r in (0.3, 0.6, 0.9):
            # thresholds scaled to the serving path loss keep the transform
            # large enough for the 3-sigma comparison to have power
            for beta in (0.1, 1.0, 5.0):
                s = beta * r ** cfg.alpha
                est, se = laplace_mc_oracle(s, r, k, cfg, trials=200_000,
                                            seed=31_000 + k)
                exact = laplace_interference(s, r, k, cfg, "exact")
                sigma = abs(exact - est) / max(se, 1e-15)
                worst_exact = max(worst_exact, sigma)
                assert abs(exact - est) <= 3.0 * se, (
                    f"k={k} r={r} beta={beta}: analytic {exact} vs MC {est} "
                    f"({sigma:.1f} se)")
                paper = laplace_interference(s, r, k, cfg, "paper")
                paper_report.append((k, r, beta, (paper - est) / max(se, 1e-15)))
    print(f"\nexact-mode worst |analytic-MC|: {worst_exact:.2f} se")
    worst_paper = max(paper_report, key=lambda t: abs(t[3]))
    print("closed-form-mode deviation vs MC (se units): "
          f"worst {worst_paper[3]:+.1f} at k={worst_paper[0]} "
          f"r={worst_paper[1]} beta={worst_paper[2]}")
