"""Seeded end-to-end simulator for the finite cache-enabled network.

Each trial drops n_total devices uniformly in the disk, fixes the server
(either the rank-k device or the nearest holder of the requested content),
activates n_active - 1 interferers drawn uniformly without replacement from
the remaining devices, applies unit-mean exponential fading per link, and
tests SIR against the threshold. With no interferer the SIR is taken as
infinite, so such trials always pass the threshold.

Randomness is derived per fixed-size trial block from (master seed, block
index) through a counter-based Philox stream, so estimates are bit-identical
no matter how blocks would be scheduled across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .caching import CachePolicy, ContentLibrary, zipf_pmf
from .geometry import NetworkConfig, _check_rank

_BLOCK = 1 << 15


@dataclass(frozen=True)
class SimulationReport:
    """Point estimate of a Bernoulli probability with its standard error."""

    estimate: float
    stderr: float
    trials: int
    seed: int
    scenario: str


def _substream(seed: int, block: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError("seed must be a nonnegative integer")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, block))))


def _bernoulli_report(successes: int, trials: int, seed: int,
                      scenario: str) -> SimulationReport:
    est = successes / trials
    stderr = math.sqrt(est * (1.0 - est) / trials)
    return SimulationReport(estimate=est, stderr=stderr, trials=trials,
                            seed=seed, scenario=scenario)


def sample_disk_point(rng: np.random.Generator, r_d: float, size=None):
    """Uniform point(s) in the disk of radius r_d, radius by sqrt-inversion."""
    radius = r_d * np.sqrt(rng.random(size))
    theta = 2.0 * np.pi * rng.random(size)
    return np.stack([radius * np.cos(theta), radius * np.sin(theta)], axis=-1)


def _sir_covered(rng: np.random.Generator, sorted_radii: np.ndarray,
                 server_col: np.ndarray, beta: float,
                 cfg: NetworkConfig) -> np.ndarray:
    """Per-trial SIR >= beta indicator for servers at the given sorted columns."""
    n = sorted_radii.shape[0]
    rows = np.arange(n)
    serving = sorted_radii[rows, server_col]
    if cfg.n_active == 1:
        return np.ones(n, dtype=bool)
    # uniform subset of n_active-1 interferers among the non-serving devices
    keys = rng.random(sorted_radii.shape)
    keys[rows, server_col] = 2.0
    chosen = np.argsort(keys, axis=1)[:, : cfg.n_active - 1]
    interf = np.take_along_axis(sorted_radii, chosen, axis=1)
    h_serv = rng.standard_exponential(n)
    h_int = rng.standard_exponential(interf.shape)
    power = h_serv * serving ** (-cfg.alpha)
    interference = np.sum(h_int * interf ** (-cfg.alpha), axis=1)
    return power >= beta * interference


def simulate_coverage(k: int, beta: float, cfg: NetworkConfig, trials: int,
                      seed: int) -> SimulationReport:
    """Empirical coverage probability for the rank-k server."""
    _check_rank(k, cfg)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not beta > 0.0:
        raise ValueError(f"beta must be positive, got {beta}")

    successes = 0
    done = 0
    block = 0
    while done < trials:
        n = min(_BLOCK, trials - done)
        rng = _substream(seed, block)
        radii = cfg.radius * np.sqrt(rng.random((n, cfg.n_total)))
        radii.sort(axis=1)
        server_col = np.full(n, k - 1)
        covered = _sir_covered(rng, radii, server_col, beta, cfg)
        successes += int(covered.sum())
        done += n
        block += 1

    scenario = (f"coverage k={k} beta={beta:g} nt={cfg.n_total} "
                f"na={cfg.n_active} rd={cfg.radius:g} alpha={cfg.alpha:g}")
    return _bernoulli_report(successes, trials, seed, scenario)


def simulate_hit(policy: CachePolicy, library: ContentLibrary, beta: float,
                 cfg: NetworkConfig, trials: int, seed: int) -> SimulationReport:
    """Empirical total hit probability under a marginal placement policy.

    Each device stores content j independently with probability b_j (the
    capacity bound holds in expectation, not per realization, matching the
    analytic model). The server is the nearest holder of the requested
    content; a trial scores a hit when a holder exists and its SIR clears
    the threshold.
    """
    policy.validate_for(library)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not beta > 0.0:
        raise ValueError(f"beta must be positive, got {beta}")

    request_cdf = np.cumsum(zipf_pmf(library))
    probs = np.asarray(policy.probs, dtype=float)

    hits = 0
    done = 0
    block = 0
    while done < trials:
        n = min(_BLOCK, trials - done)
        rng = _substream(seed, block)
        radii = cfg.radius * np.sqrt(rng.random((n, cfg.n_total)))
        radii.sort(axis=1)
        requested = np.searchsorted(request_cdf, rng.random(n), side="right")
        requested = np.minimum(requested, library.size - 1)
        # holding is independent of position, so sorted-rank columns are
        # i.i.d. Bernoulli(b_j); the first holding column is the server rank
        holds = rng.random((n, cfg.n_total)) < probs[requested][:, None]
        found = holds.any(axis=1)
        server_col = np.argmax(holds, axis=1)
        covered = _sir_covered(rng, radii, server_col, beta, cfg)
        hits += int(np.count_nonzero(found & covered))
        done += n
        block += 1

    scenario = (f"hit J={library.size} gamma={library.gamma:g} "
                f"mc={library.cache_capacity} beta={beta:g} nt={cfg.n_total} "
                f"na={cfg.n_active} rd={cfg.radius:g} alpha={cfg.alpha:g}")
    return _bernoulli_report(hits, trials, seed, scenario)
