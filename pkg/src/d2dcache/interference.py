"""Conditional Laplace transform of interference at the disk center.

Conditioned on the serving distance r of the rank-k device, the active
interferers split into an inner group (distance < r) and an outer group
(distance > r), each i.i.d. with known densities. The Laplace transform of
the total faded interference is a mixture over the inner-group count ell:

    L(s | r) = sum_ell  w(ell) * (C(a,s,r)/r^2)^ell
                        * ((C(a,s,r_d) - C(a,s,r)) / (r_d^2 - r^2))^(Na-1-ell)

Two laws for w(ell) are provided. ``paper`` uses the closed-form truncated
binomial with success probability (k-1)/(n_total-1); ``exact`` uses the
hypergeometric law of drawing the n_active-1 interferers uniformly without
replacement from the k-1 inner / n_total-k outer devices. The two coincide
at k = 1 and k = n_total but differ in between; the Monte Carlo oracle here
measures that gap instead of hiding it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import NetworkConfig, _check_rank
from .specfun import interference_factor, interference_factor_between

WEIGHT_MODES = ("paper", "exact")

# quadrature form of the outer factor once the annulus is this thin
_THIN_ANNULUS = 0.99

_ORACLE_CHUNK = 1 << 16


@dataclass(frozen=True)
class MixtureWeights:
    """Distribution of the number of interferers closer than the server.

    k: serving rank. p: inner-selection probability (k-1)/(n_total-1).
    n_cap: largest possible inner count, min(k-1, n_active-1).
    weights: probabilities for ell = 0..n_cap, summing to 1.
    """

    k: int
    p: float
    n_cap: int
    weights: np.ndarray

    def __post_init__(self):
        if len(self.weights) != self.n_cap + 1:
            raise ValueError("weights length must be n_cap + 1")
        if np.any(self.weights < 0.0) or np.any(self.weights > 1.0):
            raise ValueError("weights must lie in [0, 1]")
        if abs(float(self.weights.sum()) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")


def _log_comb(n: int, r: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(r + 1) - math.lgamma(n - r + 1)


def mixture_weights(k: int, cfg: NetworkConfig) -> MixtureWeights:
    """Truncated-binomial inner-count weights (closed-form mode).

    Binomial(n_active-1, p) with p = (k-1)/(n_total-1), renormalized on
    ell <= min(k-1, n_active-1). A single-device network has the lone
    weight {1}.
    """
    _check_rank(k, cfg)
    if cfg.n_total == 1:
        return MixtureWeights(k=1, p=0.0, n_cap=0, weights=np.array([1.0]))

    p = (k - 1) / (cfg.n_total - 1)
    n_draws = cfg.n_active - 1
    n_cap = min(k - 1, n_draws)
    ells = np.arange(n_cap + 1)

    if p == 0.0:
        w = (ells == 0).astype(float)
    elif p == 1.0:
        w = (ells == n_draws).astype(float)
    else:
        logw = (ells * math.log(p) + (n_draws - ells) * math.log1p(-p)
                + np.array([_log_comb(n_draws, int(l)) for l in ells]))
        logw -= logw.max()
        w = np.exp(logw)
    w /= w.sum()
    return MixtureWeights(k=k, p=p, n_cap=n_cap, weights=w)


def mixture_weights_exact(k: int, cfg: NetworkConfig) -> MixtureWeights:
    """Hypergeometric inner-count weights (sampling without replacement).

    w(ell) = C(k-1, ell) C(n_total-k, n_active-1-ell) / C(n_total-1, n_active-1)
    on the feasible ell range, zeros elsewhere. With every device active the
    mass sits entirely at ell = k-1.
    """
    _check_rank(k, cfg)
    if cfg.n_total == 1:
        return MixtureWeights(k=1, p=0.0, n_cap=0, weights=np.array([1.0]))

    p = (k - 1) / (cfg.n_total - 1)
    n_draws = cfg.n_active - 1
    n_cap = min(k - 1, n_draws)
    ells = np.arange(n_cap + 1)
    lo_feasible = max(0, n_draws - (cfg.n_total - k))

    log_denom = _log_comb(cfg.n_total - 1, n_draws)
    w = np.zeros(n_cap + 1)
    for i, ell in enumerate(ells):
        if ell < lo_feasible:
            continue
        w[i] = math.exp(_log_comb(k - 1, int(ell))
                        + _log_comb(cfg.n_total - k, n_draws - int(ell))
                        - log_denom)
    w /= w.sum()
    return MixtureWeights(k=k, p=p, n_cap=n_cap, weights=w)


def _resolve_weights(k: int, cfg: NetworkConfig, weight_mode: str) -> MixtureWeights:
    if weight_mode == "paper":
        return mixture_weights(k, cfg)
    if weight_mode == "exact":
        return mixture_weights_exact(k, cfg)
    raise ValueError(f"weight_mode must be one of {WEIGHT_MODES}, got {weight_mode!r}")


def laplace_interference(s: float, r: float, k: int, cfg: NetworkConfig,
                         weight_mode: str = "paper") -> float:
    """E[exp(-s * interference)] given serving distance r at rank k.

    Value in (0, 1], equal to 1 at s = 0 or with a single active device.
    r = r_d is allowed only for k = n_total, where the outer group is empty
    and its factor is the empty product 1.
    """
    _check_rank(k, cfg)
    if s < 0.0:
        raise ValueError(f"s must be >= 0, got {s}")
    rd = cfg.radius
    if not 0.0 < r <= rd:
        raise ValueError(f"serving distance r={r} outside (0, {rd}]")
    if r == rd and k != cfg.n_total:
        raise ValueError("r = radius requires k = n_total")
    if cfg.n_active == 1 or s == 0.0:
        return 1.0

    mix = _resolve_weights(k, cfg, weight_mode)
    n_draws = cfg.n_active - 1
    ells = np.arange(mix.n_cap + 1)

    inner = interference_factor(cfg.alpha, s, r) / (r * r) if mix.n_cap > 0 else 1.0

    if r == rd:
        outer = 1.0
    else:
        if r > _THIN_ANNULUS * rd:
            num = interference_factor_between(cfg.alpha, s, r, rd)
        else:
            num = (interference_factor(cfg.alpha, s, rd)
                   - interference_factor(cfg.alpha, s, r))
        outer = num / (rd * rd - r * r)
        outer = min(max(outer, 0.0), 1.0)

    value = float(np.sum(mix.weights * inner ** ells * outer ** (n_draws - ells)))
    return min(value, 1.0)


def laplace_mc_oracle(s: float, r: float, k: int, cfg: NetworkConfig,
                      trials: int, seed: int) -> tuple[float, float]:
    """Brute-force estimate of the conditional Laplace transform.

    Draws the inner count from the without-replacement law, distances by
    exact inversion, unit-mean exponential fading per link, and averages
    exp(-s * sum h u^-alpha). Returns (mean, standard error); deterministic
    for a fixed seed and trial count.
    """
    _check_rank(k, cfg)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rd = cfg.radius
    if not 0.0 < r <= rd:
        raise ValueError(f"serving distance r={r} outside (0, {rd}]")
    if cfg.n_active == 1:
        return 1.0, 0.0

    n_draws = cfg.n_active - 1
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < trials:
        n = min(_ORACLE_CHUNK, trials - done)
        counts = rng.hypergeometric(k - 1, cfg.n_total - k, n_draws, size=n)
        v = rng.random((n, n_draws))
        h = rng.standard_exponential((n, n_draws))
        # first `counts` columns are inner draws, the rest outer; the
        # inversions mirror geometry.sample_inner / sample_outer
        is_inner = np.arange(n_draws)[None, :] < counts[:, None]
        u = np.where(is_inner, r * np.sqrt(v),
                     np.sqrt(r * r + v * (rd * rd - r * r)))
        interf = np.sum(h * u ** (-cfg.alpha), axis=1)
        y = np.exp(-s * interf)
        total += float(y.sum())
        total_sq += float((y * y).sum())
        done += n

    mean = total / trials
    if trials == 1:
        return mean, 0.0
    var = max(total_sq - trials * mean * mean, 0.0) / (trials - 1)
    return mean, math.sqrt(var / trials)
