"""Distance distributions for devices placed uniformly in a disk.

With the receiver at the center and n_total transmitters dropped
independently and uniformly in a disk of radius r_d, the link distances are
i.i.d. with density 2w/r_d^2. The serving distance is the k-th order
statistic of those distances, and conditioned on it the remaining distances
split into i.i.d. "inner" (closer than the server) and "outer" (farther)
populations. Exact inverse-CDF samplers are provided for both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NetworkConfig:
    """Finite-network parameters.

    n_total: transmitting devices in the disk.
    n_active: devices transmitting on the shared resource (serving + interferers).
    radius: disk radius.
    alpha: path-loss exponent, > 2.
    """

    n_total: int
    n_active: int
    radius: float = 1.0
    alpha: float = 4.0

    def __post_init__(self):
        if self.n_total < 1:
            raise ValueError(f"n_total must be >= 1, got {self.n_total}")
        if not 1 <= self.n_active <= self.n_total:
            raise ValueError(
                f"n_active must be in [1, n_total], got {self.n_active}")
        if not self.radius > 0.0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if not self.alpha > 2.0:
            raise ValueError(f"alpha must exceed 2, got {self.alpha}")


def _check_rank(k: int, cfg: NetworkConfig) -> None:
    if not 1 <= k <= cfg.n_total:
        raise ValueError(f"rank k={k} outside [1, {cfg.n_total}]")


def distance_pdf(w, cfg: NetworkConfig):
    """Density 2w/r_d^2 of a single link distance; zero outside [0, r_d]."""
    w = np.asarray(w, dtype=float)
    rd = cfg.radius
    out = np.where((w >= 0.0) & (w <= rd), 2.0 * w / (rd * rd), 0.0)
    return out if out.ndim else float(out)


def distance_cdf(w, cfg: NetworkConfig):
    """CDF w^2/r_d^2 of a single link distance, clamped to [0, 1]."""
    w = np.asarray(w, dtype=float)
    rd = cfg.radius
    out = np.clip(w * w / (rd * rd), 0.0, 1.0)
    out = np.where(w < 0.0, 0.0, out)
    return out if out.ndim else float(out)


def serving_distance_pdf(r, k: int, cfg: NetworkConfig):
    """Density of the k-th smallest of n_total i.i.d. link distances.

    n!/((k-1)!(n-k)!) * F^(k-1) * f * (1-F)^(n-k), computed in log space so
    the combinatorial factor survives n_total up to the thousands. Zero
    outside [0, r_d]; the k = n_total endpoint takes (1-F)^0 = 1 exactly.
    """
    _check_rank(k, cfg)
    r = np.asarray(r, dtype=float)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    n, rd = cfg.n_total, cfg.radius

    inside = (r >= 0.0) & (r <= rd)
    out = np.zeros_like(r)
    if np.any(inside):
        ri = r[inside]
        cdf = ri * ri / (rd * rd)
        log_coef = (math.lgamma(n + 1) - math.lgamma(k) - math.lgamma(n - k + 1))
        with np.errstate(divide="ignore"):
            log_pdf = np.where(ri > 0.0, np.log(2.0 * ri / (rd * rd)), -np.inf)
            if k > 1:
                log_pdf = log_pdf + (k - 1) * np.log(cdf)
            if k < n:
                log_pdf = log_pdf + (n - k) * np.log1p(-cdf)
        out[inside] = np.exp(log_coef + log_pdf)
    return float(out[0]) if scalar else out


def inner_conditional_pdf(u, r: float, cfg: NetworkConfig):
    """Density 2u/r^2 of an inner distance given serving distance r."""
    if not 0.0 < r <= cfg.radius:
        raise ValueError(f"serving distance r={r} outside (0, {cfg.radius}]")
    u = np.asarray(u, dtype=float)
    out = np.where((u >= 0.0) & (u < r), 2.0 * u / (r * r), 0.0)
    return out if out.ndim else float(out)


def outer_conditional_pdf(u, r: float, cfg: NetworkConfig):
    """Density 2u/(r_d^2 - r^2) of an outer distance given serving distance r."""
    rd = cfg.radius
    if not 0.0 <= r < rd:
        raise ValueError(f"serving distance r={r} outside [0, {rd})")
    u = np.asarray(u, dtype=float)
    out = np.where((u > r) & (u <= rd), 2.0 * u / (rd * rd - r * r), 0.0)
    return out if out.ndim else float(out)


def sample_inner(r: float, rng: np.random.Generator, size=None):
    """Inverse-CDF sample(s) of the inner distance: u = r * sqrt(v)."""
    return r * np.sqrt(rng.random(size))


def sample_outer(r: float, cfg: NetworkConfig, rng: np.random.Generator,
                 size=None):
    """Inverse-CDF sample(s) of the outer distance on (r, r_d]."""
    rd = cfg.radius
    return np.sqrt(r * r + rng.random(size) * (rd * rd - r * r))
