"""Content popularity, total hit probability, and cache placement optimization.

Requests follow a Zipf law over a catalog of J contents. A placement policy
stores content j at any given device with marginal probability b_j, subject
to the capacity budget sum_j b_j <= m_c. The total hit probability couples
the policy with the per-rank coverage table: a request succeeds when the
nearest holder of the content, at whatever rank k it lands, also clears the
SIR threshold,

    P_hit = sum_j P(request j) sum_k P_c(k) (1-b_j)^(k-1) b_j.

The per-content factor g(b) = sum_k P_c(k) (1-b)^(k-1) b is strictly
increasing on [0, 1] whenever the coverage table is nonincreasing in rank,
so the optimum always exhausts the capacity budget.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .coverage import CoverageTable
from .geometry import NetworkConfig

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_STARTS = 5
_BOUNDS_TOL = 1e-12


@dataclass(frozen=True)
class ContentLibrary:
    """Zipf catalog: size J, exponent gamma, per-device capacity m_c."""

    size: int
    gamma: float
    cache_capacity: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError(f"catalog size must be >= 1, got {self.size}")
        if self.gamma < 0.0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if not 1 <= self.cache_capacity <= self.size:
            raise ValueError(
                f"cache_capacity must be in [1, size], got {self.cache_capacity}")


@dataclass(frozen=True)
class CachePolicy:
    """Marginal caching probabilities b_1..b_J."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", probs)
        if probs.ndim != 1 or probs.size < 1:
            raise ValueError("probs must be a nonempty 1-D vector")
        if np.any(probs < -_BOUNDS_TOL) or np.any(probs > 1.0 + _BOUNDS_TOL):
            raise ValueError("caching probabilities must lie in [0, 1]")

    def validate_for(self, library: ContentLibrary) -> None:
        if self.probs.size != library.size:
            raise ValueError(
                f"policy has {self.probs.size} entries for a catalog of "
                f"{library.size}")
        if float(self.probs.sum()) > library.cache_capacity + _BOUNDS_TOL:
            raise ValueError("policy exceeds the cache capacity budget")


def zipf_pmf(library: ContentLibrary) -> np.ndarray:
    """Request probabilities, proportional to rank^(-gamma)."""
    ranks = np.arange(1, library.size + 1, dtype=float)
    w = ranks ** (-library.gamma)
    return w / w.sum()


def _per_content_hit(b, pc: np.ndarray):
    """g(b) = b * sum_k pc[k-1] (1-b)^(k-1), vectorized over b (Horner)."""
    x = 1.0 - np.asarray(b, dtype=float)
    acc = np.zeros_like(x)
    for c in pc[::-1]:
        acc = acc * x + c
    return np.asarray(b, dtype=float) * acc


def hit_probability(policy: CachePolicy, coverage: CoverageTable,
                    library: ContentLibrary) -> float:
    """Total hit probability of the policy under the given coverage table."""
    policy.validate_for(library)
    if len(coverage.values) != coverage.cfg.n_total:
        raise ValueError("coverage table must span ranks 1..n_total")
    request = zipf_pmf(library)
    return float(np.sum(request * _per_content_hit(policy.probs, coverage.values)))


def _golden_max(f, lo: float, hi: float, tol: float = 1e-12):
    """Golden-section maximum of f on [lo, hi]; returns (x, f(x))."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _maximize_on_unit(f, lo: float = 0.0, hi: float = 1.0):
    """Best of golden-section runs over _STARTS subintervals plus endpoints.

    g is concave for a monotone coverage table, but that is not certified
    here, so the search is restarted across the interval.
    """
    best_x, best_f = lo, f(lo)
    fh = f(hi)
    if fh > best_f:
        best_x, best_f = hi, fh
    edges = np.linspace(lo, hi, _STARTS + 1)
    for a, b in zip(edges[:-1], edges[1:]):
        x, fx = _golden_max(f, a, b)
        if fx > best_f:
            best_x, best_f = x, fx
    return best_x, best_f


def optimize_placement(coverage: CoverageTable,
                       library: ContentLibrary) -> tuple[CachePolicy, float]:
    """Capacity-constrained placement maximizing the total hit probability.

    Lagrangian dual bisection on the capacity multiplier, each coordinate
    solved by multi-start golden-section search, then a projected pairwise
    coordinate-ascent polish. The budget is met with equality (the
    per-content objective is increasing), checked before returning.
    """
    request = zipf_pmf(library)
    pc = coverage.values
    j_count = library.size
    m_c = library.cache_capacity

    def coordinate_best(w: float, lam: float) -> float:
        x, _ = _maximize_on_unit(lambda b: w * _per_content_hit(b, pc) - lam * b)
        return x

    if m_c >= j_count:
        b = np.ones(j_count)
    else:
        # smallest multiplier whose per-coordinate optima fit the budget
        lam_lo, lam_hi = 0.0, float(coverage.cfg.n_total + 1)
        for _ in range(100):
            lam = 0.5 * (lam_lo + lam_hi)
            b = np.array([coordinate_best(w, lam) for w in request])
            if b.sum() > m_c:
                lam_lo = lam
            else:
                lam_hi = lam
            if lam_hi - lam_lo < 1e-13:
                break
        b = np.array([coordinate_best(w, lam_hi) for w in request])

        # spend any leftover budget; raising b never lowers the objective
        deficit = m_c - float(b.sum())
        for j in np.argsort(-request):
            if deficit <= 0.0:
                break
            add = min(1.0 - b[j], deficit)
            b[j] += add
            deficit -= add

        b = _pairwise_polish(b, request, pc)

    b = np.clip(b, 0.0, 1.0)
    overshoot = float(b.sum()) - m_c
    if overshoot > 0.0:
        b[int(np.argmax(b))] -= overshoot
    total = float(b.sum())
    if m_c <= j_count and abs(total - m_c) > 1e-9:
        raise AssertionError(
            f"optimizer left budget unexhausted: sum b = {total}, m_c = {m_c}")

    policy = CachePolicy(probs=b)
    return policy, float(np.sum(request * _per_content_hit(b, pc)))


def _pairwise_polish(b: np.ndarray, request: np.ndarray,
                     pc: np.ndarray, max_sweeps: int = 200) -> np.ndarray:
    """Budget-preserving pairwise transfers until no pair improves."""
    b = b.copy()
    for _ in range(max_sweeps):
        improved = 0.0
        for i in range(len(b)):
            for j in range(i + 1, len(b)):
                lo = -min(b[i], 1.0 - b[j])
                hi = min(b[j], 1.0 - b[i])
                if hi - lo < 1e-14:
                    continue

                def gain(t):
                    return (request[i] * _per_content_hit(b[i] + t, pc)
                            + request[j] * _per_content_hit(b[j] - t, pc))

                base = gain(0.0)
                t, ft = _maximize_on_unit(gain, lo, hi)
                if ft > base + 1e-15:
                    b[i] += t
                    b[j] -= t
                    improved += ft - base
        if improved < 1e-14:
            return b
    warnings.warn("pairwise polish hit the sweep limit; returning best iterate",
                  RuntimeWarning, stacklevel=2)
    return b


def throughput(max_hit: float, cfg: NetworkConfig) -> float:
    """Network throughput: simultaneously active devices times the hit rate."""
    return cfg.n_active * max_hit
