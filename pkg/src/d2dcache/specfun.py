"""Gauss hypergeometric kernel and the interference factor built on it.

Everything here is specialized to the family 2F1(1, b; b+1; z) with
b = 2/alpha in (0, 1) and z <= 0, which is the only shape the interference
analysis needs. The interference factor

    C(alpha, s, x) = x^2 - x^2 * 2F1(1, 2/alpha; 1 + 2/alpha; -x^alpha / s)

measures the interference mass of a disk of radius x at Laplace argument s;
it equals 2 * integral_0^x u / (1 + s * u^(-alpha)) du and always lies in
[0, x^2).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._quad import adaptive_gauss

# series for 2F1(1,b;b+1;z) converges like |z|^k; beyond this the integral
# representation is both faster and safe
_SERIES_CUTOFF = 0.9
_SERIES_EPS = 1e-13
_QUAD_TOL = 1e-12
_QUAD_MAX_PANELS = 10_000


@dataclass(frozen=True)
class HypergeomParams:
    """Argument pair for the caching kernel: exponent alpha > 2, z <= 0."""

    alpha: float
    z: float

    def __post_init__(self):
        if not self.alpha > 2.0:
            raise ValueError(f"alpha must exceed 2, got {self.alpha}")
        if self.z > 0.0:
            raise ValueError(f"z must be <= 0, got {self.z}")


def _hyp2f1_series(b: float, z: float) -> float:
    # 2F1(1, b; b+1; z) = sum_k b/(b+k) z^k; tail bounded by |t_k| |z|/(1-|z|)
    total = 1.0
    term = 1.0
    k = 0
    tail_factor = abs(z) / (1.0 - abs(z))
    while True:
        k += 1
        term *= z * (b + k - 1.0) / (b + k)
        total += term
        if abs(term) * tail_factor < _SERIES_EPS:
            return total
        if k > 10_000:  # unreachable for |z| <= 0.9; defensive stop
            raise RuntimeError("hypergeometric series failed to converge")


def _hyp2f1_integral(b: float, z: float) -> float:
    # b * int_0^1 t^(b-1) / (1 - z t) dt, with t = v^(1/b) absorbing the
    # endpoint weight exactly: int_0^1 dv / (1 - z v^(1/b))
    inv_b = 1.0 / b

    def integrand(v: np.ndarray) -> np.ndarray:
        return 1.0 / (1.0 - z * v ** inv_b)

    value, _ = adaptive_gauss(integrand, 0.0, 1.0, tol=_QUAD_TOL,
                              max_panels=_QUAD_MAX_PANELS)
    return value


@lru_cache(maxsize=8192)
def hyp2f1_caching(alpha: float, z: float) -> float:
    """Evaluate 2F1(1, 2/alpha; 1 + 2/alpha; z) for alpha > 2, z <= 0.

    Absolute error is held below 1e-10: the direct series is used for
    |z| < 0.9 and the integral representation (adaptive quadrature)
    beyond, where the series no longer converges. Results are memoized;
    the coverage integrand hits one fixed z per threshold repeatedly.
    """
    params = HypergeomParams(alpha, z)
    b = 2.0 / params.alpha
    if z == 0.0:
        return 1.0
    if abs(z) < _SERIES_CUTOFF:
        return _hyp2f1_series(b, z)
    return _hyp2f1_integral(b, z)


def interference_factor(alpha: float, s: float, x: float) -> float:
    """C(alpha, s, x) = x^2 * (1 - 2F1(1, 2/alpha; 1+2/alpha; -x^alpha/s)).

    Requires s > 0 and x > 0. Nonincreasing in s, bounded by [0, x^2).
    """
    if not s > 0.0:
        raise ValueError(f"s must be positive, got {s}")
    if not x > 0.0:
        raise ValueError(f"x must be positive, got {x}")
    z = -(x ** alpha) / s
    value = x * x * (1.0 - hyp2f1_caching(alpha, z))
    # exact value is strictly positive; clip float dust from the cancellation
    return max(value, 0.0)


def interference_factor_between(alpha: float, s: float, lo: float,
                                hi: float) -> float:
    """C(alpha, s, hi) - C(alpha, s, lo) as one quadrature over [lo, hi].

    2 * integral_lo^hi u / (1 + s u^(-alpha)) du. Avoids the cancellation of
    two nearly equal factors when the annulus [lo, hi] is thin.
    """
    if not alpha > 2.0:
        raise ValueError(f"alpha must exceed 2, got {alpha}")
    if not s > 0.0:
        raise ValueError(f"s must be positive, got {s}")
    if not 0.0 <= lo <= hi:
        raise ValueError(f"need 0 <= lo <= hi, got ({lo}, {hi})")

    def integrand(u: np.ndarray) -> np.ndarray:
        return 2.0 * u / (1.0 + s * u ** (-alpha))

    value, _ = adaptive_gauss(integrand, lo, hi, tol=_QUAD_TOL,
                              max_panels=_QUAD_MAX_PANELS)
    return max(value, 0.0)
