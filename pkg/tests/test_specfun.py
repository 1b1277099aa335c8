import numpy as np
import pytest
from scipy import integrate

from d2dcache.specfun import (_hyp2f1_integral, _hyp2f1_series, hyp2f1_caching,
                              interference_factor, interference_factor_between)

# reference values frozen from scipy.integrate.quad of the defining integrals
# (see quad_reference below), computed independently of the implementation
HYP_3_M10 = 0.3257611653706039
C_35_27_06 = 0.007818014438857865


def quad_reference_hyp(alpha, z):
    b = 2.0 / alpha
    val, _ = integrate.quad(lambda v: 1.0 / (1.0 - z * v ** (1.0 / b)),
                            0.0, 1.0, epsabs=1e-14, epsrel=1e-14, limit=500)
    return val


def quad_reference_c(alpha, s, x):
    val, _ = integrate.quad(lambda u: u / (1.0 + s * u ** (-alpha)),
                            0.0, x, epsabs=1e-14, epsrel=1e-14, limit=500)
    return 2.0 * val


def test_value_at_zero_is_one():
    for alpha in (2.5, 3.0, 4.0, 6.0):
        assert hyp2f1_caching(alpha, 0.0) == 1.0


def test_arctan_point():
    # 2F1(1, 1/2; 3/2; -1) = arctan(1) = pi/4
    assert hyp2f1_caching(4.0, -1.0) == pytest.approx(np.pi / 4, abs=1e-10)


def test_frozen_quadrature_value():
    assert hyp2f1_caching(3.0, -10.0) == pytest.approx(HYP_3_M10, abs=1e-10)
    # and the reference itself still reproduces
    assert quad_reference_hyp(3.0, -10.0) == pytest.approx(HYP_3_M10, abs=1e-12)


def test_arctan_identity_grid():
    for y in (0.1, 0.5, 1.0, 2.0, 10.0):
        expected = np.arctan(y) / y
        assert hyp2f1_caching(4.0, -y * y) == pytest.approx(expected, abs=1e-9)


def test_series_and_integral_agree_on_overlap():
    # both paths must agree where the series still converges
    for alpha in (2.5, 3.0, 4.0, 5.5):
        b = 2.0 / alpha
        for z in np.linspace(-0.5, -0.9, 9):
            assert _hyp2f1_series(b, z) == pytest.approx(
                _hyp2f1_integral(b, z), abs=1e-9)


def test_domain_errors():
    with pytest.raises(ValueError):
        hyp2f1_caching(2.0, -1.0)
    with pytest.raises(ValueError):
        hyp2f1_caching(4.0, 0.5)
    with pytest.raises(ValueError):
        interference_factor(4.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        interference_factor(4.0, -1.0, 1.0)
    with pytest.raises(ValueError):
        interference_factor(4.0, 1.0, 0.0)


def test_interference_factor_examples():
    assert interference_factor(4.0, 1.0, 1.0) == pytest.approx(
        1.0 - np.pi / 4, abs=1e-8)
    # huge s drives the argument to zero and the factor with it
    assert interference_factor(4.0, 1e12, 1.0) == pytest.approx(0.0, abs=1e-10)
    assert interference_factor(3.5, 2.7, 0.6) == pytest.approx(
        C_35_27_06, abs=1e-8)
    assert quad_reference_c(3.5, 2.7, 0.6) == pytest.approx(C_35_27_06, abs=1e-12)


def test_interference_factor_matches_quadrature_oracle():
    for alpha, s, x in [(3.0, 0.3, 0.8), (4.0, 2.0, 1.3), (5.0, 10.0, 0.4),
                        (2.7, 1.0, 1.0)]:
        assert interference_factor(alpha, s, x) == pytest.approx(
            quad_reference_c(alpha, s, x), abs=1e-8)


def test_bounds_and_monotonicity_grid():
    svals = np.geomspace(0.05, 50.0, 20)
    xvals = np.linspace(0.1, 2.0, 20)
    for alpha in (3.0, 4.0):
        for x in xvals:
            cs = [interference_factor(alpha, s, x) for s in svals]
            assert all(0.0 <= c < x * x for c in cs)
            assert all(a >= b - 1e-12 for a, b in zip(cs, cs[1:]))


def test_annulus_difference_form():
    # one-quadrature difference equals the difference of the two factors
    for alpha, s, lo, hi in [(4.0, 1.0, 0.5, 1.0), (3.0, 2.0, 0.99, 1.0),
                             (4.0, 0.2, 0.995, 1.0)]:
        direct = interference_factor_between(alpha, s, lo, hi)
        split = interference_factor(alpha, s, hi) - interference_factor(alpha, s, lo)
        assert direct == pytest.approx(split, abs=1e-10)
