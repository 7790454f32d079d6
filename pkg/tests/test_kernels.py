import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from stabletp.errors import InvalidParams
from stabletp.kernels import (INF, TPOrder, cauchy_type_kernel, chebyshev_partial_sum,
                              fractional_integration_kernel, gaussian_spacetime_kernel, nearest_integer,
                              positive_stable_kernel, predict_tp_general, predict_tp_positive,
                              radial_density, radial_density_fast, radial_kernel, radial_series_d2,
                              stable_convolution_kernel)
from stabletp.specfun import Precision
from stabletp.stable import EvalConfig, StableParams, density


@pytest.mark.parametrize("alpha,order", [
    (Fraction(1, 3), INF), (0.25, INF), (0.5, INF), (0.3, 3), (0.4, 2), (0.45, 2), (0.6, 1), (0.9, 1),
    (0.3333333333333333, INF),
])
def test_predict_positive(alpha, order):
    assert predict_tp_positive(alpha).value == order


@pytest.mark.parametrize("a,r,order", [
    (Fraction(1, 2), Fraction(1, 2), INF), (0.7, 0.5, 2), (1.0, 0.4, 2), (1.5, 0.6, 1),
    (Fraction(2, 3), Fraction(1, 2), INF), (0.5, 0.25, INF), (0.8, 0.3, 3), (Fraction(2, 3), Fraction(3, 4), 1),
])
def test_predict_general(a, r, order):
    assert predict_tp_general(StableParams(a, r)).value == order


@given(st.floats(0.05, 0.95))
@settings(max_examples=60, deadline=None)
def test_predictors_monotone_in_alpha(a):
    # TP order from the inf-bound can only fall as alpha grows
    o1, o2 = predict_tp_positive(a), predict_tp_positive(min(0.99, a * 1.05))
    if not o1.is_infinite and not o2.is_infinite:
        assert o2.value <= o1.value


def test_tporder_and_nearest_integer():
    assert TPOrder(INF).admits(100) and TPOrder(3).admits(3) and not TPOrder(3).admits(4)
    assert TPOrder(INF).to_json() == "infinity"
    with pytest.raises(InvalidParams):
        TPOrder(0)
    assert nearest_integer(Fraction(6, 2)) == 3 and nearest_integer(2.5) is None
    assert nearest_integer(3 + 1e-14) == 3


def test_fracint_orders():
    assert fractional_integration_kernel(2.5).predicted_order.value == 3
    assert fractional_integration_kernel(3).predicted_order.value is INF
    k = fractional_integration_kernel(2.5)
    assert k(1, 3) == pytest.approx(2 ** 1.5) and k(3, 1) == 0


def test_cauchy_kernel_generating_function():
    k = cauchy_type_kernel(0.3)
    c = math.cos(0.3 * math.pi)
    for z in (0.1, 0.5):
        assert float(k(1, z)) == pytest.approx(1 / (1 + 2 * c * z + z * z), rel=1e-15)
        assert chebyshev_partial_sum(0.3, z, 200) == pytest.approx(float(k(1, z)), abs=1e-13)


def test_gaussian_kernel_matches_density():
    k = gaussian_spacetime_kernel()
    assert float(k(2.0, 1.0)) == pytest.approx(math.exp(-1 / 8) / (2 * math.sqrt(2 * math.pi)), rel=1e-14)


@pytest.mark.parametrize("make", [
    lambda: positive_stable_kernel(0.4),
    lambda: stable_convolution_kernel(StableParams(0.7, 0.5)),
    lambda: stable_convolution_kernel(StableParams(1.5, 0.6)),
    lambda: cauchy_type_kernel(0.45),
    lambda: radial_kernel(Fraction(1, 3), 2),
])
def test_fast_log_agrees_with_high_precision(make):
    k = make()
    rng = np.random.default_rng(5)
    xs, ys = np.exp(rng.uniform(-4, 4, 12)), np.exp(rng.uniform(-4, 4, 12))
    fast = k.log_fast(xs, ys)
    exact = np.array([float(mp.log(k(x, y, Precision(25)))) for x, y in zip(xs, ys)])
    assert np.allclose(fast, exact, rtol=0, atol=1e-10)


def test_convolution_kernel_is_ratio_density():
    p = StableParams(0.7, 0.5)
    k = stable_convolution_kernel(p)
    assert abs(k(2.0, 0.5, Precision(30)) - density(p, 4.0, EvalConfig.with_digits(30))) < 1e-28


def _radial_oracle(alpha, d, z):
    """Mixture integral over the positive stable law, with scipy's density."""
    from scipy.stats import levy_stable
    levy_stable.parameterization = "S1"
    a = alpha
    t = math.pi * a / 2
    scale = math.cos(t) ** (1 / a)
    h = d / 2

    def integrand(u):
        v = math.exp(u)
        y = z / v
        g = math.exp((h - 1) * math.log(y) - y - special.gammaln(h))
        return g * levy_stable.pdf(v, a, 1.0, loc=0, scale=scale)

    return integrate.quad(integrand, -15, 25, limit=400, epsabs=0, epsrel=1e-10)[0]


@pytest.mark.parametrize("alpha,d", [(1 / 3, 1), (1 / 3, 2), (0.4, 3), (0.6, 2)])
def test_radial_density_against_mixture_oracle(alpha, d):
    for z in (0.3, 2.0, 9.0):
        want = _radial_oracle(alpha, d, z)
        assert float(radial_density(alpha, d, z, 20)) == pytest.approx(want, rel=1e-7)
        assert math.exp(radial_density_fast(alpha, d, np.array([z]))[0]) == pytest.approx(want, rel=1e-7)


def test_radial_d2_series_normalization():
    # the d = 2 tail series carries the factor 1/pi
    for z in (3.0, 20.0):
        assert abs(radial_series_d2(0.3, z, 25) - radial_density(0.3, 2, z, 25)) < 1e-20


def test_kernel_params_validated():
    for bad in (0, 1, 1.2):
        with pytest.raises(InvalidParams):
            positive_stable_kernel(bad)
    with pytest.raises(InvalidParams):
        fractional_integration_kernel(0)
    with pytest.raises(InvalidParams):
        radial_kernel(0.3, 0)
