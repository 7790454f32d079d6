from fractions import Fraction

import mpmath as mp
import pytest

from stabletp.asymptotics import (DeltaSeriesConfig, GFunction, delta_k, delta_k_at_zero,
                                  delta_k_at_zero_display, g_series, leading_coefficient_identity,
                                  radial_leading_identity, tail_exponent_fit, wronskian)
from stabletp.errors import DomainError, InvalidParams
from stabletp.specfun import Precision
from stabletp.stable import EvalConfig, StableParams, density_derivative

CFG = DeltaSeriesConfig(digits=30)


def test_g_series_matches_density_engine():
    p = StableParams(0.4, 0.7)
    z = mp.mpf(3)
    ec = EvalConfig.with_digits(30)
    # g_2 = -z f'(z); g_2' = -f'(z) - z f''(z)
    with mp.workdps(40):
        want = -density_derivative(p, 1, z, ec) - z * density_derivative(p, 2, z, ec)
        assert abs(g_series(p, 2, 2, z, CFG) - want) < mp.mpf(10) ** -25 * abs(want)


@pytest.mark.parametrize("a,r,z", [(0.4, 0.7, 5.0), (0.6, 1, 2.0)])
def test_series_and_engine_determinants_agree(a, r, z):
    p = StableParams(a, r)
    ser = delta_k(p, 3, z, CFG)
    eng = delta_k(p, 3, z, DeltaSeriesConfig(q_max=5, digits=30))  # forces the engine route
    with mp.workdps(40):
        assert abs(ser - eng) < mp.mpf(10) ** -20 * abs(ser)


def test_wronskian_generic_matches_series_derivatives():
    p = StableParams(0.4, 0.7)
    gs = [GFunction(p, j, CFG) for j in (1, 2)]
    with mp.workdps(40):
        a = wronskian(gs, 4.0, 25)
        b = wronskian([lambda t, g=g: g(t) for g in gs], 4.0, 25)
        assert abs(a - b) < mp.mpf(10) ** -8 * abs(a)
        assert abs(a - delta_k(p, 2, 4.0, CFG)) < mp.mpf(10) ** -20 * abs(a)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_delta_at_zero_closed_form_is_the_limit(k):
    p = StableParams(0.7, 0.4)
    z0 = delta_k_at_zero(p, k)
    near = delta_k(p, k, mp.mpf(10) ** -12, CFG)
    with mp.workdps(40):
        assert abs(near - z0) < 1e-8 * abs(z0)
        # the display without prod (j-1)! differs from k = 3 on
        ratio = z0 / delta_k_at_zero_display(p, k)
        assert abs(ratio - [1, 1, 2, 12][k - 1]) < 1e-25


def test_delta_at_zero_value_frozen():
    # Delta^2(0) at (0.4, 1/3): Gamma(3.5) Gamma(6) sin(pi/3) sin(2 pi/3) / (2 pi^2)
    with mp.workdps(40):
        want = mp.gamma(3.5) * mp.gamma(6) * mp.sinpi(mp.mpf(1) / 3) * mp.sinpi(mp.mpf(2) / 3) / (2 * mp.pi ** 2)
        got = delta_k_at_zero(StableParams(Fraction(2, 5), Fraction(1, 3)), 2)
        assert abs(got - want) < mp.mpf(10) ** -25


def test_tail_exponent():
    slope = tail_exponent_fit(StableParams(0.5, 1), 1)
    assert slope == pytest.approx(-1.5, rel=1e-3)
    slope = tail_exponent_fit(StableParams(0.4, 1), 2)
    assert slope == pytest.approx(-4.2, rel=0.02)
    with pytest.raises(DomainError):
        tail_exponent_fit(StableParams(1.2, 0.5), 2)


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_leading_identities(alpha, k):
    for fn in (leading_coefficient_identity, radial_leading_identity):
        lhs, rhs = fn(alpha, k)
        with mp.workdps(50):
            assert abs(lhs - rhs) < mp.mpf(10) ** -30 * abs(rhs)


def test_validation():
    with pytest.raises(InvalidParams):
        delta_k(StableParams(0.5, 1), 0, 1.0)
    with pytest.raises(DomainError):
        delta_k(StableParams(0.5, 1), 2, -1.0)
    with pytest.raises(InvalidParams):
        leading_coefficient_identity(0.5, 5)
