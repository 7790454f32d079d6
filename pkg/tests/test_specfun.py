import math

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from stabletp.errors import DomainError, InvalidParams
from stabletp.specfun import (BetaParams, Precision, beta_density, beta_fractional_moment, chebyshev_u,
                              digamma, euler_gamma, gamma, gamma_density, hermite, log_gamma)


@given(st.floats(0.05, 60.0))
@settings(max_examples=60, deadline=None)
def test_log_gamma_matches_scipy(x):
    assert float(log_gamma(x, Precision(30))) == pytest.approx(special.gammaln(x), rel=1e-13, abs=1e-13)


@pytest.mark.parametrize("z", [mp.mpc(0.5, 3), mp.mpc(-2.5, 0.7), mp.mpc(10, -40), mp.mpc(1e-3, 1e-3)])
def test_complex_log_gamma_against_mpmath(z):
    with mp.workdps(50):
        ref = mp.loggamma(z)
    got = log_gamma(z, Precision(40))
    with mp.workdps(50):
        assert abs(got - ref) < mp.mpf(10) ** -35


def test_gamma_poles_raise():
    for v in (0, -1, -7):
        with pytest.raises(DomainError):
            gamma(v)


def test_digamma_and_euler():
    with mp.workdps(70):
        assert abs(-digamma(1) - euler_gamma()) < mp.mpf(10) ** -55
    assert float(digamma(0.5, Precision(20))) == pytest.approx(special.digamma(0.5), rel=1e-14)
    with mp.workdps(40):
        assert abs(euler_gamma(Precision(40)) - mp.euler) < mp.mpf(10) ** -38


@given(st.integers(0, 20), st.floats(0.01, math.pi - 0.01))
@settings(max_examples=80, deadline=None)
def test_chebyshev_u_trig_identity(n, th):
    assert abs(chebyshev_u(n, math.cos(th)) * math.sin(th) - math.sin((n + 1) * th)) < 1e-12 * (n + 1)


@pytest.mark.parametrize("n", range(0, 9))
def test_hermite_matches_scipy(n):
    for z in (-1.3, 0.0, 0.7, 2.5):
        assert hermite(n, z) == pytest.approx(special.eval_hermite(n, z), rel=1e-12, abs=1e-12)


def test_beta_moment_and_density():
    p = BetaParams(1.5, 2.0)
    with mp.workdps(30):
        num = mp.quad(lambda x: x ** 0.7 * beta_density(p, x, Precision(30)), [0, 1])
        assert abs(num - beta_fractional_moment(p, 0.7, Precision(30))) < 1e-20
    with pytest.raises(DomainError):
        beta_fractional_moment(p, -2)
    with pytest.raises(InvalidParams):
        BetaParams(0, 1)


def test_gamma_density_normalized():
    with mp.workdps(30):
        assert abs(mp.quad(lambda x: gamma_density(2.5, x, Precision(30)), [0, 10, mp.inf]) - 1) < 1e-25


def test_precision_bounds():
    with pytest.raises(InvalidParams):
        Precision(10)
    assert Precision(20).raised(30).digits == 50
