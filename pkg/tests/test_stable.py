import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

from stabletp.errors import DomainError, InvalidParams
from stabletp.specfun import Precision
from stabletp.stable import (EvalConfig, StableParams, density, density_derivative, density_fast,
                             derivative_at_zero, fractional_moment_positive_part, laplace_oracle,
                             log_density_fast, mode, positive_mass, sample, space_time_density,
                             symmetric_density, symmetric_density_hermite)

CFG = EvalConfig.with_digits(25)
PARAMS = [(0.3, 1), (0.5, 0.5), (0.7, 0.5), (0.8, 0.7), (1.2, 0.4), (1.5, 0.6), (1.8, 0.5), (0.6, 0.2)]


def test_params_validation():
    for a, r in [(0, 0.5), (2.1, 0.5), (1.5, 0.9), (2, 0.4), (1, 1), (0.5, 1.2)]:
        with pytest.raises(InvalidParams):
            StableParams(a, r)
    p = StableParams(0.7, Fraction(2, 7))
    assert p.gamma_param == Fraction(5, 2)


@pytest.mark.parametrize("a,r", PARAMS)
def test_density_against_scipy(a, r, oracle):
    xs = [-3.0, -0.7, 0.2, 1.1, 4.0]
    want = oracle(a, r, xs)
    got = np.array([float(density(StableParams(a, r), x, CFG)) for x in xs])
    assert np.allclose(got, want, rtol=1e-9, atol=1e-300)


@pytest.mark.parametrize("a,r", PARAMS)
def test_fast_path_against_scipy(a, r, oracle):
    xs = np.array([-5.0, -1.0, -0.01, 0.05, 0.9, 2.0, 30.0])
    assert np.allclose(density_fast(a, r, xs), oracle(a, r, xs), rtol=1e-9, atol=1e-300)
    with np.errstate(divide="ignore"):
        assert np.allclose(np.exp(log_density_fast(a, r, xs)), oracle(a, r, xs), rtol=1e-9, atol=1e-300)


@pytest.mark.parametrize("method", ["series", "integral", "fourier"])
def test_methods_agree(method):
    p = StableParams(0.6, 0.7)
    ref = density(p, 1.3, CFG, "integral")
    with mp.workdps(40):
        assert abs(density(p, 1.3, CFG, method) - ref) < 1e-23


def test_closed_forms():
    with mp.workdps(70):
        assert abs(density(StableParams(1, 0.5), 0) - 1 / mp.pi) < mp.mpf(10) ** -50
        assert abs(density(StableParams(2, Fraction(1, 2)), 0) - 1 / (2 * mp.sqrt(mp.pi))) < mp.mpf(10) ** -50
    # Levy density x^{-3/2} e^{-1/(4x)} / (2 sqrt(pi))
    with mp.workdps(40):
        x = mp.mpf(2)
        levy = x ** -1.5 * mp.exp(-1 / (4 * x)) / (2 * mp.sqrt(mp.pi))
        assert abs(density(StableParams(Fraction(1, 2), 1), x, CFG, "integral") - levy) < 1e-23


@pytest.mark.parametrize("a,r", [(0.7, 0.5), (1.5, 0.6), (0.4, 1)])
def test_derivatives_against_finite_differences(a, r):
    p = StableParams(a, r)
    for j in (1, 2, 3):
        got = density_derivative(p, j, 0.8, CFG)
        fd = density_derivative(p, j, 0.8, CFG, "fd")
        assert abs(got - fd) < 1e-12 * max(1, abs(got))


@pytest.mark.parametrize("a,r", [(0.7, 0.5), (1.5, 0.4), (0.9, 0.5)])
@pytest.mark.parametrize("j", [1, 2, 3, 4])
def test_fast_derivatives(a, r, j):
    xs = np.array([1e-6, 1e-3, 0.05, 0.5, 1.7, 6.0])
    got = density_fast(a, r, xs, j)
    want = np.array([float(density_derivative(StableParams(a, r), j, x, CFG)) for x in xs])
    assert np.allclose(got, want, rtol=2e-7, atol=1e-12 * np.max(np.abs(want)))


def test_derivative_at_zero():
    p = StableParams(0.4, Fraction(1, 3))
    for j in (1, 2, 3):
        v = derivative_at_zero(p, j)
        with mp.workdps(70):
            want = (-1) ** (j - 1) * mp.gamma(1 + j / mp.mpf(0.4)) * mp.sinpi(mp.mpf(j) / 3) / (mp.pi * j)
            assert abs(v - want) <= mp.mpf(10) ** -50 * abs(want)
        near = density_derivative(p, j - 1, mp.mpf(10) ** -18, CFG)
        assert abs(near - v) <= 1e-8 * max(abs(v), 1)


def test_space_time_scaling():
    p = StableParams(0.7, 0.5)
    t, x = 2.0, 0.9
    with mp.workdps(40):
        s = mp.mpf(2) ** (-1 / mp.mpf(0.7))
        assert abs(space_time_density(p, t, x, CFG) - s * density(p, x * s, CFG)) < 1e-22
    with pytest.raises(DomainError):
        space_time_density(p, 0, 1)


@pytest.mark.parametrize("a", [0.3, 0.5, 0.7])
def test_laplace_transform(a):
    for lam in (0.5, 2.0):
        assert laplace_oracle(a, lam) == pytest.approx(math.exp(-lam ** a), abs=1e-8)


@pytest.mark.parametrize("a,r", [(0.5, 0.5), (0.7, 0.3), (1.5, 0.5), (1.2, 0.4)])
def test_positive_mass(a, r):
    assert positive_mass(StableParams(a, r)) == pytest.approx(r, abs=1e-8)


def test_positive_part_moment_by_quadrature():
    p = StableParams(0.8, 0.7)
    s = 0.3
    with mp.workdps(20):
        num = mp.quad(lambda x: x ** s * density(p, x, EvalConfig.with_digits(15)), [0, 1, 10, mp.inf])
    assert abs(num / mp.mpf(0.7) - fractional_moment_positive_part(p, s, Precision(20))) < 1e-8


def test_symmetric_density_routes():
    a = Fraction(1, 3)
    for n in (0, 1, 2):
        v = symmetric_density(a, n, 0.6, CFG)
        assert abs(v - symmetric_density(a, n, 0.6, CFG, "cosine")) < 1e-18
        assert abs(v - symmetric_density_hermite(a, n, 0.6, EvalConfig.with_digits(20))) < 1e-12


def test_mode_is_critical_point():
    p = StableParams(0.7, 1)
    m = mode(p, CFG)
    assert abs(density_derivative(p, 1, m, CFG)) < 1e-20
    assert density_derivative(p, 2, m, CFG) < 0


def test_sampler_matches_distribution_function(oracle):
    p = StableParams(1.5, 0.6)
    x = sample(p, 3, 200_000)
    assert np.mean(x > 0) == pytest.approx(0.6, abs=0.004)
    assert np.array_equal(x, sample(p, 3, 200_000))
    # empirical density on [0.5, 1] against the oracle
    with mp.workdps(15):
        pr = float(mp.quad(lambda t: oracle(1.5, 0.6, float(t)), [0.5, 1.0]))
    assert np.mean((x > 0.5) & (x < 1.0)) == pytest.approx(pr, abs=0.004)
