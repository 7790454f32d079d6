import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

from stabletp.errors import DomainError, InvalidParams
from stabletp.factorization import (beta_product_spec, chi_square_factorization_check, density_from_cf,
                                    duality_check, h_alpha, h_alpha_direct, h_hat, h_hat_n, h_hat_n_np,
                                    h_hat_np, levy_exponent_oracle, monte_carlo_positive_part,
                                    monte_carlo_zolotarev, positive_stable_moment, sup_distance,
                                    zolotarev_factorization_check)
from stabletp.specfun import Precision
from stabletp.stable import StableParams, fractional_moment_positive_part


def test_beta_product_scales_exceed_one():
    spec = beta_product_spec(0.6, 10)
    assert len(spec.factors) == 11
    assert all(c > 1 for _, _, c in spec.factors)
    assert spec.global_scale == pytest.approx(math.exp(np.euler_gamma * (0.6 - 1)))


@pytest.mark.parametrize("alpha", [0.3, 0.6])
def test_beta_product_cf_converges(alpha):
    errs = [abs(h_hat_n(alpha, n, 1.0) - h_hat(alpha, 1.0)) for n in (5, 20, 80)]
    assert errs[0] > errs[1] > errs[2] and errs[2] < 0.01
    s = np.array([-2.0, 0.5, 3.0])
    assert np.allclose(h_hat_n_np(alpha, 20, s), [complex(h_hat_n(alpha, 20, v)) for v in s], atol=1e-13)
    assert np.allclose(h_hat_np(alpha, s), [complex(h_hat(alpha, v)) for v in s], atol=1e-13)


def test_h_hat_is_a_moment_of_the_positive_law():
    # E[Z^{-i alpha s}] via the real moment formula continued to imaginary order
    a, s = 0.5, 0.8
    with mp.workdps(30):
        want = mp.gamma(1 + 1j * s) / mp.gamma(1 + 1j * a * s)
        assert abs(h_hat(a, s) - want) < 1e-25


def test_fourier_inversion_of_a_gaussian():
    xs = np.array([-2.0, 0.0, 1.5])
    got = density_from_cf(lambda s: np.exp(-s * s / 2), xs)
    assert np.allclose(got, np.exp(-xs ** 2 / 2) / math.sqrt(2 * math.pi), atol=1e-11)


def test_inversion_refuses_slow_decay():
    with pytest.raises(Exception):
        density_from_cf(lambda s: 1 / (1 + np.abs(s)) + 0j, np.array([0.0]))


@pytest.mark.parametrize("alpha", [0.3, 0.6])
def test_log_density_two_routes(alpha):
    xs = np.linspace(-6, 6, 25)
    assert np.allclose(h_alpha(alpha, xs), h_alpha_direct(alpha, xs), atol=1e-10)


def test_sup_distance_regression():
    # frozen from the CF-inversion oracle
    assert sup_distance(0.3, 5) == pytest.approx(0.012336356090560621, rel=1e-7)
    assert sup_distance(0.3, 40) == pytest.approx(0.0016410463851237594, rel=1e-7)


@pytest.mark.parametrize("beta,s", [(0.3, 0.7), (0.5, -1.2), (0.8, 2.5)])
def test_levy_exponent_matches_gamma_ratio(beta, s):
    got = levy_exponent_oracle(beta, s, Precision(20))
    with mp.workdps(30):
        want = mp.gamma(1 - 1j * s / beta) / mp.gamma(1 - 1j * s)
        assert abs(got - want) < 1e-15


def test_positive_moment_formula_against_quadrature():
    # Levy density x^{-3/2} e^{-1/(4x)} / (2 sqrt(pi))
    with mp.workdps(30):
        levy = lambda x: x ** mp.mpf(-1.5) * mp.exp(-1 / (4 * x)) / (2 * mp.sqrt(mp.pi))
        # x = e^u turns the x^{-1.2} tail into e^{-u/5}; both cut tails are below 1e-34
        num = mp.quad(lambda u: mp.exp(mp.mpf(1.3) * u) * levy(mp.exp(u)), [-8, -3, 0, 5, 30, 100, 250, 400])
        assert abs(num - positive_stable_moment(0.5, 0.3)) < 1e-12
    with pytest.raises(DomainError):
        positive_stable_moment(0.5, 0.6)


@pytest.mark.parametrize("a,r,s", [(0.7, 0.5, 0.3), (1.5, 0.6, -0.2), (1.2, 0.5, 0.4), (0.5, 1, 0.2)])
def test_zolotarev_factorization(a, r, s):
    lhs, rhs = zolotarev_factorization_check(StableParams(a, r), s)
    with mp.workdps(40):
        assert abs(lhs - rhs) < mp.mpf(10) ** -25 * abs(rhs)


def test_duality_exact_inputs():
    lhs, rhs = duality_check(Fraction(3, 2), Fraction(1, 2), 0.3)
    with mp.workdps(40):
        assert abs(lhs - rhs) < mp.mpf(10) ** -25
    with pytest.raises(InvalidParams):
        duality_check(0.5, 0.5, 0.1)


def test_chi_square_factorization():
    lhs, rhs = chi_square_factorization_check(0.4, 5, 0.2)
    with mp.workdps(40):
        assert abs(lhs - rhs) < mp.mpf(10) ** -25
    with pytest.raises(InvalidParams):
        chi_square_factorization_check(0.4, 4, 0.2)


def test_monte_carlo_within_three_sigma():
    p = StableParams(0.8, 0.7)
    m, se = monte_carlo_zolotarev(p, 0.2, 200_000, seed=3)
    exact = float(zolotarev_factorization_check(p, 0.2)[1])
    assert abs(m - exact) < 3 * se
    p = StableParams(1.5, 0.5)
    m, se = monte_carlo_positive_part(p, 0.3, 200_000, seed=4)
    assert abs(m - float(fractional_moment_positive_part(p, 0.3, Precision(20)))) < 3 * se
