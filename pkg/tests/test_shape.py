import math
from fractions import Fraction

import numpy as np
import pytest

from stabletp.errors import InvalidParams
from stabletp.shape import (bell_shape_count, bell_shape_zeros, hermite_zero_count, hermite_zero_count_stated,
                            intersection_count, likelihood_slope, likelihood_slope_monotone, mlr_empirical,
                            mlr_verdict, ratio_nondecreasing_before_mode)
from stabletp.stable import StableParams, density_fast


def test_bell_shape_counts_one_third():
    assert bell_shape_count(Fraction(1, 3), 3) == [0, 1, 2, 3]


@pytest.mark.parametrize("k", [1, 3])
def test_odd_derivatives_vanish_at_zero(k):
    assert abs(density_fast(2 / 3, 0.5, np.array([0.0]), k)[0]) < 1e-10
    assert 0.0 in bell_shape_zeros(Fraction(1, 3), k)


def test_bell_zeros_symmetric():
    z = bell_shape_zeros(Fraction(1, 3), 2)
    assert len(z) == 2 and z[0] == pytest.approx(-z[1], rel=1e-10)


def test_hermite_counts():
    # z H_3(z) has one positive root; the stated bracket count gives two
    assert hermite_zero_count(3) == 1 and hermite_zero_count_stated(3) == 2
    assert [hermite_zero_count(n) for n in range(2, 8)] == [n // 2 for n in range(2, 8)]


@pytest.mark.parametrize("a,r,want", [
    (0.5, 1, True), (Fraction(1, 3), 1, True), (0.7, 1, False), (2, Fraction(1, 2), True),
    (1, 0.5, True), (1.5, 0.5, False), (0.7, 0.5, True),
])
def test_mlr_verdict(a, r, want):
    assert mlr_verdict(StableParams(a, r)) is want


def test_mlr_empirical():
    assert mlr_empirical(StableParams(0.5, 1), 2.0).monotone
    rep = mlr_empirical(StableParams(0.7, 1), 2.0)
    assert not rep.monotone and rep.witness is not None and rep.consistent
    with pytest.raises(InvalidParams):
        mlr_empirical(StableParams(0.5, 1), 1.0)


def test_likelihood_slope():
    xs = np.array([0.1, 1.0, 5.0])
    assert np.allclose(likelihood_slope(0.5, xs), -1.5 + 1 / (4 * xs))
    # the generic route against the closed form of the Levy density
    d = likelihood_slope(0.5000001, xs)
    assert np.allclose(d, -1.5 + 1 / (4 * xs), rtol=1e-4)
    assert likelihood_slope_monotone(0.7)
    with pytest.raises(InvalidParams):
        likelihood_slope_monotone(0.4)


def test_ratio_before_mode():
    assert ratio_nondecreasing_before_mode(0.7, 2.0)


def test_intersections():
    assert intersection_count(StableParams(1, 0.5), 2.0) == 2
    assert intersection_count(StableParams(0.6, 1), 2.0) == 1
    assert intersection_count(StableParams(1.5, 0.5), 0.5) == 2


def test_cauchy_intersections_at_sqrt_two():
    # f(x) = f(x/2)/2 for the Cauchy density: 1/(1+x^2) = 2/(4+x^2), x = +-sqrt(2)
    x = np.array([math.sqrt(2)])
    assert density_fast(1, 0.5, x)[0] == pytest.approx(density_fast(1, 0.5, x / 2)[0] / 2, rel=1e-14)
