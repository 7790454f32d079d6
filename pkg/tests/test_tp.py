import json
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stabletp.errors import InvalidParams
from stabletp.kernels import (cauchy_type_kernel, fractional_integration_kernel, gaussian_spacetime_kernel,
                              positive_stable_kernel)
from stabletp.specfun import Precision
from stabletp.tp import (StepFunction, TPReport, _lu_det, cauchy_double_alternant, minor,
                         normalized_minors_fast, sign_changes, sign_regularity_check, tp_search,
                         variation_diminishing_check)


@given(st.integers(1, 6), st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_lu_det_matches_mpmath(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n))
    with mp.workdps(40):
        M = [[mp.mpf(v) for v in row] for row in A]
        ref = mp.det(mp.matrix(M))
        got = _lu_det([row[:] for row in M], n)
        assert abs(got - ref) <= mp.mpf(10) ** -30 * max(1, abs(ref))


def test_lu_det_singular():
    with mp.workdps(30):
        M = [[mp.mpf(1), mp.mpf(2)], [mp.mpf(2), mp.mpf(4)]]
        assert _lu_det(M, 2) == 0


def test_double_alternant_closed_form():
    xs, ys = [0.5, 1.0, 3.0], [0.2, 0.9, 4.0]
    with mp.workdps(50):
        M = mp.matrix([[1 / (mp.mpf(x) ** 2 + mp.mpf(y) ** 2) for y in ys] for x in xs])
        assert abs(mp.det(M) - cauchy_double_alternant(xs, ys, Precision(40))) < mp.mpf(10) ** -38 * abs(mp.det(M))
    with pytest.raises(InvalidParams):
        cauchy_double_alternant([1, 0.5], [1, 2])


def test_minor_classification():
    k = gaussian_spacetime_kernel()
    res = minor(k, [0.5, 1.0, 2.0], [0.1, 0.4, 1.3])
    assert res.classification == "positive"
    # swapping two columns of a positive minor flips its sign
    assert minor(k, [0.5, 1.0], [1.3, 0.1]).classification == "negative"
    k = cauchy_type_kernel(0.6)
    with pytest.raises(InvalidParams):
        minor(k, [1.0], [1.0, 2.0])


def test_fast_minors_agree_with_exact():
    k = positive_stable_kernel(0.4)
    rng = np.random.default_rng(1)
    U = np.sort(rng.uniform(-2, 2, (20, 3)), axis=1)
    W = np.sort(rng.uniform(-2, 2, (20, 3)), axis=1)
    fast = normalized_minors_fast(k, np.exp(U), np.exp(W))
    for i in range(5):
        ex = float(minor(k, np.exp(U[i]), np.exp(W[i]), Precision(30)).normalized)
        assert fast[i] == pytest.approx(ex, abs=1e-12)


# frozen witnesses (seed 1): normalized minors of the first confirmed counterexample
@pytest.mark.parametrize("make,m,budget,want", [
    (lambda: cauchy_type_kernel(0.4), 3, 10_000, -1.86e-5),
    (lambda: cauchy_type_kernel(0.6), 2, 10_000, -0.0467),
    (lambda: positive_stable_kernel(0.45), 3, 10_000, -7.36e-7),
])
def test_refutations(make, m, budget, want):
    rep = tp_search(make(), m, budget, seed=1)
    assert rep.verdict == "refuted"
    assert rep.counterexample["value"] == pytest.approx(want, rel=0.02)
    xs, ys = rep.counterexample["xs"], rep.counterexample["ys"]
    assert all(a < b for a, b in zip(xs, xs[1:])) and all(a < b for a, b in zip(ys, ys[1:]))
    assert minor(make(), xs, ys, Precision(90)).classification == "negative"


def test_consistent_and_deterministic():
    k = cauchy_type_kernel(Fraction(1, 3))
    a = tp_search(k, 3, 2000, seed=4)
    b = tp_search(k, 3, 2000, seed=4)
    assert a.verdict == "consistent" and a.to_json() == b.to_json()
    assert set(json.loads(a.to_json())) == {"kernel", "order", "budget", "seed", "digits", "worst_minor",
                                            "counterexample", "verdict"}


def test_order_one_is_positivity():
    assert tp_search(cauchy_type_kernel(0.4), 1, 500).verdict == "consistent"


def test_report_invariant():
    with pytest.raises(InvalidParams):
        TPReport("k", 2, 10, 0, 60, -1.0, None, "refuted")


def test_fracint_indeterminate_minors_are_not_refutations():
    rep = tp_search(fractional_integration_kernel(3), 5, 1000, seed=1)
    assert rep.verdict == "consistent" and rep.indeterminate >= 1


def test_sign_changes():
    assert sign_changes([1, -1, 0, -2, 3]) == 2
    assert sign_changes([1e-15, -1e-15, 1.0], zero_tol=1e-12) == 0
    assert sign_changes([]) == 0


def test_sign_regularity():
    assert sign_regularity_check(gaussian_spacetime_kernel(), 3, 300).sign_regular
    rep = sign_regularity_check(cauchy_type_kernel(0.6), 2, 300)
    assert rep.refuted_at == 2


def test_variation_diminishing_for_tp_kernel():
    # the Gaussian kernel is TP_infinity: S(g) <= S(h)
    h = StepFunction((0.1, 1.0, 3.0, 10.0), (1.0, -1.0, 1.0))
    sh, sg = variation_diminishing_check(gaussian_spacetime_kernel(), h)
    assert sh == 2 and sg <= sh
    with pytest.raises(InvalidParams):
        StepFunction((1.0, 0.5), (1.0,))
