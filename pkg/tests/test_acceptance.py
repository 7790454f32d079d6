"""Acceptance criteria 1-13 at their stated tolerances.

Criteria 9 and 12 cannot be met as stated (see the README); they run
unchanged, report FAIL and are strict xfails so the rest of the suite stays
meaningful.
"""
import pytest

from stabletp import acceptance
from stabletp.cli import main

from .conftest import CRITERION_LINES

UNATTAINABLE = {
    9: "d(alpha, n) decays like C/n: d(40)/d(5) is about 1/8, not below 1/10",
    12: "the N = 200 remainder at z = 0.9 is about z^201 / (1 + 2cz + z^2) > 1e-10",
}


def _record(res):
    CRITERION_LINES[res.number] = res.line()
    print(res.line())


@pytest.mark.parametrize("number", [n for n, _, _ in acceptance.CRITERIA if n != 13])
def test_criterion(number, request):
    if number in UNATTAINABLE:
        request.applymarker(pytest.mark.xfail(strict=True, reason=UNATTAINABLE[number]))
    res = acceptance.run_criterion(number)
    _record(res)
    assert res.passed, res.measured


def test_criterion_9_regression_constants():
    res = acceptance.run_criterion(9)
    for alpha, m in res.measured.items():
        assert m["decreasing"] and m["matches_frozen"], (alpha, m)


def test_criterion_12_holds_below_the_endpoint():
    res = acceptance.run_criterion(12)
    for m in res.measured.values():
        assert m["failing_z"] == [0.9]


def test_criterion_13_selftest_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    codes = [main(["selftest", "--quick", "--seed", "3", "--out", str(p)]) for p in (a, b)]
    same = a.read_bytes() == b.read_bytes()
    res = acceptance.CriterionResult(13, "determinism", same, {"identical": same})
    _record(res)
    assert codes == [0, 0]
    assert same
