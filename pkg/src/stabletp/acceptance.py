"""Acceptance suite: criteria 1-13, shared by ``stabletp selftest`` and the tests.

Each criterion returns a CriterionResult with a pass flag and the measured
values it was judged on. Runtimes are kept out of the JSON summary so that
two runs with the same seeds serialize to identical bytes.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp
import numpy as np

from . import asymptotics, factorization, kernels, shape, stable, tp
from .specfun import Precision
from .stable import EvalConfig, StableParams

SCHEMA = 1

# frozen regression constants: sup distances of the Beta-product approximation
# (CF-inversion oracle, 400 points of [-10, 10]); see criterion 9
SUP_DISTANCE = {
    0.3: {5: 0.012336356090560621, 10: 0.006376677764655288, 20: 0.0032511622586689215, 40: 0.0016410463851237594},
    0.6: {5: 0.07707516426552315, 10: 0.033809925891926995, 20: 0.01610827177737452, 40: 0.007826132600025543},
}


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    measured: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"criterion {self.number:2d} {'PASS' if self.passed else 'FAIL'}  {self.title}  ({self.seconds:.1f}s)"


def _f(v) -> float:
    return float(v)


def _rel(a, b) -> float:
    with mp.workdps(120):
        a, b = mp.mpf(a), mp.mpf(b)
        return _f(abs(a - b) / max(abs(b), mp.mpf(10) ** -300))


# ---------------------------------------------------------------------------


def crit_transform(digits, quick):
    lap = {}
    for a in (0.3, 0.5, 0.7):
        for lam in (0.5, 1.0, 2.0):
            lap[f"{a},{lam}"] = abs(stable.laplace_oracle(a, lam) - math.exp(-lam ** a))
    pairs = [(0.5, 0.5), (0.7, 0.3), (0.8, 0.8), (1.2, 0.4), (1.5, 0.5), (1.8, 0.5)]
    mass = {f"{a},{r}": abs(stable.positive_mass(StableParams(a, r)) - r) for a, r in pairs}
    ok = max(lap.values()) < 1e-6 and max(mass.values()) < 1e-6
    return ok, {"laplace_max_error": max(lap.values()), "mass_max_error": max(mass.values())}


def crit_closed_forms(digits, quick):
    cfg = EvalConfig.with_digits(30)
    xs = [mp.mpf(-4) + mp.mpf(8) * i / 19 for i in range(20)]
    pos = [mp.mpf(1) / 20 + mp.mpf(5) * i / 19 for i in range(20)]
    err = {}
    p = StableParams(1, Fraction(2, 5))
    err["cauchy"] = max(_rel(stable.density(p, x, cfg, "fourier"), stable.density(p, x, cfg, "closed")) for x in xs)
    p = StableParams(2, Fraction(1, 2))
    err["gauss"] = max(_rel(stable.density(p, x, cfg, "taylor"), stable.density(p, x, cfg, "closed")) for x in xs)
    p = StableParams(Fraction(1, 2), 1)
    err["levy"] = max(_rel(stable.density(p, x, cfg, "integral"), stable.density(p, x, cfg, "closed")) for x in pos)
    return max(err.values()) < 1e-8, err


def _tp_pair(k, order, budget_hi, digits, seed=1, budget_lo=10_000):
    """(consistent at order, refuted at order + 1) for a finite predicted order."""
    prec = Precision(digits)
    lo = tp.tp_search(k, order, budget_lo, seed, prec)
    out = {"order": order, "at_order": lo.verdict, "at_order_worst": lo.worst_minor}
    ok = lo.verdict == "consistent"
    if budget_hi:
        hi = tp.tp_search(k, order + 1, budget_hi, seed, prec)
        out.update(above=hi.verdict, above_worst=hi.worst_minor,
                   witness=hi.counterexample["value"] if hi.counterexample else None)
        ok = ok and hi.verdict == "refuted"
    return ok, out


def crit_tp_positive(digits, quick):
    res, ok = {}, True
    alphas = [Fraction(1, 3), 0.3, 0.4, 0.45, 0.6]
    for make, tag in ((kernels.cauchy_type_kernel, "cauchy"), (kernels.positive_stable_kernel, "positive")):
        for a in alphas:
            k = make(a)
            pred = k.predicted_order
            if pred.is_infinite:
                r = tp.tp_search(k, 4, 10_000, 1, Precision(digits))
                good, m = r.verdict == "consistent", {"order": "infinity", "at_4": r.verdict, "worst": r.worst_minor}
            else:
                good, m = _tp_pair(k, pred.value, 100_000, digits)
            res[f"{tag}:{float(a):.4g}"] = m
            ok = ok and good
    return ok, res


def crit_tp_general(digits, quick):
    res, ok = {}, True
    for a, r in [(Fraction(1, 2), Fraction(1, 2)), (0.7, 0.5), (1.0, 0.4), (1.5, 0.6)]:
        k = kernels.stable_convolution_kernel(StableParams(a, r))
        pred = k.predicted_order
        if pred.is_infinite:
            rep = tp.tp_search(k, 4, 10_000, 1, Precision(digits))
            good, m = rep.verdict == "consistent", {"order": "infinity", "at_4": rep.verdict, "worst": rep.worst_minor}
        else:
            good, m = _tp_pair(k, pred.value, 100_000, digits)
        res[f"{float(a):.4g},{float(r):.4g}"] = m
        ok = ok and good
    return ok, res


def crit_radial(digits, quick):
    res, ok = {}, True
    prec = Precision(digits)
    for d in (1, 2, 3):
        rep = tp.tp_search(kernels.radial_kernel(Fraction(1, 3), d), 3, 1000, 1, prec)
        res[f"1/3,d={d}"] = {"verdict": rep.verdict, "worst": rep.worst_minor}
        ok = ok and rep.verdict == "consistent"
    rep = tp.tp_search(kernels.radial_kernel(0.4, 2), 3, 1000, 1, prec)
    res["0.4,d=2"] = {"verdict": rep.verdict, "worst": rep.worst_minor}
    return ok and rep.verdict == "refuted", res


def crit_fracint(digits, quick):
    prec = Precision(digits)
    runs = [(2.5, 3, "consistent"), (2.5, 4, "refuted"), (3, 5, "consistent")]
    res, ok = {}, True
    for beta, m, want in runs:
        rep = tp.tp_search(kernels.fractional_integration_kernel(beta), m, 1000, 1, prec)
        res[f"beta={beta},order={m}"] = {"verdict": rep.verdict, "worst": rep.worst_minor,
                                         "indeterminate": rep.indeterminate}
        ok = ok and rep.verdict == want
    return ok, res


def crit_determinants(digits, quick):
    p = StableParams(0.4, Fraction(1, 3))
    cfg = asymptotics.DeltaSeriesConfig(digits=max(30, min(digits, 40)))
    z0 = asymptotics.delta_k_at_zero(p, 2, Precision(30))
    zs = [1e-8, 1e-10]
    gap = max(_f(abs(asymptotics.delta_k(p, 2, z, cfg) - z0)) for z in zs)

    def inv_square_sum(x, y, d):
        with mp.workdps(d + 10):
            return 1 / (mp.mpf(x) ** 2 + mp.mpf(y) ** 2)

    k = kernels.Kernel("inverse-square-sum", inv_square_sum, None, None)
    rng = np.random.default_rng(2024)
    prec = Precision(digits)
    worst = 0.0
    for i in range(100):
        m = 1 + i % 5
        xs = np.sort(rng.uniform(0.1, 10.0, m))
        ys = np.sort(rng.uniform(0.1, 10.0, m))
        lu = tp.minor(k, xs, ys, prec).value
        cf = tp.cauchy_double_alternant(xs, ys, prec)
        worst = max(worst, _rel(lu, cf))
    tol = 10.0 ** (20 - digits)
    return gap < 1e-6 and worst < tol, {"delta2_gap": gap, "alternant_max_rel": worst, "tolerance": tol}


def crit_tails(digits, quick):
    fits = {}
    ok = True
    for a, r, k in [(0.4, 1, 2), (0.3, 0.5, 2), (0.5, 1, 1)]:
        slope = asymptotics.tail_exponent_fit(StableParams(a, r), k)
        target = -k * (k + 1) * (a + 1) / 2
        rel = abs(slope - target) / abs(target)
        fits[f"{a},{r},{k}"] = {"slope": slope, "target": target, "rel": rel}
        ok = ok and rel < 0.02
    worst = 0.0
    for a in (0.25, 0.5, 0.75):
        for k in range(1, 5):
            for fn in (asymptotics.leading_coefficient_identity, asymptotics.radial_leading_identity):
                lhs, rhs = fn(a, k)
                worst = max(worst, _rel(lhs, rhs))
    return ok and worst < 1e-10, {"fits": fits, "identity_max_rel": worst}


def crit_beta_product(digits, quick):
    ns = (5, 10, 20, 40)
    out, ok = {}, True
    for a in (0.3, 0.6):
        d = [factorization.sup_distance(a, n) for n in ns]
        dec = all(x > y for x, y in zip(d, d[1:]))
        tenfold = d[-1] < d[0] / 10
        frozen = all(abs(v - SUP_DISTANCE[a][n]) < 1e-9 for v, n in zip(d, ns))
        out[str(a)] = {"d": d, "decreasing": dec, "ratio_40_5": d[-1] / d[0], "matches_frozen": frozen}
        ok = ok and dec and tenfold
    return ok, out


def crit_moments(digits, quick):
    prec = Precision(30)
    worst = {}
    zol = [(StableParams(a, r), s) for (a, r), s in zip(
        [(0.5, 1), (0.7, 0.5), (0.8, 0.7), (1.2, 0.6), (1.5, 0.5), (1.5, 0.6), (1.8, 0.5), (0.3, 0.8), (1, 0.4), (1.9, 0.52)],
        [0.3, -0.2, 0.2, 0.5, 0.3, -0.4, 0.1, 0.05, 0.25, 0.6])]
    worst["zolotarev"] = max(_rel(*factorization.zolotarev_factorization_check(p, s, prec)) for p, s in zol)
    dual = [(1.5, 0.5, 0.3), (1.5, 0.6, -0.2), (1.2, 0.5, 0.4), (1.8, 0.5, 0.2), (1.3, 0.4, -0.3),
            (1.7, 0.45, 0.1), (1.1, 0.5, 0.6), (1.9, 0.5, -0.5), (1.4, 0.6, 0.35), (1.6, 0.55, 0.15)]
    worst["duality"] = max(_rel(*factorization.duality_check(a, r, s, prec)) for a, r, s in dual)
    chi = [(0.3, 3, 0.2), (0.5, 3, -0.3), (0.7, 5, 0.1), (0.4, 7, 0.3), (0.6, 3, 0.5),
           (0.2, 5, -0.1), (0.8, 9, 0.05), (0.5, 11, 0.3), (0.35, 3, 0.2), (0.65, 5, -0.2)]
    worst["chi_square"] = max(_rel(*factorization.chi_square_factorization_check(a, d, s, prec)) for a, d, s in chi)
    n = 10**5 if quick else 10**6
    mc = {}
    p, s = StableParams(0.8, 0.7), 0.2
    m, se = factorization.monte_carlo_zolotarev(p, s, n, seed=11)
    mc["zolotarev 0.8,0.7"] = {"mean": m, "se": se, "exact": _f(factorization.zolotarev_factorization_check(p, s, prec)[1])}
    p, s = StableParams(1.5, 0.5), 0.3
    m, se = factorization.monte_carlo_positive_part(p, s, n, seed=12)
    mc["positive part 1.5,0.5"] = {"mean": m, "se": se, "exact": _f(stable.fractional_moment_positive_part(p, s, prec))}
    for v in mc.values():
        v["sigmas"] = abs(v["mean"] - v["exact"]) / v["se"]
    ok = max(worst.values()) < 1e-10 and all(v["sigmas"] < 3 for v in mc.values())
    return ok, {"identity_max_rel": worst, "monte_carlo": mc}


def crit_shape(digits, quick):
    counts = shape.bell_shape_count(Fraction(1, 3), 3)
    ok = counts == [0, 1, 2, 3]
    mlr = {}
    for a, r in [(0.5, 1), (0.4, 1), (0.7, 1), (0.9, 1), (1, 0.5), (2, Fraction(1, 2)), (1.5, 0.5), (0.7, 0.5)]:
        p = StableParams(a, r)
        reps = [shape.mlr_empirical(p, c) for c in (2.0, 0.5, 1.3, 5.0)]
        verdict = shape.mlr_verdict(p)
        agree = all(x.monotone for x in reps) if verdict else any(not x.monotone for x in reps)
        mlr[f"{float(a):g},{float(r):g}"] = {"verdict": verdict, "agree": agree}
        ok = ok and agree
    inter = {}
    for a, r, c, want in [(1, 0.5, 2, 2), (1.5, 0.5, 0.5, 2), (0.7, 0.5, 2, 2), (1.2, 0.6, 0.7, 2),
                          (0.6, 1, 2, 1), (0.8, 1, 3, 1)]:
        n = shape.intersection_count(StableParams(a, r), c)
        inter[f"{a},{r},{c}"] = n
        ok = ok and n == want
    slope = {str(a): shape.likelihood_slope_monotone(a) for a in (0.6, 0.7, 0.9)}
    ok = ok and all(slope.values())
    return ok, {"bell_counts": counts, "mlr": mlr, "intersections": inter, "slope_monotone": slope}


def crit_chebyshev(digits, quick):
    out, worst = {}, 0.0
    zs = [i / 100 for i in range(91)]
    for a in (0.3, 0.5, 0.7):
        k = kernels.cauchy_type_kernel(a)
        errs = []
        with mp.workdps(40):
            for z in zs:
                zz = mp.mpf(z)
                exact = k(1, zz, Precision(40))
                c = mp.cospi(a)
                s = mp.fsum((-zz) ** n * mp.chebyu(n, c) for n in range(201))
                errs.append(_f(abs(s - exact)))
        bad = [z for z, e in zip(zs, errs) if e >= 1e-10]
        out[str(a)] = {"max_error": max(errs), "failing_z": bad,
                       "double_max_error": max(abs(kernels.chebyshev_partial_sum(a, z, 200) - _f(k(1, z)))
                                               for z in zs)}
        worst = max(worst, max(errs))
    return worst < 1e-10, out


def _determinism_probe(digits):
    k = kernels.cauchy_type_kernel(0.4)
    rep = tp.tp_search(k, 3, 2000, 7, Precision(digits)).to_json()
    ev = json.dumps([_f(stable.density(StableParams(0.7, 0.5), x, EvalConfig.with_digits(20)))
                     for x in (-1.0, 0.5, 3.0)])
    return rep + ev


def crit_determinism(digits, quick):
    a = _determinism_probe(digits)
    b = _determinism_probe(digits)
    return a == b, {"identical": a == b, "bytes": len(a)}


CRITERIA = [
    (1, "transform fidelity", crit_transform),
    (2, "closed-form agreement", crit_closed_forms),
    (3, "TP predicate vs search, positive and Cauchy kernels", crit_tp_positive),
    (4, "TP predicate vs search, general kernel", crit_tp_general),
    (5, "radial kernel", crit_radial),
    (6, "fractional integration kernel", crit_fracint),
    (7, "determinant closed forms", crit_determinants),
    (8, "tail asymptotics and leading identities", crit_tails),
    (9, "Beta-product convergence", crit_beta_product),
    (10, "moment identities", crit_moments),
    (11, "shape suite", crit_shape),
    (12, "Chebyshev generating function", crit_chebyshev),
    (13, "determinism", crit_determinism),
]

QUICK = (1, 2, 6, 7, 8, 13)


def run_criterion(number: int, digits: int = 60, quick: bool = False) -> CriterionResult:
    for n, title, fn in CRITERIA:
        if n == number:
            t = time.perf_counter()
            ok, measured = fn(digits, quick)
            return CriterionResult(n, title, bool(ok), measured, time.perf_counter() - t)
    raise KeyError(number)


def run_suite(digits: int = 60, quick: bool = False, only=None, echo=None) -> list:
    numbers = [n for n, _, _ in CRITERIA if (not quick or n in QUICK) and (only is None or n in only)]
    out = []
    for n in numbers:
        r = run_criterion(n, digits, quick)
        if echo:
            echo(r.line())
        out.append(r)
    return out


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating, mp.mpf)):
        f = float(v)
        return f if math.isfinite(f) else str(f)
    return v


def summary_json(results, digits: int, quick: bool) -> str:
    doc = {
        "schema": SCHEMA,
        "digits": digits,
        "quick": quick,
        "passed": all(r.passed for r in results),
        "criteria": [{"number": r.number, "title": r.title, "passed": r.passed,
                      "measured": _jsonable(r.measured)} for r in results],
    }
    return json.dumps(doc, sort_keys=True, indent=2)
