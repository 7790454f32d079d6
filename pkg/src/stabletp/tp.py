"""Minor determinants, sign classification and counterexample search.

Searches screen many grids in double precision through a kernel's
``log_fast`` evaluator and refine the most negative candidates; only the
finalists are evaluated as high precision minors, and a refutation is
re-confirmed with 30 extra digits before it is reported.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

from .errors import DomainError, InvalidParams, NumericFailure
from .kernels import Kernel
from .specfun import DEFAULT_PRECISION, Precision, to_mpf

__all__ = [
    "MinorResult",
    "TPReport",
    "minor",
    "cauchy_double_alternant",
    "tp_search",
    "sign_regularity_check",
    "variation_diminishing_check",
    "sign_changes",
    "normalized_minors_fast",
    "GRID_LO",
    "GRID_HI",
]

GRID_LO, GRID_HI = 1e-2, 1e2
CONFIRM_EXTRA = 30
_POOL = 8
_FINALISTS = 3
_ROUNDS = 50
_MIN_GAP = 1e-4  # minimal spacing of refined grid points in log coordinates
_CHUNK = 4096


@dataclass(frozen=True)
class MinorResult:
    value: mp.mpf
    hadamard_scale: mp.mpf
    classification: str  # "positive" | "negative" | "zero-indeterminate"
    digits: int = 60

    @property
    def normalized(self):
        if self.hadamard_scale == 0:
            return mp.mpf(0)
        return self.value / self.hadamard_scale


@dataclass
class TPReport:
    kernel: str
    order: int
    budget: int
    seed: int
    digits: int
    worst_minor: float
    counterexample: dict | None
    verdict: str  # "consistent" | "refuted"
    grids_examined: int = 0
    indeterminate: int = 0
    finalists: list = field(default_factory=list)

    def __post_init__(self):
        if (self.verdict == "refuted") != (self.counterexample is not None):
            raise InvalidParams("a report is refuted exactly when it carries a counterexample")

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel,
            "order": self.order,
            "budget": self.budget,
            "seed": self.seed,
            "digits": self.digits,
            "worst_minor": self.worst_minor,
            "counterexample": self.counterexample,
            "verdict": self.verdict,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _check_grid(pts, name):
    pts = list(pts)
    if not pts:
        raise InvalidParams(f"{name} is empty")
    for a, b in zip(pts, pts[1:]):
        if not a < b:
            raise InvalidParams(f"{name} must be strictly increasing")
    return pts


def _lu_det(A, n):
    """Determinant by Gaussian elimination with full pivoting (A is overwritten)."""
    det = mp.mpf(1)
    for k in range(n):
        pi, pj, best = k, k, mp.mpf(-1)
        for i in range(k, n):
            for j in range(k, n):
                if abs(A[i][j]) > best:
                    pi, pj, best = i, j, abs(A[i][j])
        if best == 0:
            return mp.mpf(0)
        if pi != k:
            A[k], A[pi] = A[pi], A[k]
            det = -det
        if pj != k:
            for row in A:
                row[k], row[pj] = row[pj], row[k]
            det = -det
        piv = A[k][k]
        det *= piv
        for i in range(k + 1, n):
            f = A[i][k] / piv
            if f:
                for j in range(k + 1, n):
                    A[i][j] -= f * A[k][j]
    return det


def _classify(value, scale, digits):
    tol = mp.mpf(10) ** (20 - digits)
    if value > tol * scale:
        return "positive"
    if value < -tol * scale:
        return "negative"
    return "zero-indeterminate"


def minor(k: Kernel, xs, ys, prec: Precision | None = None) -> MinorResult:
    """det[K(x_i, y_j)] in ``prec`` digits with its Hadamard scale and sign class."""
    prec = prec or DEFAULT_PRECISION
    xs, ys = list(xs), list(ys)
    if len(xs) != len(ys) or not xs:
        raise InvalidParams("grids must be nonempty and of equal length")
    n = len(xs)
    digits = prec.digits
    entries = [[k.evaluate(x, y, digits) for y in ys] for x in xs]
    with mp.workdps(digits + 10):
        A = [[to_mpf(v) for v in row] for row in entries]
        scale = mp.fprod(mp.sqrt(mp.fsum(v * v for v in row)) for row in A)
        det = _lu_det([row[:] for row in A], n)
    with mp.workdps(digits):
        det, scale = +det, +scale
    return MinorResult(det, scale, _classify(det, scale, digits), digits)


def cauchy_double_alternant(xs, ys, prec: Precision | None = None):
    """det[1/(x_i^2 + y_j^2)] in closed form."""
    prec = prec or DEFAULT_PRECISION
    xs = _check_grid(xs, "xs")
    ys = _check_grid(ys, "ys")
    if len(xs) != len(ys):
        raise InvalidParams("grids must have equal length")
    n = len(xs)
    with mp.workdps(prec.digits + 10):
        x2 = [to_mpf(x) ** 2 for x in xs]
        y2 = [to_mpf(y) ** 2 for y in ys]
        num = mp.fprod((x2[i] - x2[j]) * (y2[i] - y2[j]) for i in range(n) for j in range(i + 1, n))
        den = mp.fprod(x2[i] + y2[j] for i in range(n) for j in range(n))
        out = num / den
    with mp.workdps(prec.digits):
        return +out


# ---------------------------------------------------------------------------
# double precision screening


def normalized_minors_fast(k: Kernel, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """det[K(x_i,y_j)] / prod of row norms for a batch of grids (rows of X, Y)."""
    X = np.atleast_2d(X)
    Y = np.atleast_2d(Y)
    L = k.log_fast(X[:, :, None], Y[:, None, :])
    shift = np.max(L, axis=2, keepdims=True)
    shift = np.where(np.isfinite(shift), shift, 0.0)
    with np.errstate(over="ignore", invalid="ignore"):
        A = np.exp(L - shift)
    A = np.where(np.isfinite(A), A, np.nan)
    norms = np.prod(np.linalg.norm(A, axis=2), axis=1)
    det = np.linalg.det(A)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(norms > 0, det / norms, 0.0)
    return np.where(np.isfinite(out), out, np.nan)


def _sample(rng, count, m):
    lo, hi = math.log(GRID_LO), math.log(GRID_HI)
    U = np.sort(rng.uniform(lo, hi, size=(count, 2, m)), axis=2)
    return U[:, 0], U[:, 1]


def _admissible(v, m):
    lo, hi = math.log(GRID_LO), math.log(GRID_HI)
    if v.min() < lo or v.max() > hi:
        return False
    return bool(np.all(np.diff(v[:m]) >= _MIN_GAP) and np.all(np.diff(v[m:]) >= _MIN_GAP))


def _refine(k: Kernel, u, w, rounds=_ROUNDS, sign=1.0):
    """Derivative-free coordinate descent on log grid coordinates.

    Minimizes sign * normalized minor; returns the unsigned value.
    """
    m = len(u)
    v = np.concatenate([u, w])

    def obj(vs):
        vs = np.atleast_2d(vs)
        r = sign * normalized_minors_fast(k, np.exp(vs[:, :m]), np.exp(vs[:, m:]))
        return np.where(np.isnan(r), np.inf, r)

    best = obj(v)[0]
    step = 0.5
    for _ in range(rounds):
        for i in range(2 * m):
            cands = []
            for s in (step, -step):
                c = v.copy()
                c[i] += s
                if _admissible(c, m):
                    cands.append(c)
            if not cands:
                continue
            vals = obj(np.array(cands))
            j = int(np.argmin(vals))
            if vals[j] < best:
                v, best = cands[j], vals[j]
        step *= 0.8
    return v[:m], v[m:], float(sign * best)


def _as_floats(v):
    return [float(t) for t in np.exp(v)]


def tp_search(k: Kernel, m: int, budget: int = 10_000, seed: int = 0,
              prec: Precision | None = None) -> TPReport:
    """Search ``budget`` random grid pairs for a negative m x m minor."""
    prec = prec or DEFAULT_PRECISION
    if int(m) != m or m < 1:
        raise InvalidParams("order must be a positive integer")
    if int(budget) != budget or budget < 1:
        raise InvalidParams("budget must be a positive integer")
    if k.log_fast is None:
        raise InvalidParams(f"kernel {k.name} has no double precision evaluator for screening")
    rng = np.random.default_rng(seed)

    # screening: keep the _POOL most negative normalized minors
    pool_v = np.empty(0)
    pool_u = np.empty((0, m))
    pool_w = np.empty((0, m))
    done = 0
    while done < budget:
        n = min(_CHUNK, budget - done)
        U, W = _sample(rng, n, m)
        vals = normalized_minors_fast(k, np.exp(U), np.exp(W))
        pool_v = np.concatenate([pool_v, vals])
        pool_u = np.concatenate([pool_u, U])
        pool_w = np.concatenate([pool_w, W])
        order = np.argsort(pool_v, kind="stable")[:_POOL]
        pool_v, pool_u, pool_w = pool_v[order], pool_u[order], pool_w[order]
        done += n

    # refinement (order 1 minors are single entries: nothing to refine)
    cands = []
    for u, w, val in zip(pool_u, pool_w, pool_v):
        if m >= 2:
            u, w, val = _refine(k, u, w)
        cands.append((val, u, w))
    cands.sort(key=lambda c: c[0])
    seen, finalists = set(), []
    for val, u, w in cands:
        key = tuple(np.round(np.concatenate([u, w]), 6))
        if key in seen:
            continue
        seen.add(key)
        if val < 0 or not finalists:
            finalists.append((val, u, w))
        if len(finalists) >= _FINALISTS:
            break

    worst = math.inf
    counterexample = None
    indeterminate = 0
    records = []
    for val, u, w in finalists:
        xs, ys = _as_floats(u), _as_floats(w)
        res = minor(k, xs, ys, prec)
        nv = float(res.normalized)
        records.append({"xs": xs, "ys": ys, "screen": val, "value": nv, "class": res.classification})
        worst = min(worst, nv)
        if res.classification == "zero-indeterminate":
            indeterminate += 1
        if res.classification == "negative":
            conf = minor(k, xs, ys, prec.raised(CONFIRM_EXTRA))
            records[-1]["confirm"] = conf.classification
            if conf.classification == "negative":
                counterexample = {"xs": xs, "ys": ys, "value": float(conf.normalized)}
                break
    verdict = "refuted" if counterexample else "consistent"
    return TPReport(k.name, int(m), int(budget), int(seed), prec.digits, worst, counterexample,
                    verdict, grids_examined=int(budget), indeterminate=indeterminate, finalists=records)


# ---------------------------------------------------------------------------


@dataclass
class SignRegularityReport:
    kernel: str
    order: int
    signs: dict  # m -> "+", "-", "0" or "mixed"
    refuted_at: int | None

    @property
    def sign_regular(self) -> bool:
        return self.refuted_at is None


def sign_regularity_check(k: Kernel, order: int, budget: int = 1000, seed: int = 0,
                          prec: Precision | None = None) -> SignRegularityReport:
    """Check that the sampled m x m minors share one sign for each m <= order.

    Candidate minors of both signs are located in double precision (the most
    negative and the most positive after refinement) and classified in
    ``prec``; zero-indeterminate minors are ignored.
    """
    prec = prec or DEFAULT_PRECISION
    if order < 2:
        raise InvalidParams("order must be at least 2")
    rng = np.random.default_rng(seed)
    signs, refuted = {}, None
    for m in range(1, order + 1):
        U, W = _sample(rng, budget, m)
        vals = normalized_minors_fast(k, np.exp(U), np.exp(W))
        vals = np.where(np.isnan(vals), 0.0, vals)
        found = set()
        for idx, flip in ((int(np.argmin(vals)), False), (int(np.argmax(vals)), True)):
            u, w = U[idx], W[idx]
            if m >= 2:
                u, w, _ = _refine(k, u, w, sign=-1.0 if flip else 1.0)
            res = minor(k, _as_floats(u), _as_floats(w), prec)
            if res.classification == "positive":
                found.add("+")
            elif res.classification == "negative":
                found.add("-")
        if len(found) == 2:
            signs[m] = "mixed"
            if refuted is None:
                refuted = m
        else:
            signs[m] = found.pop() if found else "0"
    return SignRegularityReport(k.name, order, signs, refuted)




# ---------------------------------------------------------------------------


def sign_changes(values, zero_tol: float = 0.0) -> int:
    """Number of strict sign alternations after discarding |v| <= zero_tol."""
    prev = 0
    count = 0
    for v in values:
        v = float(v)
        if abs(v) <= zero_tol or v != v:
            continue
        s = 1 if v > 0 else -1
        if prev and s != prev:
            count += 1
        prev = s
    return count


@dataclass(frozen=True)
class StepFunction:
    """h(y) = values[i] on [breaks[i], breaks[i+1])."""

    breaks: tuple
    values: tuple

    def __post_init__(self):
        if len(self.breaks) != len(self.values) + 1:
            raise InvalidParams("a step function needs one more breakpoint than values")
        if any(not a < b for a, b in zip(self.breaks, self.breaks[1:])):
            raise InvalidParams("breakpoints must be strictly increasing")
        if self.breaks[0] <= 0:
            raise DomainError("step functions live on the positive half-line")


def variation_diminishing_check(k: Kernel, h: StepFunction, x_grid=None, nodes: int = 40):
    """Sign changes of h and of g(x) = int K(x, y) h(y) dy.

    The integral over each step is computed with Gauss-Legendre in log y on
    the kernel's double precision evaluator, on an x-grid that is log-uniform
    and refined between consecutive points of opposite sign.
    """
    if x_grid is None:
        x_grid = np.geomspace(GRID_LO, GRID_HI, 400)
    t, wts = np.polynomial.legendre.leggauss(nodes)
    ys, ws = [], []
    for (a, b), hv in zip(zip(h.breaks, h.breaks[1:]), h.values):
        la, lb = math.log(a), math.log(b)
        # subdivide long steps so every panel spans at most one decade
        npan = max(1, int(math.ceil((lb - la) / math.log(10))))
        edges = np.linspace(la, lb, npan + 1)
        for c, d in zip(edges, edges[1:]):
            u = (d - c) / 2 * t + (c + d) / 2
            ys.append(np.exp(u))
            ws.append(hv * wts * (d - c) / 2 * np.exp(u))
    ys = np.concatenate(ys)
    ws = np.concatenate(ws)

    def g(xv):
        xv = np.asarray(xv, float)
        L = k.log_fast(xv[:, None], ys[None, :])
        shift = np.max(L, axis=1, keepdims=True)
        return np.exp(shift[:, 0]) * (np.exp(L - shift) @ ws), np.exp(shift[:, 0]) * (np.exp(L - shift) @ np.abs(ws))

    xv = np.asarray(x_grid, float)
    gv, gabs = g(xv)
    # refine around sign changes to expose closely spaced pairs
    for _ in range(3):
        s = np.sign(gv)
        idx = np.nonzero(s[:-1] * s[1:] <= 0)[0]
        if idx.size == 0:
            break
        extra = np.concatenate([np.geomspace(xv[i], xv[i + 1], 12)[1:-1] for i in idx])
        xv = np.sort(np.concatenate([xv, extra]))
        gv, gabs = g(xv)
    # a value is zero when it is lost in the cancellation of the quadrature sum
    rel = np.where(np.abs(gv) <= 1e-12 * gabs, 0.0, gv)
    return sign_changes(h.values), sign_changes(rel)
