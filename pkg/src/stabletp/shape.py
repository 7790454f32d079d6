"""Shape properties: bell shape, monotone likelihood ratio, intersections.

All scans run on the vectorized double precision density path. Zeros are
counted as sign changes on a grid and each one is located by bisection.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import optimize

from .errors import DomainError, InvalidParams, NonConvergence
from .kernels import nearest_integer
from .specfun import hermite
from .stable import (EvalConfig, StableParams, _fast_integral, density_fast, log_density_fast,
                     mode)
from .tp import sign_changes

__all__ = [
    "ShapeReport",
    "bell_shape_count",
    "bell_shape_zeros",
    "hermite_zero_count",
    "hermite_zero_count_stated",
    "mlr_verdict",
    "mlr_empirical",
    "likelihood_slope",
    "likelihood_slope_monotone",
    "intersection_count",
    "ratio_nondecreasing_before_mode",
]


@dataclass
class ShapeReport:
    params: dict
    zero_counts: list = field(default_factory=list)
    mlr: dict | None = None
    intersections: dict = field(default_factory=dict)
    slope_monotone: bool | None = None
    grid: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def _sym_grid(L, n=3000, inner=1e-6):
    pos = np.geomspace(inner, L, n)
    return np.concatenate([-pos[::-1], [0.0], pos])


def _zero_tol(v):
    return 1e-12 * float(np.max(np.abs(v)))


def bell_shape_zeros(alpha_sub, k: int, L_cap: float = 1e8):
    """Sign-change locations of q^{(k)}, q the symmetric subordinated density.

    q coincides with the symmetric stable density of index 2 alpha_sub, so
    q^{(k)} = f^{(k)}_{2 alpha_sub, 1/2}. The scan covers [-L, L] with L the
    first decade beyond which |q^{(k)}| < 1e-12 (relative to its maximum).
    """
    if not 0 < alpha_sub < 1:
        raise InvalidParams("alpha_sub must lie in (0, 1)")
    if int(k) != k or not 0 <= k <= 4:
        raise InvalidParams("derivative order must be an integer in [0, 4]")
    a = 2 * float(alpha_sub)

    def q(x):
        return density_fast(a, 0.5, x, k)

    L = 10.0
    peak = float(np.max(np.abs(q(np.linspace(-5, 5, 201)))))
    while abs(q(np.array([L]))[0]) >= 1e-12 * peak:
        L *= 10
        if L > L_cap:
            raise NonConvergence("derivative has not decayed within the scan cap")
    xs = _sym_grid(L)
    v = q(xs)
    tol = _zero_tol(v)
    keep = np.abs(v) > tol
    xk, vk = xs[keep], v[keep]
    zeros = []
    for i in np.nonzero(np.sign(vk[:-1]) != np.sign(vk[1:]))[0]:
        lo, hi = xk[i], xk[i + 1]
        if lo < 0 < hi and k % 2 == 1:
            zeros.append(0.0)
            continue
        zeros.append(optimize.brentq(lambda t: q(np.array([t]))[0], lo, hi, xtol=1e-14))
    return zeros


def bell_shape_count(alpha_sub, n: int) -> list:
    """Zero counts of q^{(k)} for k = 0..n."""
    if int(n) != n or not 0 <= n <= 4:
        raise InvalidParams("n must be an integer in [0, 4]")
    return [len(bell_shape_zeros(alpha_sub, k)) for k in range(n + 1)]


def hermite_zero_count(n: int) -> int:
    """Number of zeros of e^{-z^2} z^{n-2} H_n(z) on (0, infinity), by root finding."""
    if int(n) != n or n < 2:
        raise InvalidParams("n must be an integer >= 2")
    coeffs = np.polynomial.hermite.herm2poly([0] * n + [1])
    roots = np.roots(coeffs[::-1])
    real = roots[np.abs(roots.imag) < 1e-9].real
    # z^{n-2} only vanishes at 0, which is not in the open half-line
    return int(np.sum(real > 1e-12))


def hermite_zero_count_stated(n: int) -> int:
    """The count [(n+1)/2] given alongside the Hermite argument; differs for odd n."""
    return (n + 1) // 2


def _gamma_delta(p: StableParams):
    a, r = p.alpha, p.rho
    return 1 / r - 1, 1 / (r * a) - 1


def _is(v, target):
    n = nearest_integer(v)
    return n is not None and n == target


def mlr_verdict(p: StableParams) -> bool:
    """Monotone likelihood ratio: inf(gamma,delta) >= 1, or (gamma, delta) in {0} x [1, inf), or (1, 0)."""
    if p.rho == 0:
        raise InvalidParams("rho must be positive")
    g, d = _gamma_delta(p)
    tol = 1e-12
    if min(g, d) >= 1 - tol:
        return True
    if _is(g, 0) and d >= 1 - tol:
        return True
    return _is(g, 1) and _is(d, 0)


@dataclass
class MLRReport:
    params: dict
    c: float
    monotone: bool
    direction: int  # +1 nondecreasing, -1 nonincreasing, 0 neither
    witness: tuple | None
    verdict: bool
    consistent: bool


def mlr_empirical(p: StableParams, c: float = 2.0, grid=None, slack: float = 1e-9) -> MLRReport:
    """Monotonicity of x -> f(x)/f(cx) on a 200-point log grid of (0, infinity)."""
    if c <= 0 or c == 1:
        raise InvalidParams("c must be positive and different from 1")
    xs = np.geomspace(1e-3, 1e3, 200) if grid is None else np.asarray(grid, float)
    lr = log_density_fast(p.alpha, p.rho, xs) - log_density_fast(p.alpha, p.rho, c * xs)
    if not np.all(np.isfinite(lr)):
        raise NonConvergence("log density not finite on the grid")
    d = np.diff(lr)
    up = bool(np.all(d >= -slack))
    down = bool(np.all(d <= slack))
    mono = up or down
    witness = None
    if not mono:
        i = int(np.argmax(d))
        j = int(np.argmin(d))
        witness = (float(xs[i]), float(xs[j]))
    verdict = mlr_verdict(p)
    return MLRReport({"alpha": float(p.alpha), "rho": float(p.rho)}, float(c), mono,
                     1 if up else (-1 if down else 0), witness, verdict, mono == verdict)


def likelihood_slope(alpha, x):
    """x f'(x) / f(x) for the positive density, computed without underflow."""
    x = np.asarray(x, float)
    if float(alpha) == 0.5:
        return -1.5 + 1 / (4 * x)
    _, t0 = _fast_integral(alpha, 1, x.ravel(), 0)
    _, t1 = _fast_integral(alpha, 1, x.ravel(), 1)
    # f^{(j)} = exp(logscale_j) * total_j with logscale_1 - logscale_0 = -log x
    return (t1 / t0).reshape(x.shape)


def likelihood_slope_monotone(alpha, cfg: EvalConfig | None = None, slack: float = 1e-10) -> bool:
    """x f'/f is nonincreasing on 200 points of (0, mode]."""
    if not 0.5 < alpha < 1:
        raise InvalidParams("the slope statement concerns alpha in (1/2, 1)")
    m = float(mode(StableParams(alpha, 1), cfg))
    xs = np.geomspace(m * 1e-3, m, 200)
    v = likelihood_slope(alpha, xs)
    return bool(np.all(np.diff(v) <= slack * np.maximum(1.0, np.abs(v[1:]))))


def ratio_nondecreasing_before_mode(alpha, c: float, cfg: EvalConfig | None = None, slack: float = 1e-10) -> bool:
    """x -> f(x)/f(cx) is nondecreasing on (0, m/c] for c > 1."""
    if not c > 1:
        raise InvalidParams("c must exceed 1")
    m = float(mode(StableParams(alpha, 1), cfg))
    xs = np.geomspace(m / c * 1e-3, m / c, 200)
    lr = log_density_fast(alpha, 1, xs) - log_density_fast(alpha, 1, c * xs)
    return bool(np.all(np.diff(lr) >= -slack))


def intersection_count(p: StableParams, c: float, n: int = 4000) -> int:
    """Sign changes of f(x) - f(x/c)/c over the real line.

    The comparison is done between log densities so that it stays
    meaningful in the tails, where both densities are tiny but their ratio
    tends to a constant different from 1.
    """
    if c <= 0 or c == 1:
        raise InvalidParams("c must be positive and different from 1")
    pos = np.geomspace(1e-4, 1e6, n)
    xs = pos if (p.rho == 1 and p.alpha < 1) else np.concatenate([-pos[::-1], pos])
    if p.rho == 0:
        xs = -pos[::-1]
    a, r = p.alpha, p.rho
    lf = log_density_fast(a, r, xs)
    lg = log_density_fast(a, r, xs / c) - math.log(c)
    both = np.isfinite(lf) & np.isfinite(lg)
    diff = np.where(both, lf - lg, np.where(np.isfinite(lf), 1.0, -1.0))
    return sign_changes(diff, 1e-10)
