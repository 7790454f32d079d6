"""Bivariate kernels and their predicted orders of total positivity.

A :class:`Kernel` carries a high precision evaluator (used for minors) and a
vectorized double precision ``log_fast`` (used to screen many grids cheaply).
Convolution kernels f(x/y) interpolate log f over the log ratio with
piecewise Chebyshev polynomials, which is accurate to a few ulps and turns
each evaluation into a table lookup.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import mpmath as mp
import numpy as np

from .errors import DomainError, InvalidParams, NonConvergence
from .specfun import Precision, to_mpf
from .stable import EvalConfig, StableParams, _cfg, _series_plan, density, log_density_fast

__all__ = [
    "Infinity",
    "INF",
    "TPOrder",
    "Kernel",
    "positive_stable_kernel",
    "stable_convolution_kernel",
    "cauchy_type_kernel",
    "fractional_integration_kernel",
    "radial_kernel",
    "gaussian_spacetime_kernel",
    "predict_tp_positive",
    "predict_tp_general",
    "radial_density",
    "radial_density_fast",
    "radial_series_d2",
    "chebyshev_partial_sum",
    "nearest_integer",
]


class Infinity(enum.Enum):
    INFINITY = "infinity"

    def __str__(self):
        return "infinity"


INF = Infinity.INFINITY

# floats closer than this to an integer (or a reciprocal integer) are
# treated as exact, so that 1/3 typed as 0.333... behaves like Fraction(1, 3)
_INT_TOL = 1e-12


@dataclass(frozen=True)
class TPOrder:
    value: int | Infinity
    branch: str = ""

    def __post_init__(self):
        if self.value is not INF and (int(self.value) != self.value or self.value < 1):
            raise InvalidParams(f"TP order must be a positive integer or infinity, got {self.value}")

    @property
    def is_infinite(self) -> bool:
        return self.value is INF

    def admits(self, m: int) -> bool:
        """True when TP_m is predicted."""
        return self.is_infinite or m <= self.value

    def to_json(self):
        return "infinity" if self.is_infinite else int(self.value)

    def __str__(self):
        return str(self.to_json())


def nearest_integer(v) -> int | None:
    """The integer v equals (exactly for Fractions, to 1e-12 for floats), else None."""
    if isinstance(v, (int, Fraction)):
        return int(v) if Fraction(v).denominator == 1 else None
    n = round(float(v))
    return n if abs(float(v) - n) <= _INT_TOL * max(1.0, abs(n)) else None


def predict_tp_positive(alpha) -> TPOrder:
    """Order of total positivity of f_alpha(x/y) and of K_alpha."""
    if not 0 < alpha < 1:
        raise InvalidParams("alpha must lie in (0, 1)")
    inv = 1 / (Fraction(alpha) if isinstance(alpha, (int, Fraction)) else alpha)
    n = nearest_integer(inv)
    if n is not None and n >= 2:
        return TPOrder(INF, "reciprocal-integer")
    return TPOrder(max(1, math.floor(inv)), "inf-bound")


def predict_tp_general(p: StableParams) -> TPOrder:
    """Order of total positivity of f_{alpha,rho}(x/y) from (gamma, delta)."""
    if not 0 < p.rho < 1 or not p.alpha < 2:
        raise InvalidParams("the general predicate needs rho in (0, 1) and alpha < 2")
    a = Fraction(p.alpha) if isinstance(p.alpha, (int, Fraction)) else p.alpha
    r = Fraction(p.rho) if isinstance(p.rho, (int, Fraction)) else p.rho
    g = 1 / r - 1
    d = 1 / (r * a) - 1
    gi, di = nearest_integer(g), nearest_integer(d)
    if gi is not None and di is not None and gi >= 0 and di >= 0:
        return TPOrder(INF, "(gamma,delta) in N^2")
    m = min(g, d)
    mi = nearest_integer(m)
    return TPOrder(int(mi if mi is not None else math.floor(m)) + 1, "inf-bound")


@dataclass(frozen=True, eq=False)
class Kernel:
    """Nonnegative kernel K(x, y) on the open positive quadrant."""

    name: str
    evaluate: Callable  # (x, y, digits) -> mpf
    log_fast: Callable | None  # (x array, y array) -> log K array
    predicted_order: TPOrder | None
    params: dict = field(default_factory=dict)
    domain: str = "x > 0, y > 0"

    def __call__(self, x, y, prec: Precision | None = None):
        digits = (prec or Precision(30)).digits
        return self.evaluate(x, y, digits)

    def fast(self, x, y):
        return np.exp(self.log_fast(np.asarray(x, float), np.asarray(y, float)))

    def describe(self) -> dict:
        out = {"name": self.name}
        out.update({k: (str(v) if isinstance(v, Fraction) else v) for k, v in self.params.items()})
        out["predicted_order"] = None if self.predicted_order is None else self.predicted_order.to_json()
        return out


# ---------------------------------------------------------------------------
# interpolation of log f on the log-ratio axis


class _PiecewiseCheb:
    """Piecewise Chebyshev interpolant of a vectorized function on [lo, hi]."""

    def __init__(self, fun, lo, hi, width=0.25, deg=24):
        self.lo, self.width, self.deg = lo, width, deg
        self.n = int(math.ceil((hi - lo) / width))
        k = np.arange(deg + 1)
        theta = np.pi * (k + 0.5) / (deg + 1)
        nodes = np.cos(theta)
        left = lo + width * np.arange(self.n)
        pts = left[:, None] + width * (nodes[None, :] + 1) / 2
        vals = np.asarray(fun(pts.ravel()), float).reshape(pts.shape)
        if not np.all(np.isfinite(vals)):
            raise NonConvergence("interpolation table contains non-finite values")
        basis = np.cos(np.outer(k, theta)) * 2 / (deg + 1)
        basis[0] /= 2
        self.coeffs = vals @ basis.T

    def __call__(self, u):
        u = np.asarray(u, float)
        idx = np.clip(np.floor((u - self.lo) / self.width).astype(int), 0, self.n - 1)
        t = 2 * (u - self.lo - idx * self.width) / self.width - 1
        c = self.coeffs[idx]
        b1 = np.zeros_like(u)
        b2 = np.zeros_like(u)
        for j in range(self.deg, 0, -1):
            b1, b2 = 2 * t * b1 - b2 + c[..., j], b1
        return t * b1 - b2 + c[..., 0]


# log ratios inside [-_UMAX, _UMAX] are interpolated; grids on [1e-2, 1e2]
# give |log(x/y)| <= 9.22
_UMAX = 12.0


class _ConvolutionLog:
    """log f(x/y) in double precision, lazily tabulated."""

    def __init__(self, logf):
        self.logf = logf

    @functools.cached_property
    def table(self):
        return _PiecewiseCheb(lambda u: self.logf(np.exp(u)), -_UMAX, _UMAX)

    def __call__(self, x, y):
        u = np.log(x) - np.log(y)
        inside = np.abs(u) <= _UMAX
        if np.all(inside):
            return self.table(u)
        out = np.empty(np.broadcast(x, y).shape)
        u = np.broadcast_to(u, out.shape)
        inside = np.broadcast_to(inside, out.shape)
        out[inside] = self.table(u[inside])
        out[~inside] = self.logf(np.exp(u[~inside]))
        return out


def _mp_cached(fun):
    return functools.lru_cache(maxsize=4096)(fun)


def _ratio(x, y):
    return to_mpf(x) / to_mpf(y)


# ---------------------------------------------------------------------------
# kernel instances


def positive_stable_kernel(alpha, cfg: EvalConfig | None = None) -> Kernel:
    """K(x, y) = f_alpha(x / y)."""
    if not 0 < alpha < 1:
        raise InvalidParams("alpha must lie in (0, 1)")
    cfg = _cfg(cfg)
    p = StableParams(alpha, 1)

    @_mp_cached
    def ev(x, y, digits):
        c = EvalConfig(Precision(digits), cfg.series_terms, cfg.quadrature_rel_tol, cfg.regime_switch_x)
        with mp.workdps(digits + 10):
            return density(p, _ratio(x, y), c)

    return Kernel("positive", ev, _ConvolutionLog(lambda r: log_density_fast(alpha, 1, r)),
                  predict_tp_positive(alpha), {"alpha": alpha})


def stable_convolution_kernel(p: StableParams, cfg: EvalConfig | None = None) -> Kernel:
    """K(x, y) = f_{alpha,rho}(x / y)."""
    if not 0 < p.rho < 1 or not p.alpha < 2:
        raise InvalidParams("the stable convolution kernel needs rho in (0, 1) and alpha < 2")
    cfg = _cfg(cfg)

    @_mp_cached
    def ev(x, y, digits):
        c = EvalConfig(Precision(digits), cfg.series_terms, cfg.quadrature_rel_tol, cfg.regime_switch_x)
        with mp.workdps(digits + 10):
            return density(p, _ratio(x, y), c)

    return Kernel("stable", ev, _ConvolutionLog(lambda r: log_density_fast(p.alpha, p.rho, r)),
                  predict_tp_general(p), {"alpha": p.alpha, "rho": p.rho})


def cauchy_type_kernel(alpha) -> Kernel:
    """K_alpha(t, x) = 1 / (t^2 + 2 cos(pi alpha) t x + x^2)."""
    if not 0 < alpha < 1:
        raise InvalidParams("alpha must lie in (0, 1)")
    c_fast = math.cos(math.pi * float(alpha))

    def ev(t, x, digits):
        with mp.workdps(digits + 10):
            t, x = to_mpf(t), to_mpf(x)
            c = mp.cospi(to_mpf(alpha))
            v = 1 / (t * t + 2 * c * t * x + x * x)
        with mp.workdps(digits):
            return +v

    def lf(t, x):
        return -np.log(t * t + 2 * c_fast * t * x + x * x)

    return Kernel("cauchy", ev, lf, predict_tp_positive(alpha), {"alpha": alpha})


def _fracint_order(beta) -> TPOrder:
    n = nearest_integer(beta)
    if n is not None:
        return TPOrder(INF, "beta integer")
    # largest n with beta > n - 1
    return TPOrder(int(math.ceil(beta)), "beta > n-1")


def fractional_integration_kernel(beta) -> Kernel:
    """I_beta(x, y) = (y - x)_+^{beta - 1}."""
    if not beta > 0:
        raise InvalidParams("beta must be positive")
    bf = float(beta)

    def ev(x, y, digits):
        with mp.workdps(digits + 10):
            z = to_mpf(y) - to_mpf(x)
            b = to_mpf(beta)
            if z > 0:
                v = z ** (b - 1)
            elif z < 0:
                v = mp.mpf(0)
            elif b == 1:
                v = mp.mpf(1)
            elif b > 1:
                v = mp.mpf(0)
            else:
                raise DomainError("I_beta is infinite on the diagonal for beta < 1")
        with mp.workdps(digits):
            return +v

    def lf(x, y):
        z = y - x
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(z > 0, (bf - 1) * np.log(np.where(z > 0, z, 1.0)), -np.inf)
        if bf == 1:
            out = np.where(z == 0, 0.0, out)
        return out

    return Kernel("fracint", ev, lf, _fracint_order(beta), {"beta": beta})


def gaussian_spacetime_kernel() -> Kernel:
    """p(t, x) = exp(-x^2 / 4t) / (2 sqrt(pi t)); domain t > 0, x real."""

    def ev(t, x, digits):
        with mp.workdps(digits + 10):
            t, x = to_mpf(t), to_mpf(x)
            if t <= 0:
                raise DomainError("time must be positive")
            v = mp.exp(-x * x / (4 * t)) / (2 * mp.sqrt(mp.pi * t))
        with mp.workdps(digits):
            return +v

    def lf(t, x):
        return -x * x / (4 * t) - 0.5 * np.log(4 * np.pi * t)

    return Kernel("gauss", ev, lf, TPOrder(INF, "heat kernel"), {}, domain="t > 0, x real")


# ---------------------------------------------------------------------------
# radial kernel: density of Gamma_{d/2} x Z_alpha


def radial_series_d2(alpha, z, digits: int = 30, terms: int = 400):
    """Tail series (1/pi) sum (-1)^{q-1} Gamma(1+q alpha)^2 / q! sin(pi q alpha) z^{-q alpha - 1}."""
    with mp.workdps(digits + 20):
        a, z = to_mpf(alpha), to_mpf(z)
        v = mp.fsum((-1) ** (q - 1) * mp.exp(2 * mp.loggamma(1 + q * a) - mp.loggamma(q + 1) - (q * a + 1) * mp.log(z))
                    * mp.sinpi(q * a) for q in range(1, terms)) / mp.pi
    with mp.workdps(digits):
        return +v


def _radial_series(alpha, d, z, digits, nmax=400):
    """General-d tail series, used when its term sizes allow it (alpha < 1/2)."""
    af, h, zf = float(alpha), d / 2, float(z)
    if af >= 0.5:
        return None
    lz = math.log(zf)

    def logmag(q):
        s = abs(math.sin(math.pi * q * af))
        if s < 1e-14:
            return -math.inf
        return math.lgamma(1 + q * af) + math.lgamma(h + q * af) - math.lgamma(q + 1) - (q * af + 1) * lz + math.log(s)

    plan = _series_plan(logmag, 1, nmax, digits)
    if plan is None or plan[1] > 30:
        return None
    last, extra = plan
    with mp.workdps(digits + extra + 15):
        a, z = to_mpf(alpha), to_mpf(z)
        hh = mp.mpf(d) / 2
        lz = mp.log(z)
        lgh = mp.loggamma(hh)
        v = mp.fsum((-1) ** (q - 1) * mp.exp(mp.loggamma(1 + q * a) + mp.loggamma(hh + q * a) - lgh
                                             - mp.loggamma(q + 1) - (q * a + 1) * lz) * mp.sinpi(q * a)
                    for q in range(1, last + 1)) / mp.pi
    return v


def _radial_mellin(alpha, d, z, digits):
    """Mellin-Barnes inversion along the vertical line through the real saddle."""
    with mp.workdps(digits + 15):
        a, z = to_mpf(alpha), to_mpf(z)
        h = mp.mpf(d) / 2
        lz = mp.log(z)
        lgh = mp.loggamma(h)

        def logm(s):
            return mp.loggamma(h + s) - lgh + mp.loggamma(1 - s / a) - mp.loggamma(1 - s)

        def obj(c):
            return mp.re(-(c + 1) * lz + logm(c))

        lo, hi = -h, a
        A = lo + (hi - lo) * mp.mpf("1e-8")
        B = hi - (hi - lo) * mp.mpf("1e-8")
        for _ in range(80):
            m1 = A + (B - A) / 3
            m2 = B - (B - A) / 3
            if obj(m1) < obj(m2):
                B = m2
            else:
                A = m1
        c = (A + B) / 2
        scale = obj(c)

        def g(t):
            s = mp.mpc(c, t)
            return mp.re(mp.exp(-(s + 1) * lz + logm(s) - scale))

        v, err = mp.quad(g, [0, 1, 4, 16, 64, mp.inf], error=True)
        if err > mp.mpf(10) ** (-(digits // 2)) * max(abs(v), mp.mpf(10) ** (-digits)):
            raise NonConvergence("Mellin-Barnes integral did not converge")
        return v * mp.exp(scale) / mp.pi


def radial_density(alpha, d: int, z, digits: int = 30):
    """Density f_{alpha,d}(z) of Gamma_{d/2} x Z_alpha at high precision."""
    if not 0 < alpha < 1:
        raise InvalidParams("alpha must lie in (0, 1)")
    if int(d) != d or d < 1:
        raise InvalidParams("dimension must be a positive integer")
    with mp.workdps(digits + 10):
        z = to_mpf(z)
        if z <= 0:
            return mp.mpf(0)
        v = _radial_series(alpha, d, z, digits)
        if v is None:
            v = _radial_mellin(alpha, d, z, digits)
    with mp.workdps(digits):
        return +v


# mixture grid on u = log x for the double precision radial density
_RAD_U = np.arange(-30.0, 80.0, 0.02)


@functools.lru_cache(maxsize=32)
def _radial_log_falpha(alpha: float):
    return log_density_fast(alpha, 1, np.exp(_RAD_U))


def radial_density_fast(alpha, d: int, z):
    """log f_{alpha,d}(z) in double precision, by the mixture integral over Z_alpha.

    f_{alpha,d}(z) = int f_Gamma(z e^{-u}) f_alpha(e^u) du, trapezoidal in u.
    Returns the logarithm.
    """
    z = np.asarray(z, float)
    shape = z.shape
    z = z.ravel()
    h = d / 2
    lfa = _radial_log_falpha(float(alpha))
    out = np.empty_like(z)
    lgh = math.lgamma(h)
    for i in range(0, z.size, 256):
        lz = np.log(z[i:i + 256])[:, None]
        ly = lz - _RAD_U[None, :]
        lg = (h - 1) * ly - np.exp(ly) - lgh + lfa[None, :]
        m = np.max(lg, axis=1)
        out[i:i + 256] = m + np.log(np.sum(np.exp(lg - m[:, None]), axis=1) * 0.02)
    return out.reshape(shape)


def radial_kernel(alpha, d: int, cfg: EvalConfig | None = None) -> Kernel:
    """K(t, r) = f_{alpha,d}(r / t)."""
    if not 0 < alpha < 1:
        raise InvalidParams("alpha must lie in (0, 1)")
    if int(d) != d or d < 1:
        raise InvalidParams("dimension must be a positive integer")
    cfg = _cfg(cfg)

    @_mp_cached
    def ev(t, r, digits):
        with mp.workdps(digits + 10):
            return radial_density(alpha, d, to_mpf(r) / to_mpf(t), digits)

    conv = _ConvolutionLog(lambda z: radial_density_fast(alpha, d, z))
    return Kernel("radial", ev, lambda t, r: conv(r, t), predict_tp_positive(alpha),
                  {"alpha": alpha, "dim": int(d)})


# ---------------------------------------------------------------------------


def chebyshev_partial_sum(alpha, z, N: int):
    """S_N = sum_{n=0}^N (-z)^n U_n(cos pi alpha), which tends to K_alpha(1, z) for |z| < 1."""
    from .specfun import chebyshev_u

    c = math.cos(math.pi * float(alpha))
    return sum((-z) ** n * chebyshev_u(n, c) for n in range(N + 1))
