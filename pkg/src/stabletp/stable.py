"""Strictly stable densities.

Conventions: the characteristic function of the law with index alpha and
positivity parameter rho is

    E exp(i l X) = exp(-|l|^alpha exp(-i pi alpha (rho - 1/2) sgn l)),

so that rho = P(X > 0), alpha = 2 gives the heat kernel e^{-x^2/4}/(2 sqrt(pi))
and (alpha, 1) with alpha < 1 is the positive stable law with Laplace
transform exp(-l^alpha).

High precision values come from one of three routes: closed forms, the
convergent (or least-term asymptotic) series in x^{-alpha} and x, and an
integral over a finite interval of a positive, unimodal integrand
(Zolotarev's representation), which is differentiated under the integral sign
for derivatives. A vectorized double precision version of the latter is used
for screening and for the quadrature oracles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp
import numpy as np

from .errors import BracketingFailure, DomainError, InvalidParams, NonConvergence
from .specfun import DEFAULT_PRECISION, Precision, hermite, log_gamma, to_mpf

__all__ = [
    "StableParams",
    "EvalConfig",
    "density",
    "density_derivative",
    "derivative_at_zero",
    "space_time_density",
    "density_fourier",
    "density_fast",
    "log_density_fast",
    "laplace_oracle",
    "positive_mass",
    "symmetric_density",
    "symmetric_density_hermite",
    "mode",
    "fractional_moment_positive_part",
    "sample",
]

_GUARD = 10


@dataclass(frozen=True)
class StableParams:
    alpha: float | Fraction
    rho: float | Fraction

    def __post_init__(self):
        a, r = self.alpha, self.rho
        if not 0 < a <= 2:
            raise InvalidParams(f"alpha must lie in (0, 2], got {a}")
        if not 0 <= r <= 1:
            raise InvalidParams(f"rho must lie in [0, 1], got {r}")
        if a == 2 and r != Fraction(1, 2):
            raise InvalidParams("alpha = 2 forces rho = 1/2")
        if a == 1 and not 0 < r < 1:
            raise InvalidParams("alpha = 1 requires rho in (0, 1)")
        if a > 1:
            # small slack so that float inputs such as rho = 1/alpha pass
            tol = 1e-12 if isinstance(a, float) or isinstance(r, float) else 0
            if not (1 - 1 / Fraction(a) - tol <= r <= 1 / Fraction(a) + tol):
                raise InvalidParams(f"alpha = {a} > 1 requires rho in [1 - 1/alpha, 1/alpha], got {r}")

    @property
    def gamma_param(self):
        if self.rho == 0:
            return math.inf
        return 1 / self.rho - 1

    @property
    def delta_param(self):
        if self.rho == 0:
            return math.inf
        return 1 / (self.rho * self.alpha) - 1

    def reflected(self) -> "StableParams":
        """Law of -X."""
        return StableParams(self.alpha, 1 - self.rho)

    @property
    def is_positive(self) -> bool:
        return self.alpha < 1 and self.rho == 1


@dataclass(frozen=True)
class EvalConfig:
    precision: Precision = field(default_factory=lambda: DEFAULT_PRECISION)
    series_terms: int = 200
    quadrature_rel_tol: float = 1e-10
    # None lets the term-size estimate pick the regime; otherwise the tail
    # series is only tried for x >= regime_switch_x and the Taylor series for
    # x <= regime_switch_x
    regime_switch_x: float | None = None

    def __post_init__(self):
        if self.series_terms < 10:
            raise InvalidParams("series_terms must be at least 10")
        if not 0 < self.quadrature_rel_tol < 1e-4:
            raise InvalidParams("quadrature_rel_tol must lie in (0, 1e-4)")

    @property
    def digits(self) -> int:
        return self.precision.digits

    @classmethod
    def with_digits(cls, digits: int, **kw) -> "EvalConfig":
        return cls(precision=Precision(digits), **kw)


DEFAULT_CONFIG = EvalConfig()


def _cfg(cfg):
    if cfg is None:
        return DEFAULT_CONFIG
    if isinstance(cfg, Precision):
        return EvalConfig(precision=cfg)
    return cfg


# ---------------------------------------------------------------------------
# closed forms


def _closed_form(a, r, x, j):
    """Closed form value of f^{(j)}(x) or None."""
    if a == 2:
        u = x / 2
        return (-mp.mpf(1) / 2) ** j * hermite(j, u) * mp.exp(-u * u) / (2 * mp.sqrt(mp.pi))
    if a == 1:
        zeta = x + mp.expjpi(-r)
        return (-1) ** j * mp.factorial(j) * mp.im(1 / zeta ** (j + 1)) / mp.pi
    if a == mp.mpf(1) / 2 and r == 1 and j == 0:
        if x <= 0:
            return mp.mpf(0)
        return x ** (-mp.mpf(3) / 2) * mp.exp(-1 / (4 * x)) / (2 * mp.sqrt(mp.pi))
    return None


def _taylor_coeff(a, r, k):
    """f^{(k)}(0) = (-1)^k Gamma(1+(k+1)/a) sin(pi (k+1) r) / (pi (k+1))."""
    s = mp.sinpi((k + 1) * r)
    if s == 0:
        return mp.mpf(0)
    return (-1) ** k * mp.exp(mp.loggamma(1 + (k + 1) / a)) * s / (mp.pi * (k + 1))


# ---------------------------------------------------------------------------
# series


def _sinpi_abs(v) -> float:
    """|sin(pi v)| in double precision after exact reduction of v modulo 2."""
    red = v % 2
    if red == 0 or red == 1:
        return 0.0
    return abs(math.sin(math.pi * float(red)))


def _series_plan(logmag, first: int, nmax: int, digits: int):
    """Decide whether a series can be summed to ``digits`` digits.

    ``logmag(q)`` is the natural log of the q-th term's modulus (or -inf when
    the term vanishes). Returns (last index, extra digits needed) or None.
    Terms are scanned until they drop ``digits + 5`` decades under the first
    nonzero one; if that never happens inside ``nmax`` terms, or the terms
    start growing without bound first (asymptotic series past their least
    term), the plan is rejected.
    """
    lead = None
    peak = -math.inf
    target = None
    prev = math.inf
    growing = 0
    for q in range(first, first + nmax):
        lm = logmag(q)
        if lm == -math.inf:
            continue
        if lead is None:
            lead = lm
            target = lead - (digits + 5) * math.log(10)
        peak = max(peak, lm)
        if lm < target:
            extra = (peak - lead) / math.log(10)
            return q, int(math.ceil(extra))
        growing = growing + 1 if lm > prev else 0
        prev = lm
        if growing > 3 and lm > lead + 50 * math.log(10):
            return None
    return None


def _tail_series(a, r, x, j, cfg, force=False):
    """Series in x^{-alpha} for x > 0; convergent when alpha < 1."""
    af, xf = float(a), float(x)
    if af >= 1:
        return None
    if not force and cfg.regime_switch_x is not None and xf < cfg.regime_switch_x:
        return None
    lx = math.log(xf)

    def logmag(q):
        s = _sinpi_abs(q * r * a)
        if s < 1e-14:
            return -math.inf
        return math.lgamma(q * af + 1 + j) - math.lgamma(q + 1) - (q * af + 1 + j) * lx + math.log(s)

    plan = _series_plan(logmag, 1, cfg.series_terms if not force else 20 * cfg.series_terms, cfg.digits)
    if plan is None:
        return None
    last, extra = plan
    if extra > 40 and not force:
        return None
    with mp.workdps(cfg.digits + extra + _GUARD):
        a_, r_, x_ = to_mpf(a), to_mpf(r), to_mpf(x)
        lxm = mp.log(x_)
        terms = []
        for q in range(1, last + 1):
            s = mp.sinpi(q * r_ * a_)
            if s == 0:
                continue
            t = mp.exp(mp.loggamma(q * a_ + 1 + j) - mp.loggamma(q + 1) - (q * a_ + 1 + j) * lxm) * s
            terms.append(t if (q - 1 + j) % 2 == 0 else -t)
        out = mp.fsum(terms) / mp.pi
    return +out


def _taylor_series(a, r, x, j, cfg, force=False):
    """Series at the origin; convergent for alpha > 1, asymptotic for alpha < 1."""
    af, rf, xf = float(a), float(r), float(x)
    if af == 1:
        return None
    if af < 1 and rf == 1:
        return None  # every coefficient vanishes, the function is flat at 0
    if not force and cfg.regime_switch_x is not None and xf > cfg.regime_switch_x:
        return None
    if xf == 0:
        return _taylor_coeff(a, r, j)
    lx = math.log(xf)

    def logmag(m):
        k = m + j
        s = _sinpi_abs((k + 1) * r)
        if s < 1e-14:
            return -math.inf
        return math.lgamma(1 + (k + 1) / af) - math.log(k + 1) + m * lx - math.lgamma(m + 1) + math.log(s)

    plan = _series_plan(logmag, 0, cfg.series_terms if not force else 20 * cfg.series_terms, cfg.digits)
    if plan is None:
        return None
    last, extra = plan
    if extra > 40 and not force:
        return None
    with mp.workdps(cfg.digits + extra + _GUARD):
        a_, r_, x_ = to_mpf(a), to_mpf(r), to_mpf(x)
        out = mp.fsum(_taylor_coeff(a_, r_, m + j) * x_ ** m / mp.factorial(m) for m in range(last + 1))
    return +out


# ---------------------------------------------------------------------------
# integral representation (x > 0, alpha != 1)


def _poly_coeffs(j, p, b):
    """Coefficients of P_j in f^{(j)}(x) = C x^{-1-j} int w e^{-w} P_j(w).

    P_0 = 1 and P_{j+1}(w) = (p - j) P_j + b w (P_j' - P_j).
    """
    c = [mp.mpf(1)]
    for k in range(j):
        nxt = [mp.mpf(0)] * (len(c) + 1)
        for i, ci in enumerate(c):
            nxt[i] += (p - k) * ci
            nxt[i + 1] -= b * ci
            if i:
                nxt[i] += b * i * ci
        c = nxt
    return c


def _sincospi(v):
    """(sin(pi v), cos(pi v)) in double precision, exact at multiples of 1/2."""
    red = v % 2
    exact = {0: (0.0, 1.0), Fraction(1, 2): (1.0, 0.0), 1: (0.0, -1.0), Fraction(3, 2): (-1.0, 0.0)}
    for k, sc in exact.items():
        if red == k:
            return sc
    t = math.pi * float(red)
    return math.sin(t), math.cos(t)


def _targets_mp(logw, half, span, incr):
    """Values of log w at which to split the integral.

    Around the interior peak w = 1 when there is one; otherwise around the end
    where the integrand is largest. Also returns log of the integrand maximum.
    """
    tiny = mp.exp(mp.log(half) - span)
    ends = {side: logw(tiny, side) for side in (True, False)}
    lo_side, hi_side = (True, False) if incr else (False, True)
    lwmin = ends[lo_side] if ends[lo_side] is not None else mp.ninf
    lwmax = ends[hi_side] if ends[hi_side] is not None else mp.inf
    if lwmin > 0:
        w0 = mp.exp(lwmin)
        return [mp.log(w0 + d) for d in (mp.mpf(1) / 2, 2, 8, 32, 128)], lwmin - w0
    if lwmax < 0:
        return [lwmax - 3, lwmax - 10], lwmax - mp.exp(lwmax)
    return [mp.mpf(v) for v in (-4, -1.5, 0, 1.5, 3)], mp.mpf(-1)


def _zolotarev(alpha, rho, x, j, digits):
    """f^{(j)}_{alpha,rho}(x) for x > 0, alpha != 1 by the finite-interval integral.

    With phi + psi = pi rho, the integrand is w e^{-w} P_j(w) where
    w = x^{a/(a-1)} (sin psi / sin a phi)^{a/(a-1)} sin(a phi + psi) / sin psi
    is monotone in phi. The lower half is integrated in phi and the upper half
    in psi, and every sine is expanded around exactly reduced angles so that
    no cancellation occurs near either end.
    """
    a, r = to_mpf(alpha), to_mpf(rho)
    s_r, c_r = mp.sinpi(r), mp.cospi(r)
    ar = a * r
    s_ar, c_ar = mp.sinpi(ar), mp.cospi(ar)
    pr = mp.pi * r
    half = pr / 2
    am1 = a - 1
    b = a / am1
    p = 1 / am1
    bx = b * mp.log(x)
    incr = a < 1

    def logw(t, lower):
        if lower:
            sa = mp.sin(a * t)
            sp = s_r * mp.cos(t) - c_r * mp.sin(t)
            s3 = s_r * mp.cos(am1 * t) + c_r * mp.sin(am1 * t)
        else:
            sp = mp.sin(t)
            sa = s_ar * mp.cos(a * t) - c_ar * mp.sin(a * t)
            s3 = s_ar * mp.cos(am1 * t) - c_ar * mp.sin(am1 * t)
        if sa <= 0 or sp <= 0 or s3 <= 0:
            return None
        return b * (mp.log(sp) - mp.log(sa)) + mp.log(s3) - mp.log(sp) + bx

    span = 3 * digits + 30

    def locate(target):
        lower = (logw(half, True) > target) == incr
        increasing = lower == incr
        lo, hi = mp.log(half) - span, mp.log(half)
        v = logw(mp.exp(lo), lower)
        if v is None or (v > target) == increasing:
            return None
        for _ in range(40):
            mid = (lo + hi) / 2
            if (logw(mp.exp(mid), lower) < target) == increasing:
                lo = mid
            else:
                hi = mid
        return mp.exp((lo + hi) / 2), lower

    sides = {True: [mp.mpf(0), half], False: [mp.mpf(0), half]}
    targets, shift = _targets_mp(logw, half, span, incr)
    for target in targets:
        q = locate(target)
        if q is not None:
            sides[q[1]].append(q[0])
    coeffs = _poly_coeffs(j, p, b)[::-1]

    def integrand(t, lower):
        lw = logw(t, lower)
        if lw is None:
            return mp.mpf(0)
        w = mp.exp(lw)
        g = mp.exp(lw - w - shift)
        return g * mp.polyval(coeffs, w) if j else g

    total = mp.mpf(0)
    err = mp.mpf(0)
    for lower, pts in sides.items():
        pts = sorted(pts)
        for t0, t1 in zip(pts, pts[1:]):
            if t1 > t0:
                v, e = mp.quad(lambda t: integrand(t, lower), [t0, t1], error=True)
                total += v
                err += e
    if err > mp.mpf(10) ** (-(digits // 2)) * max(abs(total), mp.mpf(10) ** (-(digits // 4))):
        raise NonConvergence(f"integral for f^({j}) at x={mp.nstr(x, 8)} did not converge (err {mp.nstr(err, 3)})")
    return a / (mp.pi * abs(am1)) * x ** (-1 - j) * total * mp.exp(shift)



def _eval(p: StableParams, x, j: int, cfg: EvalConfig, method: str = "auto"):
    """f^{(j)}_{alpha,rho}(x) at precision cfg.digits, any real x."""
    digits = cfg.digits
    with mp.workdps(digits + _GUARD):
        x = to_mpf(x)
        if x < 0:
            out = _eval(p.reflected(), -x, j, cfg, method)
            return out if j % 2 == 0 else -out
        a, r = to_mpf(p.alpha), to_mpf(p.rho)
        if method in ("auto", "closed"):
            cf = _closed_form(a, r, x, j)
            if cf is not None:
                return +cf
            if method == "closed":
                raise DomainError("no closed form for these parameters")
        if x == 0:
            if a < 1 and r == 1:
                return mp.mpf(0)
            return _taylor_coeff(a, r, j)
        if r == 0:
            return mp.mpf(0)
        if method == "auto":
            for f in (_tail_series, _taylor_series):
                v = f(p.alpha, p.rho, x, j, cfg)
                if v is not None:
                    return v
            method = "integral"
        if method == "series":
            v = _tail_series(p.alpha, p.rho, x, j, cfg, force=True) if a < 1 else _taylor_series(p.alpha, p.rho, x, j, cfg, force=True)
            if v is None:
                raise NonConvergence("series does not reach the requested precision here")
            return v
        if method == "taylor":
            v = _taylor_series(p.alpha, p.rho, x, j, cfg, force=True)
            if v is None:
                raise NonConvergence("Taylor series does not reach the requested precision here")
            return v
        if method == "integral":
            if a == 1:
                return +_closed_form(a, r, x, j)
            with mp.workdps(digits + 2 * _GUARD):
                v = _zolotarev(p.alpha, p.rho, to_mpf(x), j, digits + _GUARD)
            return +v
        if method == "fourier":
            return _fourier(p, x, j, cfg)
        if method == "fd":
            return _fd_derivative(p, x, j, cfg)
        raise InvalidParams(f"unknown method {method!r}")


def density(p: StableParams, x, cfg: EvalConfig | None = None, method: str = "auto"):
    """f_{alpha,rho}(x).

    ``method`` is one of auto, closed, series, taylor, integral, fourier.
    """
    cfg = _cfg(cfg)
    v = _eval(p, x, 0, cfg, method)
    with mp.workdps(cfg.digits):
        return +v


def density_derivative(p: StableParams, j: int, x, cfg: EvalConfig | None = None, method: str = "auto"):
    """f^{(j)}_{alpha,rho}(x) for 0 <= j <= 8.

    ``method`` additionally accepts ``fd`` (Richardson-extrapolated central
    differences of the density).
    """
    if not 0 <= j <= 8:
        raise DomainError("derivative order must lie in 0..8")
    cfg = _cfg(cfg)
    v = _eval(p, x, j, cfg, method)
    with mp.workdps(cfg.digits):
        return +v


def derivative_at_zero(p: StableParams, j: int, prec: Precision | None = None):
    """f^{(j-1)}_{alpha,rho}(0) = (-1)^{j-1} Gamma(1+j/alpha) sin(pi j rho) / (pi j)."""
    if j < 1:
        raise DomainError("j must be a positive integer")
    prec = prec or DEFAULT_PRECISION
    with mp.workdps(prec.digits + _GUARD):
        v = _taylor_coeff(to_mpf(p.alpha), to_mpf(p.rho), j - 1)
    with mp.workdps(prec.digits):
        return +v


def space_time_density(p: StableParams, t, x, cfg: EvalConfig | None = None):
    """p_{alpha,rho}(t, x) = t^{-1/alpha} f_{alpha,rho}(x t^{-1/alpha})."""
    cfg = _cfg(cfg)
    with mp.workdps(cfg.digits + _GUARD):
        t = to_mpf(t)
        if t <= 0:
            raise DomainError("time must be positive")
        s = t ** (-1 / to_mpf(p.alpha))
        v = s * _eval(p, to_mpf(x) * s, 0, cfg)
    with mp.workdps(cfg.digits):
        return +v


def _fd_derivative(p, x, j, cfg, levels: int = 7):
    """Central differences of the density with Richardson extrapolation in h^2."""
    digits = cfg.digits
    work = digits + 4 * _GUARD
    sub = EvalConfig(precision=Precision(work), series_terms=cfg.series_terms)
    with mp.workdps(work):
        x = to_mpf(x)
        h = min(abs(x) / 4, mp.mpf(1) / 10) if x != 0 else mp.mpf(1) / 10
        binom = [mp.binomial(j, i) for i in range(j + 1)]
        table = []
        for k in range(levels):
            hk = h / 2 ** k
            d = mp.fsum((-1) ** i * binom[i] * _eval(p, x + (mp.mpf(j) / 2 - i) * hk, 0, sub)
                        for i in range(j + 1)) / hk ** j
            row = [d]
            for m in range(1, k + 1):
                row.append(row[m - 1] + (row[m - 1] - table[k - 1][m - 1]) / (4 ** m - 1))
            table.append(row)
        v = table[-1][-1]
    with mp.workdps(digits + _GUARD):
        return +v


def _fourier(p: StableParams, x, j, cfg):
    """Inverse Fourier integral of the characteristic function (oracle, any alpha)."""
    digits = cfg.digits
    with mp.workdps(digits + _GUARD):
        a, r, x = to_mpf(p.alpha), to_mpf(p.rho), to_mpf(x)
        rot = mp.expjpi(-a * (r - mp.mpf(1) / 2))
        c = mp.re(rot)
        lmax = ((digits + 5) * mp.log(10) / c + 5) ** (1 / a)

        def g(l):
            return mp.re((-1j * l) ** j * mp.exp(-l ** a * rot - 1j * l * x))

        if x == 0:
            nodes = [0, 1, lmax]
        else:
            period = 2 * mp.pi / abs(x)
            n = int(min(2000, max(4, float(lmax / period))))
            nodes = [0, 1] + [lmax * k / n for k in range(1, n + 1) if lmax * k / n > 1]
        v = mp.quad(g, nodes) / mp.pi
    return +v


def density_fourier(p: StableParams, x, cfg: EvalConfig | None = None, j: int = 0):
    """Independent oracle: direct Fourier inversion of the characteristic function."""
    return _fourier(p, x, j, _cfg(cfg))


# ---------------------------------------------------------------------------
# double precision vectorized path


def _ts_nodes(n=150, h=None):
    h = h or 6.0 / n
    k = np.arange(-n, n + 1) * h
    u = np.pi / 2 * np.sinh(k)
    z = np.tanh(u)
    w = h * np.pi / 2 * np.cosh(k) / np.cosh(u) ** 2
    keep = np.abs(z) < 1
    return z[keep], w[keep]


_TS = _ts_nodes()


def _fast_integral(alpha, rho, x, j):
    """Double precision version of the finite-interval integral for x > 0.

    Returns (logscale, integral) with f^{(j)}(x) = exp(logscale) * integral so
    that very small densities stay representable in log form.
    """
    a, r = float(alpha), float(rho)
    s_r, c_r = _sincospi(rho)
    s_ar, c_ar = _sincospi(alpha * rho)
    pr = math.pi * r
    half = pr / 2
    am1 = a - 1
    b = a / am1
    p = 1 / am1
    lx = np.log(x)
    bx = b * lx
    incr = a < 1
    bad = -np.inf if incr else np.inf

    def logw(t, lower, bxx):
        with np.errstate(all="ignore"):
            if lower:
                sa = np.sin(a * t)
                sp = s_r * np.cos(t) - c_r * np.sin(t)
                s3 = s_r * np.cos(am1 * t) + c_r * np.sin(am1 * t)
            else:
                sp = np.sin(t)
                sa = s_ar * np.cos(a * t) - c_ar * np.sin(a * t)
                s3 = s_ar * np.cos(am1 * t) - c_ar * np.sin(am1 * t)
            out = b * (np.log(sp) - np.log(sa)) + np.log(s3) - np.log(sp) + bxx
        ok = (sa > 0) & (sp > 0) & (s3 > 0)
        return np.where(ok & ~np.isnan(out), out, bad if lower else -bad)

    n = x.size
    lmid = logw(np.array(half), True, bx)
    lower_pts = [np.zeros(n), np.full(n, half)]
    upper_pts = [np.zeros(n), np.full(n, half)]
    tiny = math.exp(math.log(half) - 60.0)
    lw_lower_end = logw(np.array(tiny), True, bx)
    lw_upper_end = logw(np.array(tiny), False, bx)
    lwmin = lw_lower_end if incr else lw_upper_end
    lwmax = lw_upper_end if incr else lw_lower_end
    with np.errstate(all="ignore"):
        w0 = np.exp(np.clip(lwmin, -700, 700))
        left = [np.log(w0 + d) for d in (0.5, 2.0, 8.0, 32.0, 128.0)]
    right = [lwmax - 3, lwmax - 10, lwmax - 20, lwmax - 40, lwmax - 80]
    mid_t = [np.full(n, v) for v in (-4.0, -1.5, 0.0, 1.5, 3.0)]
    targets = [np.where(lwmin > 0, l, np.where(lwmax < 0, r, m)) for l, r, m in zip(left, right, mid_t)]
    for target in targets:
        lower = (lmid > target) == incr
        increasing = lower == incr
        lo = np.full(n, math.log(half) - 60.0)
        hi = np.full(n, math.log(half))
        for _ in range(45):
            mid = 0.5 * (lo + hi)
            e = np.exp(mid)
            v = np.where(lower, logw(e, True, bx), logw(e, False, bx))
            go_up = (v < target) == increasing
            lo = np.where(go_up, mid, lo)
            hi = np.where(go_up, hi, mid)
        t = np.exp(0.5 * (lo + hi))
        lower_pts.append(np.where(lower, t, half))
        upper_pts.append(np.where(lower, half, t))
    z, wts = _TS
    coeffs = [float(c) for c in _poly_coeffs(j, mp.mpf(p), mp.mpf(b))][::-1]
    chunks = []
    for lower, pts in ((True, lower_pts), (False, upper_pts)):
        pts = np.sort(np.stack(pts, axis=1), axis=1)
        for k in range(pts.shape[1] - 1):
            t0, t1 = pts[:, k], pts[:, k + 1]
            hw = 0.5 * (t1 - t0)
            t = (0.5 * (t0 + t1))[:, None] + hw[:, None] * z[None, :]
            lw = logw(t, lower, bx[:, None])
            with np.errstate(all="ignore"):
                wv = np.exp(lw)
                le = lw - wv
            le = np.where(np.isfinite(le), le, -np.inf)
            chunks.append((le, wv, hw))
    m = np.max(np.stack([np.max(le, axis=1) for le, _, _ in chunks]), axis=0)
    m = np.where(np.isfinite(m), m, 0.0)
    total = np.zeros(n)
    for le, wv, hw in chunks:
        with np.errstate(all="ignore"):
            g = np.exp(le - m[:, None])
            if j:
                wf = np.where(np.isfinite(wv), wv, 0.0)
                poly = np.zeros_like(wf)
                for c in coeffs:
                    poly = poly * wf + c
                g = g * poly
        g = np.where(np.isfinite(g), g, 0.0)
        total = total + hw * (g @ wts)
    logscale = math.log(a / (math.pi * abs(am1))) - (1 + j) * lx + m
    return logscale, total



def _fast_tail(a, r, x, j, nterms=40):
    """Tail series summed to its least term, double precision; returns (value, ok)."""
    lx = np.log(x)
    out = np.zeros_like(x)
    prev = np.full_like(x, np.inf)
    active = np.ones_like(x, dtype=bool)
    for q in range(1, nterms):
        s = math.sin(math.pi * q * r * a)
        lm = math.lgamma(q * a + 1 + j) - math.lgamma(q + 1) - (q * a + 1 + j) * lx
        mag = np.exp(lm)
        active &= mag < prev * 1.0000001 if a > 1 else active
        term = ((-1) ** (q - 1 + j)) * mag * s / math.pi
        out = out + np.where(active, term, 0.0)
        prev = np.where(active, mag, prev)
    ok = prev < 1e-17 * np.abs(out)
    return out, ok


def _fast_taylor(a, r, x, j, nterms=80):
    """Taylor series at 0 summed to its least term, double precision; returns (value, ok)."""
    out = np.zeros_like(x)
    lx = np.log(x)
    prev = np.full_like(x, np.inf)
    active = np.ones_like(x, dtype=bool)
    seen = False
    for m in range(nterms):
        k = j + m
        s = _sinpi_abs((k + 1) * r) if isinstance(r, Fraction) else abs(math.sin(math.pi * (k + 1) * r))
        if s < 1e-15:
            continue
        seen = True
        sign = (-1) ** k * (1 if math.sin(math.pi * (k + 1) * float(r)) > 0 else -1)
        lm = math.lgamma(1 + (k + 1) / a) + math.log(s / (math.pi * (k + 1))) - math.lgamma(m + 1) + m * lx
        mag = np.exp(lm)
        active &= mag < prev * 1.0000001
        out = out + np.where(active, sign * mag, 0.0)
        prev = np.where(active, mag, prev)
    if not seen:
        return out, np.zeros_like(x, dtype=bool)
    ok = prev < 1e-16 * np.abs(out)
    return out, ok


def density_fast(alpha, rho, x, j: int = 0):
    """f^{(j)}_{alpha,rho}(x) in double precision, vectorized over x."""
    a, r = float(alpha), float(rho)
    x = np.asarray(x, dtype=float)
    shape = x.shape
    x = x.ravel()
    out = np.zeros_like(x)
    neg = x < 0
    if neg.any():
        v = density_fast(alpha, 1 - rho, -x[neg], j)
        out[neg] = v if j % 2 == 0 else -v
    pos = x > 0
    zer = x == 0
    if zer.any():
        out[zer] = 0.0 if (a < 1 and r == 1) else float(_taylor_coeff(mp.mpf(a), mp.mpf(r), j))
    xp = x[pos]
    if xp.size:
        if a == 2:
            u = xp / 2
            out[pos] = (-0.5) ** j * hermite(j, u) * np.exp(-u * u) / (2 * math.sqrt(math.pi))
        elif a == 1:
            zeta = xp + np.exp(-1j * math.pi * r)
            out[pos] = (-1) ** j * math.factorial(j) * np.imag(1 / zeta ** (j + 1)) / math.pi
        elif r == 0:
            out[pos] = 0.0
        else:
            ls, tot = _fast_integral(alpha, rho, xp, j)
            with np.errstate(all="ignore"):
                v = np.exp(ls) * tot
            if j and not (a < 1 and r == 1):
                # the integral loses about j digits per decade as x -> 0; the
                # Taylor series converges for alpha > 1 but is only asymptotic below 1
                small = xp < (1.0 if a > 1 else 0.01)
                if small.any():
                    tv, ok = _fast_taylor(a, rho, xp[small], j)
                    v[small] = np.where(ok, tv, v[small])
            if a > 1 and abs(r * a - 1) > 1e-12:
                big = xp > 20
                if big.any():
                    tv, ok = _fast_tail(a, r, xp[big], j)
                    vb = v[big]
                    v[big] = np.where(ok, tv, vb)
            out[pos] = v
    return out.reshape(shape)


def log_density_fast(alpha, rho, x):
    """log f_{alpha,rho}(x) in double precision without underflow; -inf off the support."""
    a, r = float(alpha), float(rho)
    x = np.asarray(x, dtype=float)
    shape = x.shape
    x = x.ravel()
    out = np.full_like(x, -np.inf)
    neg = x < 0
    if neg.any():
        out[neg] = log_density_fast(alpha, 1 - rho, -x[neg])
    zer = x == 0
    if zer.any():
        v = 0.0 if (a < 1 and r == 1) else float(_taylor_coeff(mp.mpf(a), mp.mpf(r), 0))
        out[zer] = math.log(v) if v > 0 else -np.inf
    pos = x > 0
    xp = x[pos]
    if xp.size and r > 0:
        if a == 2.0:
            # N(0, 2)
            out[pos] = -xp * xp / 4 - math.log(2 * math.sqrt(math.pi))
        elif a == 1.0:
            with np.errstate(divide="ignore"):
                out[pos] = np.log(density_fast(a, r, xp))
        else:
            ls, tot = _fast_integral(alpha, rho, xp, 0)
            with np.errstate(divide="ignore"):
                v = ls + np.log(tot)
            if a > 1 and abs(r * a - 1) > 1e-12:
                big = xp > 20
                if big.any():
                    tv, ok = _fast_tail(a, r, xp[big], 0)
                    with np.errstate(divide="ignore", invalid="ignore"):
                        v[big] = np.where(ok & (tv > 0), np.log(np.abs(tv)), v[big])
            out[pos] = v
    return out.reshape(shape)


# ---------------------------------------------------------------------------
# oracles


_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def _panel_integral(fun, umin, umax, width=0.25):
    """Composite 24-point Gauss-Legendre rule for a vectorized integrand."""
    n = max(1, int(math.ceil((umax - umin) / width)))
    edges = np.linspace(umin, umax, n + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    hw = 0.5 * (edges[1:] - edges[:-1])
    u = mid[:, None] + hw[:, None] * _GL_X[None, :]
    vals = fun(u.ravel()).reshape(u.shape)
    return float(np.sum(vals * _GL_W[None, :] * hw[:, None]))


def _lower_cutoff(logg, uhi, drop=45.0):
    """Smallest u below which exp(logg) is negligible next to its maximum."""
    grid = np.arange(-400.0, uhi, 0.5)
    lg = logg(grid)
    m = np.max(lg)
    idx = np.nonzero(lg > m - drop)[0]
    return grid[idx[0]] - 1.0 if idx.size else uhi - 1.0


def laplace_oracle(alpha, lam, cfg: EvalConfig | None = None) -> float:
    """int_0^infty f_alpha(x) e^{-lam x} dx by quadrature; should equal exp(-lam^alpha)."""
    a = float(alpha)
    if not 0 < a < 1:
        raise DomainError("laplace_oracle needs alpha in (0, 1)")
    if not lam > 0:
        raise DomainError("lam must be positive")
    lam = float(lam)

    def logg(u):
        x = np.exp(u)
        return log_density_fast(alpha, 1, x) + u - lam * x

    umax = math.log(750.0 / lam)
    umin = _lower_cutoff(logg, umax)
    out = _panel_integral(lambda u: np.exp(logg(u)), umin, umax)
    if not math.isfinite(out):
        raise NonConvergence("laplace quadrature failed")
    return out


def _tail_mass(a, r, X, nterms=60):
    """int_X^infty f(x) dx from the tail series (convergent for a < 1, least term otherwise)."""
    tot = 0.0
    prev = math.inf
    for q in range(1, nterms):
        s = math.sin(math.pi * q * r * a)
        mag = math.exp(math.lgamma(q * a + 1) - math.lgamma(q + 1) - q * a * math.log(X)) / (q * a * math.pi)
        if a > 1 and mag > prev:
            break
        prev = mag
        tot += (-1) ** (q - 1) * mag * s
        if mag < 1e-20 * abs(tot):
            break
    return tot


def positive_mass(p: StableParams, cfg: EvalConfig | None = None) -> float:
    """int_0^infty f_{alpha,rho}(x) dx by quadrature; should equal rho."""
    a, r = float(p.alpha), float(p.rho)
    if r == 0:
        return 0.0
    X = 60.0 if a == 2 else 1e6

    def logg(u):
        return log_density_fast(p.alpha, p.rho, np.exp(u)) + u

    umax = math.log(X)
    umin = _lower_cutoff(logg, umax)
    tot = _panel_integral(lambda u: np.exp(logg(u)), umin, umax)
    if a == 1:
        c = math.cos(math.pi * r)
        s = math.sin(math.pi * r)
        tot += (math.pi / 2 - math.atan((X + c) / s)) / math.pi
    elif a < 2:
        tot += _tail_mass(a, r, X)
    return tot


def fractional_moment_positive_part(p: StableParams, s, prec: Precision | None = None):
    """E[(X^+)^s] for the law with density f/rho on (0, infty).

    Equal to sin(pi rho s)/(rho sin(pi s)) * Gamma(1-s/alpha)/Gamma(1-s), written
    as Gamma(1+s) Gamma(1-s/alpha) sinc(pi rho s) so that integer s need no limit.
    """
    prec = prec or DEFAULT_PRECISION
    if p.rho == 0:
        raise DomainError("X^+ is degenerate when rho = 0")
    with mp.workdps(prec.digits + _GUARD):
        a, r, s = to_mpf(p.alpha), to_mpf(p.rho), to_mpf(s)
        if r == 1 and a < 1:
            # positive law: every negative moment exists
            if not s < a:
                raise DomainError(f"s = {s} outside the strip (-inf, alpha)")
            v = mp.exp(log_gamma(1 - s / a, prec) - log_gamma(1 - s, prec))
        else:
            if not -1 < s < a:
                raise DomainError(f"s = {s} outside the strip (-1, alpha)")
            v = mp.exp(log_gamma(1 + s, prec) + log_gamma(1 - s / a, prec)) * mp.sincpi(r * s)
    with mp.workdps(prec.digits):
        return +v


# ---------------------------------------------------------------------------
# symmetric subordinated density


def symmetric_density(alpha_sub, n: int, x, cfg: EvalConfig | None = None, method: str = "auto"):
    """q^{(n)}(x) where q(x) = (1/pi) int_0^infty cos(tx) exp(-t^{2 alpha_sub}) dt.

    q is the symmetric stable density of index 2*alpha_sub. ``method="cosine"``
    evaluates the differentiated cosine integral
    (1/pi) int t^n cos(tx + n pi/2) exp(-t^{2 alpha_sub}) dt directly.
    """
    if not 0 < alpha_sub < 1:
        raise DomainError("alpha_sub must lie in (0, 1)")
    if n < 0:
        raise DomainError("derivative order must be nonnegative")
    cfg = _cfg(cfg)
    a2 = 2 * (Fraction(alpha_sub) if isinstance(alpha_sub, (int, Fraction)) else alpha_sub)
    if method == "cosine":
        return _cosine_integral(alpha_sub, n, x, cfg)
    p = StableParams(a2, Fraction(1, 2))
    if n > 8:
        raise DomainError("derivative order must lie in 0..8")
    return density_derivative(p, n, x, cfg)


def _cosine_integral(alpha_sub, n, x, cfg):
    digits = cfg.digits
    with mp.workdps(digits + _GUARD):
        a2 = 2 * to_mpf(alpha_sub)
        x = to_mpf(x)
        shift = n * mp.pi / 2

        def g(t):
            return t ** n * mp.cos(t * x + shift) * mp.exp(-t ** a2)

        tmax = ((digits + 5) * mp.log(10) + 10 * n + 10) ** (1 / a2) * 2
        if x == 0:
            nodes = [0, 1, tmax]
        else:
            period = 2 * mp.pi / abs(x)
            k = int(min(4000, max(4, float(tmax / period))))
            nodes = [0] + [tmax * i / k for i in range(1, k + 1)]
        v = mp.quad(g, nodes) / mp.pi
    with mp.workdps(digits):
        return +v


def symmetric_density_hermite(alpha_sub, n: int, x, cfg: EvalConfig | None = None):
    """q^{(n)}(x) for x > 0 from the subordination (Hermite) representation

        q^{(n)}(x) = (-1)^n / (2 sqrt(pi)) x^{1-n} int_0^infty z^{n-2} H_n(z) e^{-z^2} f(x^2 / (4 z^2)) dz

    with f the positive stable density of index alpha_sub.
    """
    cfg = _cfg(cfg)
    digits = cfg.digits
    sub = EvalConfig(precision=Precision(max(20, digits)), series_terms=cfg.series_terms)
    ps = StableParams(alpha_sub, 1)
    with mp.workdps(digits + _GUARD):
        x = to_mpf(x)
        if x <= 0:
            raise DomainError("the Hermite representation is used for x > 0")

        def g(z):
            if z == 0:
                return mp.mpf(0)
            return z ** (n - 2) * hermite(n, z) * mp.exp(-z * z) * _eval(ps, x * x / (4 * z * z), 0, sub)

        v = mp.quad(g, [0, mp.mpf(1) / 2, 1, 2, 4, 8]) * (-1) ** n / (2 * mp.sqrt(mp.pi)) * x ** (1 - n)
    with mp.workdps(digits):
        return +v


# ---------------------------------------------------------------------------
# mode


def mode(p: StableParams, cfg: EvalConfig | None = None):
    """Unique positive mode of the positive stable density f_alpha."""
    if not p.is_positive:
        raise DomainError("mode is provided for rho = 1, alpha < 1")
    cfg = _cfg(cfg)
    a = float(p.alpha)
    xs = np.logspace(-6, 3, 2000)
    d = density_fast(a, 1.0, xs, 1)
    sign = np.sign(d)
    changes = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    if len(changes) != 1:
        raise BracketingFailure(f"f' has {len(changes)} sign changes on the bracket")
    i = changes[0]
    lo, hi = xs[i], xs[i + 1]
    from scipy.optimize import brentq

    x0 = brentq(lambda t: float(density_fast(p.alpha, 1, np.array([t]), 1)[0]), lo, hi, xtol=1e-300, rtol=1e-15)
    digits = cfg.digits
    with mp.workdps(digits + _GUARD):
        root = mp.mpf(x0)
        for _ in range(12):
            step = _eval(p, root, 1, cfg) / _eval(p, root, 2, cfg)
            root -= step
            if abs(step) < root * mp.mpf(10) ** (-digits - 2):
                break
        else:
            raise BracketingFailure("Newton polishing of the mode did not converge")
        if not lo <= root <= hi:
            raise BracketingFailure("root polishing left the bracket")
    with mp.workdps(digits):
        return +root


# ---------------------------------------------------------------------------
# sampler


def sample(p: StableParams, seed, count: int) -> np.ndarray:
    """Chambers-Mallows-Stuck variates, deterministic given the seed."""
    rng = np.random.default_rng(seed)
    a = float(p.alpha)
    th = math.pi * (float(p.rho) - 0.5)
    u = rng.uniform(-math.pi / 2, math.pi / 2, count)
    e = rng.exponential(1.0, count)
    if a == 1:
        return math.cos(th) * np.tan(u) + math.sin(th)
    with np.errstate(all="ignore"):
        x = np.sin(a * (u + th)) / np.cos(u) ** (1 / a) * (np.cos(u - a * (u + th)) / e) ** ((1 - a) / a)
    return np.nan_to_num(x, nan=0.0)
