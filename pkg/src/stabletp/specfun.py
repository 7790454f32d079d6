"""Special functions at configurable precision.

Everything here is built on mpmath floating point numbers. The working
precision is always passed in explicitly through :class:`Precision` and is
only ever applied with ``mp.workdps`` so that the caller's mpmath context is
restored on exit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp

from .errors import DomainError, InvalidParams, PoleError

__all__ = [
    "Precision",
    "BetaParams",
    "DEFAULT_PRECISION",
    "DOUBLE",
    "log_gamma",
    "gamma",
    "digamma",
    "euler_gamma",
    "hermite",
    "chebyshev_u",
    "beta_fractional_moment",
    "beta_density",
    "gamma_density",
    "to_mpf",
]

_GUARD = 10


@dataclass(frozen=True)
class Precision:
    """Number of significant decimal digits of the working arithmetic."""

    digits: int = 60

    def __post_init__(self):
        if int(self.digits) != self.digits or self.digits < 15:
            raise InvalidParams(f"precision needs an integer number of digits >= 15, got {self.digits}")

    def workdps(self, extra: int = 0):
        return mp.workdps(self.digits + extra)

    @property
    def eps(self):
        return mp.mpf(10) ** (-self.digits)

    def raised(self, extra: int) -> "Precision":
        return Precision(self.digits + extra)


DEFAULT_PRECISION = Precision(60)
DOUBLE = Precision(16)


@dataclass(frozen=True)
class BetaParams:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise InvalidParams(f"Beta parameters must be positive, got a={self.a}, b={self.b}")


def to_mpf(v):
    """Convert ints, floats, Fractions and strings to an mpf at the current precision.

    Fractions are converted exactly (numerator and denominator separately) so
    that parameters such as 1/3 carry full working precision.
    """
    if isinstance(v, (mp.mpf, mp.mpc)):
        return v
    num = getattr(v, "numerator", None)
    den = getattr(v, "denominator", None)
    if num is not None and den is not None and not isinstance(v, (int, bool)):
        return mp.mpf(num) / mp.mpf(den) if den != 1 else mp.mpf(num)
    return mp.mpf(v)


def _is_nonpositive_integer(z) -> bool:
    if mp.im(z) != 0:
        return False
    x = mp.re(z)
    return x <= 0 and x == mp.floor(x)


def _stirling_radius(digits: int) -> int:
    # the least term of the Stirling series at |w| = r is about exp(-2 pi r)
    return int(math.ceil(digits * math.log(10) / (2 * math.pi))) + 2


def _stirling_log_gamma(w):
    eps = mp.eps
    res = (w - mp.mpf(1) / 2) * mp.log(w) - w + mp.log(2 * mp.pi) / 2
    w2 = w * w
    wpow = w
    k = 1
    while True:
        term = mp.bernoulli(2 * k) / (2 * k * (2 * k - 1) * wpow)
        res += term
        if abs(term) < eps * abs(res) or k > 400:
            break
        wpow *= w2
        k += 1
    return res


def log_gamma(z, prec: Precision | None = None):
    """Principal branch of log Gamma(z).

    Stirling's series evaluated after raising the argument by the recurrence
    log Gamma(z) = log Gamma(z + n) - sum log(z + k). Returns an mpf for
    positive real input and an mpc otherwise.
    """
    prec = prec or DEFAULT_PRECISION
    with mp.workdps(prec.digits + _GUARD):
        is_real = not isinstance(z, (complex, mp.mpc))
        zz = to_mpf(z) if is_real else mp.mpc(z)
        if _is_nonpositive_integer(zz):
            raise PoleError(f"log_gamma has a pole at {z}")
        r = _stirling_radius(prec.digits + _GUARD)
        n = max(0, int(math.ceil(r - float(mp.re(zz)))))
        w = zz + n
        res = _stirling_log_gamma(w)
        if n:
            if is_real and zz > 0:
                res -= mp.log(mp.fprod(zz + k for k in range(n)))
            else:
                res -= mp.fsum(mp.log(zz + k) for k in range(n))
        if is_real and zz > 0:
            res = mp.re(res)
    with mp.workdps(prec.digits):
        return +res


def gamma(x, prec: Precision | None = None):
    """Gamma function for real arguments, signed on the negative axis."""
    prec = prec or DEFAULT_PRECISION
    with mp.workdps(prec.digits + _GUARD):
        x = to_mpf(x)
        if x > 0:
            out = mp.exp(log_gamma(x, prec))
        else:
            lg = log_gamma(x, prec)
            out = mp.re(mp.exp(lg))
    with mp.workdps(prec.digits):
        return +out


def digamma(x, prec: Precision | None = None):
    """psi(x) = Gamma'(x)/Gamma(x) for real x > 0."""
    prec = prec or DEFAULT_PRECISION
    with mp.workdps(prec.digits + _GUARD):
        x = to_mpf(x)
        if not x > 0:
            raise DomainError(f"digamma is only provided on (0, inf), got {x}")
        r = _stirling_radius(prec.digits + _GUARD)
        n = max(0, int(math.ceil(r - float(x))))
        w = x + n
        res = mp.log(w) - 1 / (2 * w)
        w2 = w * w
        wpow = w2
        for k in range(1, 400):
            term = mp.bernoulli(2 * k) / (2 * k * wpow)
            res -= term
            if abs(term) < mp.eps * abs(res):
                break
            wpow *= w2
        if n:
            res -= mp.fsum(1 / (x + k) for k in range(n))
    with mp.workdps(prec.digits):
        return +res


def euler_gamma(prec: Precision | None = None):
    return -digamma(1, prec)


def hermite(n: int, z):
    """Physicists' Hermite polynomial H_n(z); works for floats, mpf and numpy arrays."""
    if n < 0:
        raise DomainError("hermite needs n >= 0")
    h_prev, h = 1 + 0 * z, 2 * z
    if n == 0:
        return h_prev
    for k in range(1, n):
        h_prev, h = h, 2 * z * h - 2 * k * h_prev
    return h


def chebyshev_u(n: int, x):
    """Chebyshev polynomial of the second kind U_n(x) by the three-term recurrence."""
    if n < 0:
        raise DomainError("chebyshev_u needs n >= 0")
    u_prev, u = 1 + 0 * x, 2 * x
    if n == 0:
        return u_prev
    for _ in range(1, n):
        u_prev, u = u, 2 * x * u - u_prev
    return u


def beta_fractional_moment(p: BetaParams, s, prec: Precision | None = None):
    """E[B_{a,b}^s] = Gamma(a+s)Gamma(a+b) / (Gamma(a)Gamma(a+b+s)) for s > -a."""
    prec = prec or DEFAULT_PRECISION
    with mp.workdps(prec.digits + _GUARD):
        a, b, s = to_mpf(p.a), to_mpf(p.b), to_mpf(s)
        if not s > -a:
            raise DomainError(f"Beta moment of order {s} is infinite for a={p.a}")
        out = mp.exp(log_gamma(a + s, prec) + log_gamma(a + b, prec)
                     - log_gamma(a, prec) - log_gamma(a + b + s, prec))
    with mp.workdps(prec.digits):
        return +out


def beta_density(p: BetaParams, x, prec: Precision | None = None):
    prec = prec or DEFAULT_PRECISION
    with mp.workdps(prec.digits + _GUARD):
        a, b, x = to_mpf(p.a), to_mpf(p.b), to_mpf(x)
        if not 0 < x < 1:
            return mp.mpf(0)
        logc = log_gamma(a + b, prec) - log_gamma(a, prec) - log_gamma(b, prec)
        out = mp.exp(logc + (a - 1) * mp.log(x) + (b - 1) * mp.log1p(-x))
    with mp.workdps(prec.digits):
        return +out


def gamma_density(a, x, prec: Precision | None = None):
    """Density x^{a-1} e^{-x} / Gamma(a) of the Gamma(a) law, zero for x <= 0."""
    prec = prec or DEFAULT_PRECISION
    with mp.workdps(prec.digits + _GUARD):
        a, x = to_mpf(a), to_mpf(x)
        if not a > 0:
            raise DomainError(f"Gamma shape must be positive, got {a}")
        if x <= 0:
            return mp.mpf(0)
        out = mp.exp((a - 1) * mp.log(x) - x - log_gamma(a, prec))
    with mp.workdps(prec.digits):
        return +out
