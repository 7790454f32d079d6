"""Beta-product approximation of Z_alpha^{-alpha} and moment factorizations.

X_alpha = Z_alpha^{-alpha} is approximated by
X_{alpha,n} = e^{gamma(alpha-1)} prod_{k<=n} e^{psi((1+k)/alpha) - psi(1+k/alpha)} B_{1+k/alpha, 1/alpha-1}.
Each factor is centred in log scale: its scale is e^{-E[log B]} > 1. With the
reciprocal scales the characteristic functions drift by a phase linear in
s times the divergent sum of the E[log B_k], and do not converge.
Densities h of log X are recovered from their characteristic functions by
Fourier inversion; the moment identities compare Gamma-function products.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np
from scipy import special

from .errors import DomainError, InvalidParams, NonConvergence
from .specfun import (BetaParams, Precision, beta_fractional_moment, digamma, euler_gamma,
                      log_gamma, to_mpf)
from .stable import StableParams, fractional_moment_positive_part, log_density_fast, sample

__all__ = [
    "BetaProductSpec",
    "beta_product_spec",
    "h_hat",
    "h_hat_n",
    "h_hat_np",
    "h_hat_n_np",
    "density_from_cf",
    "h_alpha",
    "h_alpha_n",
    "h_alpha_direct",
    "sup_distance",
    "levy_exponent_oracle",
    "positive_stable_moment",
    "zolotarev_factorization_check",
    "duality_check",
    "chi_square_factorization_check",
    "monte_carlo_zolotarev",
    "monte_carlo_positive_part",
]


def _check_alpha(alpha):
    if not 0 < alpha < 1:
        raise InvalidParams("alpha must lie in (0, 1)")


@dataclass(frozen=True)
class BetaProductSpec:
    alpha: float
    n: int
    factors: tuple  # (a_k, b_k, scale_k)
    global_scale: float

    def __post_init__(self):
        if len(self.factors) != self.n + 1:
            raise InvalidParams("a Beta product of order n has n + 1 factors")
        for a, b, c in self.factors:
            if not (b > 0 and c > 1):
                raise InvalidParams("Beta factors need b > 0 and a scale above 1")


def beta_product_spec(alpha, n: int, prec: Precision | None = None) -> BetaProductSpec:
    _check_alpha(alpha)
    if int(n) != n or n < 0:
        raise InvalidParams("n must be a nonnegative integer")
    prec = prec or Precision(30)
    with mp.workdps(prec.digits + 10):
        a = to_mpf(alpha)
        factors = []
        for k in range(n + 1):
            lsc = digamma((1 + k) / a, prec) - digamma(1 + k / a, prec)
            factors.append((float(1 + k / a), float(1 / a - 1), float(mp.exp(lsc))))
        g = float(mp.exp(euler_gamma(prec) * (a - 1)))
    return BetaProductSpec(float(alpha), int(n), tuple(factors), g)


def h_hat(alpha, s, prec: Precision | None = None):
    """E[Z_alpha^{-i alpha s}] = Gamma(1 + i s) / Gamma(1 + i alpha s)."""
    _check_alpha(alpha)
    prec = prec or Precision(30)
    with mp.workdps(prec.digits + 10):
        a, s = to_mpf(alpha), to_mpf(s)
        if s == 0:
            return mp.mpc(1)
        out = mp.exp(log_gamma(mp.mpc(1, s), prec) - log_gamma(mp.mpc(1, a * s), prec))
    with mp.workdps(prec.digits):
        return +out


def h_hat_n(alpha, n: int, s, prec: Precision | None = None):
    """Characteristic function of log X_{alpha,n}."""
    _check_alpha(alpha)
    prec = prec or Precision(30)
    with mp.workdps(prec.digits + 10):
        a, s = to_mpf(alpha), to_mpf(s)
        if s == 0:
            return mp.mpc(1)
        lg = mp.mpc(0, s * euler_gamma(prec) * (a - 1))
        for k in range(n + 1):
            u, v = 1 + k / a, (1 + k) / a
            lg += mp.mpc(0, s) * (digamma(v, prec) - digamma(u, prec))
            lg += log_gamma(mp.mpc(u, s), prec) - log_gamma(mp.mpc(v, s), prec)
            lg += log_gamma(v, prec) - log_gamma(u, prec)
        out = mp.exp(lg)
    with mp.workdps(prec.digits):
        return +out


def h_hat_np(alpha, s):
    """Vectorized double precision h_hat."""
    s = np.asarray(s, float)
    return np.exp(special.loggamma(1 + 1j * s) - special.loggamma(1 + 1j * alpha * s))


def h_hat_n_np(alpha, n: int, s):
    """Vectorized double precision h_hat_n."""
    s = np.asarray(s, float)
    eg = float(np.euler_gamma)
    lg = 1j * s * eg * (alpha - 1)
    for k in range(n + 1):
        u, v = 1 + k / alpha, (1 + k) / alpha
        lg = lg + 1j * s * (special.digamma(v) - special.digamma(u))
        lg = lg + special.loggamma(u + 1j * s) - special.loggamma(v + 1j * s)
        lg = lg + special.gammaln(v) - special.gammaln(u)
    return np.exp(lg)


# ---------------------------------------------------------------------------
# Fourier inversion

_GL_T, _GL_W = np.polynomial.legendre.leggauss(16)


def _truncation(cf, tol, s_cap):
    """Smallest s on a geometric scan beyond which |cf| stays below tol."""
    s = np.geomspace(1.0, s_cap, 400)
    mag = np.abs(cf(s))
    above = np.nonzero(mag >= tol)[0]
    if above.size == 0:
        return 1.0
    if above[-1] == s.size - 1:
        return None
    return float(s[above[-1] + 1])


def _decay_guard(cf):
    """|cf(s)| <= C |s|^{-1.5} on [1e2, 1e3], judged by the log-log slope."""
    s = np.geomspace(1e2, 1e3, 20)
    mag = np.abs(cf(s))
    if np.all(mag < 1e-300):
        return True
    slope = np.polyfit(np.log(s), np.log(np.maximum(mag, 1e-300)), 1)[0]
    return slope <= -1.5


def density_from_cf(cf, x, tol: float = 1e-13, s_cap: float = 1e5, check_decay: bool = True):
    """(1/2 pi) int cf(s) e^{-i s x} ds for a real density, vectorized over x.

    ``cf`` maps a float array to complex values with cf(-s) = conj(cf(s)).
    The integral over [0, S] uses 16-point Gauss-Legendre panels short
    enough to resolve the oscillation at max |x|; S is where |cf| drops
    below ``tol``.
    """
    if check_decay and not _decay_guard(cf):
        raise NonConvergence("characteristic function decays too slowly for Fourier inversion")
    S = _truncation(cf, tol, s_cap)
    if S is None:
        raise NonConvergence("characteristic function has not decayed at the truncation cap")
    x = np.atleast_1d(np.asarray(x, float))
    width = min(1.0, 4.0 / max(1.0, float(np.max(np.abs(x)))))
    npan = int(math.ceil(S / width))
    out = np.zeros(x.size)
    for start in range(0, npan, 2000):
        stop = min(npan, start + 2000)
        left = width * np.arange(start, stop)
        s = (left[:, None] + width * (_GL_T[None, :] + 1) / 2).ravel()
        w = np.tile(_GL_W * width / 2, stop - start)
        c = cf(s) * w
        out += np.real(np.exp(-1j * np.outer(x, s)) @ c)
    return out / math.pi


def h_alpha(alpha, x):
    """Density of log X_alpha by Fourier inversion."""
    _check_alpha(alpha)
    return density_from_cf(lambda s: h_hat_np(alpha, s), x)


def h_alpha_n(alpha, n: int, x):
    """Density of log X_{alpha,n} by Fourier inversion."""
    _check_alpha(alpha)
    return density_from_cf(lambda s: h_hat_n_np(alpha, n, s), x)


def h_alpha_direct(alpha, x):
    """Density of log X_alpha from the stable density: (1/alpha) e^{-x/alpha} f_alpha(e^{-x/alpha})."""
    x = np.asarray(x, float)
    y = -x / alpha
    return np.exp(log_density_fast(alpha, 1, np.exp(y)) + y - math.log(alpha))


def sup_distance(alpha, n: int, xs=None) -> float:
    """max |h_alpha - h_{alpha,n}| on 400 points of [-10, 10] (log scale)."""
    _check_alpha(alpha)
    xs = np.linspace(-10.0, 10.0, 400) if xs is None else np.asarray(xs, float)
    return float(np.max(np.abs(h_alpha(alpha, xs) - h_alpha_n(alpha, n, xs))))


# ---------------------------------------------------------------------------


def levy_exponent_oracle(beta, s, prec: Precision | None = None):
    """E[Z_beta^{i s}] from its Levy-Khintchine representation.

    exp[-i gamma (1 - 1/beta) s + int_0^inf (e^{isx} - 1 - isx) k(x) dx] with
    k(x) = e^{-beta x}(1 - e^{-(1-beta)x}) / (x (1 - e^{-x})(1 - e^{-beta x})).
    Below x = 1e-6 the bracket is replaced by its power series.
    """
    if not 0 < beta < 1:
        raise InvalidParams("beta must lie in (0, 1)")
    prec = prec or Precision(30)
    with mp.workdps(prec.digits + 15):
        b, s = to_mpf(beta), to_mpf(s)
        if s == 0:
            return mp.mpc(1)
        cut = mp.mpf("1e-6")

        def kern(x):
            return mp.exp(-b * x) * (-mp.expm1(-(1 - b) * x)) / (x * (-mp.expm1(-x)) * (-mp.expm1(-b * x)))

        def bracket(x):
            if x < cut:
                z = mp.mpc(0, s * x)
                term, tot, n = z * z / 2, mp.mpc(0), 2
                while abs(term) > mp.eps * abs(tot) or n == 2:
                    tot += term
                    n += 1
                    term *= z / n
                return tot
            return mp.expm1(mp.mpc(0, s * x)) - mp.mpc(0, s * x)

        f = lambda x: bracket(x) * kern(x)
        pts = [0, cut, 1, 4, 16, 64, mp.inf]
        integral = mp.quad(f, pts)
        out = mp.exp(mp.mpc(0, -euler_gamma(prec) * (1 - 1 / b) * s) + integral)
    with mp.workdps(prec.digits):
        return +out


def positive_stable_moment(beta, u, prec: Precision | None = None):
    """E[Z_beta^u] = Gamma(1 - u/beta) / Gamma(1 - u) for u < beta, with Z_1 = 1."""
    prec = prec or Precision(30)
    with mp.workdps(prec.digits + 10):
        b, u = to_mpf(beta), to_mpf(u)
        if b == 1:
            return mp.mpf(1)
        if not u < b:
            raise DomainError(f"E[Z_beta^u] is infinite for u = {u} >= beta = {b}")
        out = mp.exp(log_gamma(1 - u / b, prec) - log_gamma(1 - u, prec))
    with mp.workdps(prec.digits):
        return +out


def zolotarev_factorization_check(p: StableParams, s, prec: Precision | None = None):
    """(E[(X^+)^s], E[Z_{alpha rho}^{rho s}] E[Z_rho^{-rho s}])."""
    prec = prec or Precision(30)
    if not 0 < p.rho <= 1 or not p.alpha * p.rho <= 1:
        raise InvalidParams("the factorization needs 0 < rho and alpha rho <= 1")
    lhs = fractional_moment_positive_part(p, s, prec)
    with mp.workdps(prec.digits + 10):
        r, s = to_mpf(p.rho), to_mpf(s)
        ar = to_mpf(p.alpha) * r
        rhs = positive_stable_moment(ar, r * s, prec) * positive_stable_moment(r, -r * s, prec)
    return lhs, rhs


def duality_check(alpha, rho, s, prec: Precision | None = None):
    """(E[(X^+_{alpha,rho})^s], E[(X^+_{1/alpha, alpha rho})^{-s/alpha}]) for alpha in (1, 2)."""
    prec = prec or Precision(30)
    if not 1 < alpha < 2:
        raise InvalidParams("duality is stated for alpha in (1, 2)")
    a, r = to_mpf(alpha), to_mpf(rho)
    if not 1 - 1 / a <= r <= 1 / a:
        raise InvalidParams("rho must lie in [1 - 1/alpha, 1/alpha]")
    lhs = fractional_moment_positive_part(StableParams(alpha, rho), s, prec)
    fa, fr = _exact(alpha), _exact(rho)
    dual = StableParams(1 / fa, fa * fr)
    with mp.workdps(prec.digits + 10):
        rhs = fractional_moment_positive_part(dual, -to_mpf(s) / to_mpf(alpha), prec)
    return lhs, rhs


def _exact(v):
    return Fraction(v) if isinstance(v, (int, Fraction)) else v


def chi_square_factorization_check(alpha, d: int, s, prec: Precision | None = None):
    """(E[G_{1/2}^s] E[Z^s], E[G_{d/2}^s] E[Z^s] E[B_{1/2,p}^s]) for odd d = 2p + 1."""
    _check_alpha(alpha)
    if int(d) != d or d < 3 or d % 2 == 0:
        raise InvalidParams("d must be an odd integer >= 3")
    prec = prec or Precision(30)
    p = (d - 1) // 2
    zs = positive_stable_moment(alpha, s, prec)
    with mp.workdps(prec.digits + 10):
        s_ = to_mpf(s)
        if not s_ > -mp.mpf(1) / 2:
            raise DomainError("E[G_{1/2}^s] is infinite for s <= -1/2")
        g_half = mp.exp(log_gamma(mp.mpf(1) / 2 + s_, prec) - log_gamma(mp.mpf(1) / 2, prec))
        g_d = mp.exp(log_gamma(mp.mpf(d) / 2 + s_, prec) - log_gamma(mp.mpf(d) / 2, prec))
        b = beta_fractional_moment(BetaParams(mp.mpf(1) / 2, p), s_, prec)
        lhs = g_half * zs
        rhs = g_d * zs * b
    return lhs, rhs


# ---------------------------------------------------------------------------
# Monte Carlo confirmations


def _children(seed, n):
    return np.random.SeedSequence(seed).spawn(n)


def monte_carlo_zolotarev(p: StableParams, s, count: int = 10**6, seed: int = 0):
    """Sample mean and standard error of (Z_{alpha rho}/Z_rho)^{rho s}."""
    c1, c2 = _children(seed, 2)
    ar = float(p.alpha) * float(p.rho)
    r = float(p.rho)
    z1 = sample(StableParams(ar, 1), c1, count) if ar < 1 else np.ones(count)
    z2 = sample(StableParams(r, 1), c2, count) if r < 1 else np.ones(count)
    v = (z1 / z2) ** (r * float(s))
    return float(np.mean(v)), float(np.std(v, ddof=1) / math.sqrt(count))


def monte_carlo_positive_part(p: StableParams, s, count: int = 10**6, seed: int = 0):
    """Sample mean and standard error of X^s over the positive draws of X."""
    x = sample(p, np.random.SeedSequence(seed), count)
    x = x[x > 0]
    v = x ** float(s)
    return float(np.mean(v)), float(np.std(v, ddof=1) / math.sqrt(x.size))
